#pragma once

#include <stdexcept>
#include <string>

namespace pamlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad parameters or a regime the requested operation does not cover.
struct InvalidArgument : Error {
  using Error::Error;
};

/// A lattice configuration does not contain every site a computation needs.
struct CoverageError : Error {
  using Error::Error;
};

/// An iterative solver or quadrature failed to reach its tolerance.
struct NonConvergence : Error {
  using Error::Error;
};

/// An enumeration would exceed its configured work bound.
struct WorkBoundExceeded : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace pamlab
