#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pamlab/io/config.hpp"

namespace pamlab::io {

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string content_hash(const std::string& bytes);

struct Manifest {
  std::string command;                  // e.g. "fk annealed"
  Config config;                        // fully resolved parameters
  std::uint64_t seed = 0;
  int threads = 0;                      // not part of the run id
  std::vector<std::string> outputs;     // file names relative to the output directory
  std::string summary;

  /// Content address of (command, config, seed).
  std::string run_id() const;
  std::string to_json() const;
  static Manifest from_json(const std::string& text);
  static Manifest load(const std::string& path);
};

}  // namespace pamlab::io
