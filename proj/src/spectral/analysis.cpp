#include "pamlab/spectral/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "pamlab/core/error.hpp"

namespace pamlab::spectral {

MassCell eigenfunction_mass_cell(const SpectralResult& result, const Mesh& mesh, double r, double chi) {
  require(result.converged, "eigenfunction_mass_cell: eigenpair did not converge");
  require(result.phi.size() == mesh.size(), "eigenfunction_mass_cell: eigenfunction does not match the mesh");
  require(r >= 1.0, "eigenfunction_mass_cell: r must be >= 1");
  const int d = mesh.dim();
  // Nodes per 1/r cube along an axis.
  const double per = 1.0 / (r * mesh.h());
  const long s = std::lround(per);
  require(s >= 1 && std::abs(per - double(s)) < 1e-9, "eigenfunction_mass_cell: mesh does not resolve 1/r cubes");

  std::map<Site, double> mass;
  const double w = mesh.cell_volume();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Site& g = mesh.grid_coord(i);
    int lo[kMaxDim] = {0, 0, 0}, cnt[kMaxDim] = {1, 1, 1};
    for (int a = 0; a < d; ++a) {
      const long q = g[a] >= 0 ? g[a] / s : -((-g[a] + s - 1) / s);
      if (g[a] % s == 0) {
        lo[a] = int(q) - 1;
        cnt[a] = 2;
      } else {
        lo[a] = int(q);
      }
    }
    const double share = w * result.phi[i] / double(cnt[0] * cnt[1] * cnt[2]);
    for (int x = 0; x < cnt[0]; ++x)
      for (int y = 0; y < cnt[1]; ++y)
        for (int z = 0; z < cnt[2]; ++z) mass[Site{lo[0] + x, lo[1] + y, lo[2] + z}] += share;
  }
  MassCell out;
  for (const auto& [c, m] : mass)
    if (m > out.mass) {
      out.mass = m;
      out.cell = c;
    }
  const double sup = *std::max_element(result.phi.begin(), result.phi.end());
  out.lower_bound = std::pow(r, -d - chi) / (2.0 * sup);
  out.inequality_holds = out.mass >= out.lower_bound;
  out.size_condition = mesh.domain().volume() < std::pow(r, chi);
  return out;
}

void write_eigen_csv(std::ostream& os, const Mesh& mesh, const SpectralResult& result) {
  os << "# schema=v1\n";
  static const char* names[] = {"x1", "x2", "x3"};
  for (int a = 0; a < mesh.dim(); ++a) os << names[a] << ',';
  os << "phi\n";
  char buf[64];
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Point p = mesh.position(i);
    for (int a = 0; a < mesh.dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g,", p[a]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", result.phi[i]);
    os << buf;
  }
}

std::string eigen_json_header(const SpectralResult& result, std::size_t nodes) {
  nlohmann::json j;
  j["lambda"] = result.lambda;
  j["residual"] = result.residual;
  j["h"] = result.h;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["nodes"] = nodes;
  return j.dump(2);
}

void write_cells(std::ostream& os, const GridDomain& domain) {
  os << "# cells d=" << domain.dim << '\n';
  for (const auto& c : domain.cells) {
    for (int a = 0; a < domain.dim; ++a) os << (a ? " " : "") << c[a];
    os << '\n';
  }
}

GridDomain read_cells(std::istream& is, int dim, int nodes_per_cell, double cell_size) {
  require(dim >= 1 && dim <= kMaxDim, "read_cells: dimension must be 1..3");
  std::vector<Site> cells;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Site c{0, 0, 0};
    int k = 0, v;
    while (ls >> v) {
      if (k >= dim) throw InvalidArgument("read_cells: too many coordinates on line " + std::to_string(lineno));
      c[k++] = v;
    }
    if (!ls.eof()) throw InvalidArgument("read_cells: malformed line " + std::to_string(lineno));
    if (k == 0) continue;
    if (k != dim) throw InvalidArgument("read_cells: expected " + std::to_string(dim) + " coordinates on line " +
                                        std::to_string(lineno));
    cells.push_back(c);
  }
  return GridDomain::from_cells(dim, std::move(cells), nodes_per_cell, cell_size);
}

}  // namespace pamlab::spectral
