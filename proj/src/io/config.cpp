#include "pamlab/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pamlab/core/error.hpp"

extern char** environ;

namespace pamlab::io {

namespace {

struct Default {
  const char* key;
  const char* value;
  const char* doc;
};

// Every documented key; `defaults` prints this table.
const Default kDefaults[] = {
    {"model.dimension", "1", "lattice dimension d (1..3)"},
    {"model.alpha", "4", "tail exponent alpha > d"},
    {"model.theta", "1", "displacement exponent theta > 0"},
    {"model.c0", "1", "tail amplitude C0 (nonzero; negative for attractive wells)"},
    {"model.core_radius", "1", "core radius r0 of u(x) = C0 max(|x|, r0)^-alpha"},
    {"model.trunc_radius", "0", "lattice-sum truncation radius (0: certified default)"},
    {"model.seed", "1", "root seed"},
    {"constants.kind", "c_minus", "c_minus | heavy_tail | one_dim | prediction | gap"},
    {"constants.k", "-1", "well depth K for c_minus (K < 0)"},
    {"constants.tol", "1e-8", "quadrature tolerance for heavy_tail"},
    {"constants.t", "100", "time for prediction and gap"},
    {"constants.p", "1", "moment order for prediction; p1 for gap"},
    {"constants.p2", "2", "p2 for gap"},
    {"eigen.h", "0.125,0.0625,0.03125", "mesh widths to sweep"},
    {"eigen.side", "1", "side length of the box domain (t / r with a configuration)"},
    {"eigen.potential", "none", "none | config (scaled config potential sum r^2 u(r x - q - xi_q))"},
    {"eigen.config", "", "configuration file for potential = config"},
    {"eigen.r", "1", "scale r for potential = config"},
    {"eigen.tol", "1e-8", "eigen residual tolerance (relative to max(1, lambda))"},
    {"eigen.max_iter", "200", "eigensolver restarts"},
    {"eigen.eigenfunction", "false", "also write the eigenfunction CSV of the finest mesh"},
    {"variational.form", "interval", "functional | interval | compare"},
    {"variational.t", "16", "time t (functional, compare)"},
    {"variational.r", "64", "scale r (interval form); t is solved from r"},
    {"variational.optimizer", "greedy", "greedy | annealing"},
    {"variational.budget", "2000", "eigensolves per restart"},
    {"variational.restarts", "1", "independent restarts"},
    {"variational.nodes_per_cell", "8", "mesh nodes per unit cell (functional, compare)"},
    {"variational.interval_nodes", "4", "nodes per lattice spacing 1/r (interval)"},
    {"variational.halo", "4", "halo width l"},
    {"variational.max_length", "8", "interval length cap M (scaled)"},
    {"variational.max_cells", "2", "animal size cap (compare)"},
    {"variational.displacement_cap", "1", "|zeta_q| cap (compare)"},
    {"meo.r", "32", "scale r"},
    {"meo.t", "128", "time t (Lambda_{t/r})"},
    {"meo.config", "", "configuration file (classify; default xi = 0 on the needed sites)"},
    {"meo.samples", "100", "Monte Carlo samples (volume)"},
    {"meo.max_cells", "2", "animal size cap (enumerate)"},
    {"meo.displacement_cap", "1", "|zeta| cap (enumerate)"},
    {"meo.halo", "1", "halo width l (enumerate)"},
    {"meo.work_bound", "10000000", "enumeration work bound"},
    {"fk.t", "1,2,4", "time grid"},
    {"fk.p", "1,2", "moment orders"},
    {"fk.n_env", "50", "environments"},
    {"fk.n_paths", "1000", "paths per environment (and per start point)"},
    {"fk.dt", "0", "time step (0: t/1024)"},
    {"fk.integrator", "left", "left | trapezoid"},
    {"fk.start", "uniform", "fixed | uniform | grid"},
    {"fk.x0", "0", "fixed start point, comma separated"},
    {"fk.grid", "4", "grid points per axis for start = grid"},
    {"fk.n_boot", "2000", "bootstrap replicates (ratio)"},
    {"fk.level", "0.95", "bootstrap confidence level"},
    {"fk.env_seed", "0", "environment index for quenched"},
    {"exponent.input", "", "CSV with columns t and log_value"},
    {"run.threads", "0", "worker threads (0: all cores)"},
    {"run.suite", "fast", "acceptance suite: fast | full"},
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower((unsigned char)c));
  return s;
}

void bad_value(const std::string& key, const std::string& v) {
  throw InvalidArgument("config: bad value '" + v + "' for " + key);
}

}  // namespace

Config Config::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  Config c;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      c.entries_["model." + lower(name)] = trim(node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) c.entries_[lower(name) + "." + lower(key)] = trim(leaf.data());
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::apply_environment(const std::function<const char*(const char*)>& getenv_fn,
                               const std::vector<std::string>& names) {
  const std::string prefix = "PAMLAB_";
  for (const auto& name : names) {
    if (name.rfind(prefix, 0) != 0) continue;
    const std::string rest = name.substr(prefix.size());
    const auto us = rest.find('_');
    if (us == std::string::npos || us == 0 || us + 1 == rest.size()) continue;
    const char* v = getenv_fn(name.c_str());
    if (!v) continue;
    entries_[lower(rest.substr(0, us)) + "." + lower(rest.substr(us + 1))] = trim(v);
  }
}

void Config::apply_process_environment() {
  std::vector<std::string> names;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv = *e;
    const auto eq = kv.find('=');
    if (eq != std::string::npos) names.push_back(kv.substr(0, eq));
  }
  std::sort(names.begin(), names.end());
  apply_environment([](const char* n) { return std::getenv(n); }, names);
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  char* end = nullptr;
  const double x = std::strtod(v->c_str(), &end);
  if (end == v->c_str() || *end != '\0') bad_value(key, *v);
  return x;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  char* end = nullptr;
  const long long x = std::strtoll(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0') bad_value(key, *v);
  return x;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  char* end = nullptr;
  if ((*v)[0] == '-') bad_value(key, *v);
  const unsigned long long x = std::strtoull(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0') bad_value(key, *v);
  return x;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  const std::string s = lower(*v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad_value(key, *v);
  return fallback;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  std::vector<double> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') bad_value(key, *v);
    out.push_back(x);
  }
  return out;
}

std::string Config::to_ini() const {
  std::ostringstream os;
  std::string section;
  for (const auto& [k, v] : entries_) {
    const auto dot = k.find('.');
    const std::string s = k.substr(0, dot);
    if (s != section) {
      if (!section.empty()) os << '\n';
      os << '[' << s << "]\n";
      section = s;
    }
    os << k.substr(dot + 1) << " = " << v << '\n';
  }
  return os.str();
}

model::ModelParams model_params(const Config& c) {
  model::ModelParams p;
  p.dim = int(c.get_int("model.dimension", 1));
  p.alpha = c.get_double("model.alpha", 4.0);
  p.theta = c.get_double("model.theta", 1.0);
  p.c0 = c.get_double("model.c0", 1.0);
  p.core_radius = c.get_double("model.core_radius", 1.0);
  p.validate();
  return p;
}

std::string defaults_ini() {
  std::ostringstream os;
  std::string section;
  for (const auto& d : kDefaults) {
    const std::string k = d.key;
    const auto dot = k.find('.');
    const std::string s = k.substr(0, dot);
    if (s != section) {
      if (!section.empty()) os << '\n';
      os << '[' << s << "]\n";
      section = s;
    }
    os << "; " << d.doc << '\n' << k.substr(dot + 1) << " = " << d.value << '\n';
  }
  return os.str();
}

Config default_config() {
  Config c;
  for (const auto& d : kDefaults) c.set(d.key, d.value);
  return c;
}

}  // namespace pamlab::io
