#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pamlab/model/params.hpp"

namespace pamlab::io {

/// Sectioned key-value configuration.  Keys are addressed as "section.key";
/// entries outside any section live in "model".
class Config {
 public:
  /// INI text: "[section]" headers, "key = value" lines, ';' or '#' comments.
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  /// PAMLAB_SECTION_KEY=value sets "section.key" (lower-cased); the first
  /// underscore after the prefix separates section and key.
  void apply_environment(const std::function<const char*(const char*)>& getenv_fn,
                         const std::vector<std::string>& names);
  /// apply_environment over the process environment.
  void apply_process_environment();

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list of reals.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void erase(const std::string& key) { entries_.erase(key); }
  void set_default(const std::string& key, const std::string& value) { entries_.emplace(key, value); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Canonical INI rendering (sections and keys sorted).
  std::string to_ini() const;

 private:
  std::map<std::string, std::string> entries_;
};

/// [model] dimension, alpha, theta, c0, core_radius; validated.
model::ModelParams model_params(const Config& config);

/// Every documented key with its default value, as commented INI.
std::string defaults_ini();

/// The defaults as a Config.
Config default_config();

}  // namespace pamlab::io
