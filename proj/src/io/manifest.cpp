#include "pamlab/io/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pamlab/core/error.hpp"

namespace pamlab::io {

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::string Manifest::run_id() const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config.entries();
  j["seed"] = seed;
  return content_hash(j.dump());
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "v1";
  j["run_id"] = run_id();
  j["command"] = command;
  j["seed"] = seed;
  j["threads"] = threads;
  j["config"] = config.entries();
  j["outputs"] = outputs;
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

Manifest Manifest::from_json(const std::string& text) {
  Manifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.command = j.at("command").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.threads = j.value("threads", 0);
    for (const auto& [k, v] : j.at("config").items()) m.config.set(k, v.get<std::string>());
    if (j.contains("outputs")) m.outputs = j["outputs"].get<std::vector<std::string>>();
    m.summary = j.value("summary", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("manifest: ") + e.what());
  }
  return m;
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("manifest: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace pamlab::io
