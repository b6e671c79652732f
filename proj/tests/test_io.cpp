#include <doctest.h>

#include <cstdlib>
#include <map>

#include "pamlab/core/error.hpp"
#include "pamlab/io/config.hpp"
#include "pamlab/io/manifest.hpp"

using namespace pamlab;
using namespace pamlab::io;

TEST_SUITE("io") {
  TEST_CASE("INI parsing") {
    const auto c = Config::parse(
        "dimension = 2\n"
        "; comment\n"
        "[FK]\n"
        "t = 1, 2, 4\n"
        "shared = yes\n"
        "# another\n"
        "[model]\n"
        "alpha = 5\n");
    CHECK(c.get_int("model.dimension", 0) == 2);
    CHECK(c.get_double("model.alpha", 0) == 5.0);
    CHECK(c.get_list("fk.t", {}) == std::vector<double>{1, 2, 4});
    CHECK(c.get_bool("fk.shared", false));
    CHECK(c.get_string("fk.missing", "x") == "x");
    CHECK_THROWS_AS(c.get_int("fk.t", 0), InvalidArgument);
  }

  TEST_CASE("environment overrides") {
    auto c = default_config();
    const std::map<std::string, std::string> env{{"PAMLAB_FK_N_ENV", "17"}, {"PAMLAB_MODEL_ALPHA", "3.5"},
                                                 {"OTHER", "1"}};
    std::vector<std::string> names;
    for (auto& [k, v] : env) names.push_back(k);
    c.apply_environment(
        [&](const char* n) -> const char* {
          auto it = env.find(n);
          return it == env.end() ? nullptr : it->second.c_str();
        },
        names);
    CHECK(c.get_int("fk.n_env", 0) == 17);
    CHECK(c.get_double("model.alpha", 0) == 3.5);
    CHECK_FALSE(c.has("other."));
  }

  TEST_CASE("canonical INI round trip") {
    const auto c = default_config();
    const auto back = Config::parse(c.to_ini());
    CHECK(back.entries() == c.entries());
    CHECK(Config::parse(defaults_ini()).entries() == c.entries());
  }

  TEST_CASE("model parameters are validated") {
    auto c = default_config();
    c.set("model.alpha", "0.5");
    CHECK_THROWS_AS(model_params(c), InvalidArgument);
    c.set("model.alpha", "abc");
    CHECK_THROWS_AS(model_params(c), InvalidArgument);
    c.set("model.alpha", "3");
    CHECK(model_params(c).alpha == 3.0);
  }

  TEST_CASE("FNV-1a reference values") {
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("foobar") == "85944171f73967e8");
  }

  TEST_CASE("manifest round trip and run id") {
    Manifest m;
    m.command = "fk ratio";
    m.config = default_config();
    m.seed = 42;
    m.threads = 4;
    m.outputs = {"a.csv", "a.txt"};
    m.summary = "line \"quoted\"\n";
    const auto back = Manifest::from_json(m.to_json());
    CHECK(back.command == m.command);
    CHECK(back.seed == 42);
    CHECK(back.config.entries() == m.config.entries());
    CHECK(back.outputs == m.outputs);
    CHECK(back.summary == m.summary);
    CHECK(back.run_id() == m.run_id());
    CHECK(back.to_json() == m.to_json());
    auto other = m;
    other.threads = 1;
    CHECK(other.run_id() == m.run_id());
    other.seed = 43;
    CHECK(other.run_id() != m.run_id());
  }
}
