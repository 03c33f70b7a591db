#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "polling/config.hpp"
#include "polling/errors.hpp"

using namespace polling;
using nlohmann::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("polling_cfg_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path / name;
    std::ofstream out(p);
    out << text;
    return p.string();
  }
};

}  // namespace

TEST_CASE("distribution JSON forms") {
  CHECK(std::holds_alternative<Deterministic>(
      distribution_from_json(json{{"type", "deterministic"}, {"value", 2.0}})));
  const auto exp_rate = distribution_from_json(json{{"type", "exponential"}, {"rate", 4.0}});
  CHECK(std::get<Exponential>(exp_rate).rate == 4.0);
  const auto exp_mean = distribution_from_json(json{{"type", "exponential"}, {"mean", 0.25}});
  CHECK(std::get<Exponential>(exp_mean).rate == doctest::Approx(4.0));
  const auto fitted = distribution_from_json(json{{"fit", {{"mean", 1.0}, {"scv", 0.25}}}});
  CHECK(std::get<Erlang>(fitted).phases == 4);
  CHECK_THROWS_AS(distribution_from_json(json{{"type", "cauchy"}}), SpecError);
}

TEST_CASE("system JSON round trip") {
  const json j = {
      {"visit_order", "longest-queue"},
      {"queues",
       {{{"interarrival", {{"type", "exponential"}, {"rate", 1.0}}},
         {"service", {{"type", "exponential"}, {"mean", 0.25}}},
         {"discipline", "exhaustive"}},
        {{"interarrival", {{"type", "exponential"}, {"rate", 0.5}}},
         {"service", {{"type", "exponential"}, {"mean", 0.25}}},
         {"discipline", {{"k_limited", 2}}}}}},
      {"switchovers",
       {{{"type", "deterministic"}, {"value", 1.0}},
        {{"type", "deterministic"}, {"value", 0.5}}}}};
  const SystemSpec spec = system_from_json(j);
  CHECK(spec.visit_order == VisitOrder::LongestQueue);
  CHECK(spec.queue_count() == 2);
  CHECK(spec.queues[1].discipline.kind == Discipline::Kind::KLimited);
  CHECK(spec.queues[1].discipline.limit == 2);
  CHECK(mean(spec.switchovers[1]) == 0.5);
}

TEST_CASE("experiment config parsing and validation") {
  json doc = {{"experiment", "table1"},
              {"seed", 42},
              {"simulation", {{"replications", 7}, {"cycles", 100}, {"warmup", 10}}},
              {"format", "pretty"}};
  const ConfigFile cfg = ConfigFile::parse(doc);
  CHECK(cfg.experiment().kind == "table1");
  CHECK(cfg.experiment().sim.master_seed == 42);
  CHECK(cfg.experiment().sim.replications == 7);
  CHECK(cfg.experiment().format == "pretty");

  CHECK_THROWS_AS(ConfigFile::parse(json{{"experiment", "tableX"}}), SpecError);
  CHECK_THROWS_AS(ConfigFile::parse(json{{"seed", 1}}), SpecError);
  CHECK_THROWS_AS(
      ConfigFile::parse(json{{"experiment", "table1"}, {"format", "xml"}}), SpecError);
}

TEST_CASE("include mechanism merges shared blocks, including file wins") {
  TempDir dir;
  dir.write("base.json", R"({
    "experiment": "custom",
    "seed": 1,
    "simulation": {"replications": 4, "cycles": 50, "warmup": 5},
    "system": {
      "queues": [
        {"interarrival": {"type": "exponential", "rate": 0.5},
         "service": {"type": "exponential", "mean": 0.25},
         "discipline": "exhaustive"}
      ],
      "switchovers": [{"type": "deterministic", "value": 1.0}]
    }
  })");
  const std::string leaf = dir.write("leaf.json", R"({
    "include": "base.json",
    "seed": 99,
    "simulation": {"cycles": 80}
  })");
  const ConfigFile cfg = ConfigFile::load(leaf);
  CHECK(cfg.experiment().sim.master_seed == 99);           // overridden
  CHECK(cfg.experiment().sim.cycles_per_replication == 80); // overridden, nested
  CHECK(cfg.experiment().sim.replications == 4);            // inherited
  REQUIRE(cfg.experiment().system.has_value());
  CHECK(cfg.experiment().system->queue_count() == 1);
}

TEST_CASE("missing and malformed files raise config errors") {
  CHECK_THROWS_AS(ConfigFile::load("/nonexistent/nope.json"), SpecError);
  TempDir dir;
  const std::string bad = dir.write("bad.json", "{ not json");
  CHECK_THROWS_AS(ConfigFile::load(bad), SpecError);
}
