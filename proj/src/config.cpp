#include "polling/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

#include "polling/errors.hpp"
#include "polling/fit.hpp"

namespace polling {

using nlohmann::json;

namespace {

// Keys of the including document override the included one, recursively for
// objects; arrays and scalars replace wholesale.
void deep_merge(json& base, const json& overlay) {
  if (!base.is_object() || !overlay.is_object()) {
    base = overlay;
    return;
  }
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()))
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

json load_with_includes(const std::filesystem::path& path, int depth) {
  if (depth > 16) throw SpecError("config include chain too deep: " + path.string());
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw SpecError("malformed config " + path.string() + ": " + e.what());
  }
  if (doc.contains("include")) {
    const std::filesystem::path inc =
        path.parent_path() / doc.at("include").get<std::string>();
    json base = load_with_includes(inc, depth + 1);
    doc.erase("include");
    deep_merge(base, doc);
    return base;
  }
  return doc;
}

Discipline discipline_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "exhaustive") return Discipline::exhaustive();
    if (s == "gated") return Discipline::gated();
    if (s == "1-limited") return Discipline::k_limited(1);
    throw SpecError("unknown discipline: " + s);
  }
  if (j.is_object() && j.contains("k_limited"))
    return Discipline::k_limited(j.at("k_limited").get<int>());
  throw SpecError("discipline must be a name or {\"k_limited\": k}");
}

}  // namespace

DistributionSpec distribution_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("distribution must be an object");
  if (j.contains("fit")) {
    const json& f = j.at("fit");
    return fit_phase_type(f.at("mean").get<double>(), f.at("scv").get<double>());
  }
  const std::string type = j.at("type").get<std::string>();
  DistributionSpec spec;
  if (type == "deterministic") {
    spec = Deterministic{j.at("value").get<double>()};
  } else if (type == "exponential") {
    if (j.contains("mean"))
      spec = Exponential{1.0 / j.at("mean").get<double>()};
    else
      spec = Exponential{j.at("rate").get<double>()};
  } else if (type == "erlang") {
    spec = Erlang{j.at("phases").get<int>(), j.at("rate").get<double>()};
  } else if (type == "mixed-erlang") {
    const int low = j.at("phases_low").get<int>();
    spec = MixedErlang{low, low + 1, j.at("prob_low").get<double>(), j.at("rate").get<double>()};
  } else if (type == "hyperexp2") {
    spec = Hyperexp2{j.at("prob1").get<double>(), j.at("rate1").get<double>(),
                     j.at("rate2").get<double>()};
  } else {
    throw SpecError("unknown distribution type: " + type);
  }
  validate(spec);
  return spec;
}

SystemSpec system_from_json(const json& j) {
  SystemSpec spec;
  if (j.contains("visit_order")) {
    const std::string order = j.at("visit_order").get<std::string>();
    if (order == "cyclic")
      spec.visit_order = VisitOrder::Cyclic;
    else if (order == "longest-queue")
      spec.visit_order = VisitOrder::LongestQueue;
    else
      throw SpecError("unknown visit order: " + order);
  }
  for (const json& q : j.at("queues")) {
    QueueSpec qs;
    qs.interarrival = distribution_from_json(q.at("interarrival"));
    qs.service = distribution_from_json(q.at("service"));
    qs.discipline = discipline_from_json(q.at("discipline"));
    spec.queues.push_back(std::move(qs));
  }
  for (const json& s : j.at("switchovers"))
    spec.switchovers.push_back(distribution_from_json(s));
  validate(spec);
  return spec;
}

ConfigFile::ConfigFile() : doc_(std::make_unique<json>(json::object())) {}

ConfigFile::~ConfigFile() = default;
ConfigFile::ConfigFile(ConfigFile&&) noexcept = default;
ConfigFile& ConfigFile::operator=(ConfigFile&&) noexcept = default;

ConfigFile ConfigFile::load(const std::string& path) {
  return parse(load_with_includes(path, 0));
}

ConfigFile ConfigFile::parse(const json& doc) {
  ConfigFile cfg;
  *cfg.doc_ = doc;
  ExperimentConfig& e = cfg.experiment_;

  if (!doc.contains("experiment")) throw SpecError("config needs an \"experiment\" kind");
  e.kind = doc.at("experiment").get<std::string>();
  static const char* kinds[] = {"table1",    "table2",    "table3",      "limit-sweep",
                                "pcl-check", "e1l-eval",  "g1l-residual", "custom"};
  bool known = false;
  for (const char* k : kinds) known = known || e.kind == k;
  if (!known) throw SpecError("unknown experiment kind: " + e.kind);

  if (doc.contains("seed")) e.sim.master_seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("simulation")) {
    const json& s = doc.at("simulation");
    if (s.contains("replications")) e.sim.replications = s.at("replications").get<int>();
    if (s.contains("cycles")) e.sim.cycles_per_replication = s.at("cycles").get<long>();
    if (s.contains("warmup")) e.sim.warmup_cycles = s.at("warmup").get<long>();
    if (s.contains("threads")) e.sim.threads = s.at("threads").get<int>();
    if (s.contains("record_queue")) e.sim.record_queue = s.at("record_queue").get<int>();
  }
  if (doc.contains("output")) e.output_path = doc.at("output").get<std::string>();
  if (doc.contains("format")) {
    e.format = doc.at("format").get<std::string>();
    if (e.format != "csv" && e.format != "pretty")
      throw SpecError("format must be csv or pretty");
  }
  if (doc.contains("system")) e.system = system_from_json(doc.at("system"));
  return cfg;
}

}  // namespace polling
