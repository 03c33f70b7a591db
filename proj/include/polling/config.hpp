#pragma once

#include <nlohmann/json_fwd.hpp>
#include <memory>
#include <optional>
#include <string>

#include "polling/model.hpp"
#include "polling/simulate.hpp"

namespace polling {

/// One experiment per config file; the common fields parsed out of the
/// (include-merged) JSON document.
struct ExperimentConfig {
  std::string kind;  // table1 | table2 | table3 | limit-sweep | pcl-check |
                     // e1l-eval | g1l-residual | custom
  SimConfig sim;
  std::string output_path;    // empty = stdout
  std::string format = "csv"; // csv | pretty
  std::optional<SystemSpec> system;
};

class ConfigFile {
 public:
  /// Loads a JSON config, resolving nested "include" references relative to
  /// each file's directory (the including file's keys win).
  static ConfigFile load(const std::string& path);
  /// Parses from an already-merged JSON document (for tests).
  static ConfigFile parse(const nlohmann::json& doc);

  ConfigFile(ConfigFile&&) noexcept;
  ConfigFile& operator=(ConfigFile&&) noexcept;
  ~ConfigFile();

  const ExperimentConfig& experiment() const { return experiment_; }
  ExperimentConfig& experiment() { return experiment_; }
  /// The full merged document, for experiment-specific knobs.
  const nlohmann::json& raw() const { return *doc_; }

 private:
  ConfigFile();
  std::unique_ptr<nlohmann::json> doc_;
  ExperimentConfig experiment_;
};

/// Builds a DistributionSpec from its JSON form: either a typed object
/// ({"type": "exponential", "rate": 1.0}, ...) or a two-moment fit request
/// ({"fit": {"mean": 1.0, "scv": 0.25}}).
DistributionSpec distribution_from_json(const nlohmann::json& j);

SystemSpec system_from_json(const nlohmann::json& j);

}  // namespace polling
