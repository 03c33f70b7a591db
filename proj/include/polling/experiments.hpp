#pragma once

#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "polling/config.hpp"
#include "polling/model.hpp"
#include "polling/twoqueue.hpp"

namespace polling {

// Builders for the experiment families studied by the lab.

/// Symmetric three-queue exhaustive system: unit-mean interarrival times
/// fitted to the given scv, exponential service with mean 0.25, deterministic
/// switch-over times.
SystemSpec symmetric_system(double scv_arrival, double switchover,
                            VisitOrder order = VisitOrder::Cyclic);

/// Asymmetric three-queue exhaustive cyclic system from the imbalance
/// parameterization (arithmetic rate/mean progressions), exponential service.
SystemSpec imbalanced_system(double rho, double scv_arrival, double imbalance_arrival,
                             double imbalance_service, double switchover);

/// The fixed two-queue test system: lambda = (0.3, 0.2), exponential service
/// with mean 1 at both queues, deterministic unit switch-overs, Q2 1-limited.
TwoQueueSpec reference_twoqueue(Discipline::Kind q1_kind);

/// A finished experiment: a CSV table (stable column schema) plus a
/// human-readable rendering.
struct ExperimentResult {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string pretty;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const nlohmann::json& params);

/// CSV ('.' decimals, no locale) or the pretty rendering, per cfg.format.
void write_result(const ExperimentResult& result, const ExperimentConfig& cfg,
                  std::ostream& out);

}  // namespace polling
