#pragma once

#include <string>
#include <vector>

#include "polling/distribution.hpp"

namespace polling {

struct Discipline {
  enum class Kind { Exhaustive, Gated, KLimited };
  Kind kind = Kind::Exhaustive;
  int limit = 0;  // only meaningful for KLimited; limit >= 1

  static Discipline exhaustive() { return {Kind::Exhaustive, 0}; }
  static Discipline gated() { return {Kind::Gated, 0}; }
  static Discipline k_limited(int k) { return {Kind::KLimited, k}; }

  /// Exhaustive and gated make the polling-instant process a multi-type
  /// branching process with immigration; k-limited does not.
  bool is_branching() const { return kind != Kind::KLimited; }
};

struct QueueSpec {
  DistributionSpec interarrival;  // mean 1/lambda
  DistributionSpec service;
  Discipline discipline;
};

enum class VisitOrder { Cyclic, LongestQueue };

/// Full parameterization of an N-queue polling system. switchovers[i] is the
/// time to move away from queue i to the next queue visited.
struct SystemSpec {
  std::vector<QueueSpec> queues;
  std::vector<DistributionSpec> switchovers;
  VisitOrder visit_order = VisitOrder::Cyclic;

  int queue_count() const { return static_cast<int>(queues.size()); }
  double arrival_rate(int i) const { return 1.0 / mean(queues[i].interarrival); }
  double mean_service(int i) const { return mean(queues[i].service); }
  double load(int i) const { return arrival_rate(i) * mean_service(i); }
};

struct DerivedLoads {
  std::vector<double> load_per_queue;  // rho_i = lambda_i E[B_i]
  double total_load = 0.0;             // rho
  double mean_total_switchover = 0.0;  // E[S]
  double mean_cycle = 0.0;             // E[S] / (1 - rho)
};

/// Validates the spec (positive rates, rho < 1, k-limited mean-cycle
/// condition) and throws SpecError / StabilityError on violation.
void validate(const SystemSpec& spec);

/// Exact load quantities from distribution moments. Rejects rho >= 1.
DerivedLoads derived_loads(const SystemSpec& spec);

/// Parameters of the imbalanced-system family: arrival rates and mean
/// service times form arithmetic progressions with max/min ratios
/// imbalance_arrival and imbalance_service, normalized so the rates average
/// to one and the total load equals rho.
struct ImbalanceParams {
  int queue_count = 1;
  double rho = 0.5;
  double imbalance_arrival = 1.0;  // >= 1
  double imbalance_service = 1.0;  // >= 1
  double scv_arrival = 1.0;        // > 0
};

struct ImbalancedRates {
  std::vector<double> arrival_rate;  // lambda_1 largest
  std::vector<double> mean_service;  // E[B_1] smallest
};

ImbalancedRates rates_from_imbalance(const ImbalanceParams& p);

std::string describe(const SystemSpec& spec);

}  // namespace polling
