#pragma once

#include <cstdint>
#include <vector>

#include "polling/model.hpp"
#include "polling/stats.hpp"

namespace polling {

struct SimConfig {
  std::uint64_t master_seed = 1;
  int replications = 10;
  long cycles_per_replication = 1000;
  long warmup_cycles = 100;
  int record_queue = 0;  // queue whose polling instants are recorded (Q_1)
  /// Collect raw post-warmup waiting times at the recorded queue.
  bool collect_waiting_samples = false;
  /// Collect the raw joint queue-length vector at each recorded polling
  /// instant (row-major, queue_count entries per instant).
  bool collect_polling_vectors = false;
  int threads = 1;  // 0 = hardware concurrency

  void validate_against(const SystemSpec& spec) const;
};

/// Raw per-replication accumulators; aggregation across replications is a
/// deterministic reduction in replication order.
struct ReplicationSummary {
  std::vector<Moments> waiting;      // per queue, post-warmup waits
  Moments polling_length;            // recorded queue's own length at its polling instants
  std::vector<double> joint_sum;     // sum of joint length vectors at recorded instants
  std::vector<double> joint_cross;   // sum of outer products, row-major N*N
  long long polling_instants = 0;
  std::vector<long long> services_completed;  // per queue, post-warmup
  std::vector<int> max_served_per_visit;      // per queue, over all visits
  long cycles = 0;                   // measured (post-warmup) cycles
  double measured_duration = 0.0;    // time spanned by the measured cycles
  std::vector<double> waiting_samples;
  std::vector<std::uint32_t> polling_vectors;
};

struct SummaryStat {
  long long count = 0;
  double mean = 0.0;
  double scv = 0.0;
  double mean_ci_half_width = 0.0;
  double scv_ci_half_width = 0.0;
  bool scv_defined = false;
};

struct SimResult {
  std::uint64_t master_seed = 0;
  int replications = 0;
  std::vector<SummaryStat> waiting_by_queue;
  SummaryStat polling_length;         // raw queue length at recorded polling instants
  SummaryStat polling_length_scaled;  // divided by E[S]; scv identical by construction
  std::vector<double> joint_polling_mean;  // at recorded polling instants
  double mean_cycle_duration = 0.0;
  long total_measured_cycles = 0;
  std::vector<ReplicationSummary> per_replication;
  std::vector<double> waiting_samples;          // pooled, replication order
  std::vector<std::uint32_t> polling_vectors;   // pooled, replication order
};

/// Discrete-event simulation of the polling system. Deterministic for a
/// given (spec, cfg) regardless of the number of worker threads.
SimResult run(const SystemSpec& spec, const SimConfig& cfg);

}  // namespace polling
