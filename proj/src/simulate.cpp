#include "polling/simulate.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>

#include "polling/errors.hpp"
#include "polling/rng.hpp"

namespace polling {

void SimConfig::validate_against(const SystemSpec& spec) const {
  if (replications < 1) throw SpecError("simulation needs at least one replication");
  if (warmup_cycles < 0) throw SpecError("warmup cycle count must be nonnegative");
  if (cycles_per_replication <= warmup_cycles)
    throw SpecError("cycles per replication must exceed the warmup");
  if (record_queue < 0 || record_queue >= spec.queue_count())
    throw SpecError("recorded queue index out of range");
  if (threads < 0) throw SpecError("thread count must be nonnegative");
}

namespace {

// Stream ids per queue: arrivals, services, switch-overs.
constexpr std::uint64_t kArrivalStream = 0;
constexpr std::uint64_t kServiceStream = 1;
constexpr std::uint64_t kSwitchStream = 2;

struct QueueRuntime {
  std::deque<double> fifo;  // arrival epochs of waiting customers
  double next_arrival = 0.0;
  RngStream arrivals;
  RngStream services;
  RngStream switchovers;

  QueueRuntime(std::uint64_t seed, std::uint64_t rep, std::uint64_t q)
      : arrivals(seed, rep, 3 * q + kArrivalStream),
        services(seed, rep, 3 * q + kServiceStream),
        switchovers(seed, rep, 3 * q + kSwitchStream) {}
};

class Replication {
 public:
  Replication(const SystemSpec& spec, const SimConfig& cfg, int rep)
      : spec_(spec), cfg_(cfg), n_(spec.queue_count()) {
    queues_.reserve(n_);
    for (int q = 0; q < n_; ++q) {
      queues_.emplace_back(cfg.master_seed, static_cast<std::uint64_t>(rep),
                           static_cast<std::uint64_t>(q));
      queues_[q].next_arrival = sample(spec.queues[q].interarrival, queues_[q].arrivals);
    }
    summary_.waiting.resize(n_);
    summary_.services_completed.assign(n_, 0);
    summary_.max_served_per_visit.assign(n_, 0);
    summary_.joint_sum.assign(n_, 0.0);
    summary_.joint_cross.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  }

  ReplicationSummary run() {
    double t = 0.0;
    int current = 0;
    long started_cycles = 0;
    long long visits = 0;
    bool measuring = false;
    double measure_start = 0.0;
    double last_poll = -1.0;
    int stalled_polls = 0;

    while (true) {
      // Polling instant of `current`. Server events outrank arrivals at
      // equal timestamps, so only arrivals strictly before t are visible.
      advance_arrivals_before(t);

      const bool boundary = spec_.visit_order == VisitOrder::Cyclic
                                ? current == 0
                                : visits % n_ == 0;
      if (boundary) {
        if (started_cycles == cfg_.cycles_per_replication) {
          summary_.measured_duration = t - measure_start;
          break;
        }
        if (!measuring && started_cycles == cfg_.warmup_cycles) {
          measuring = true;
          measure_start = t;
        }
        ++started_cycles;
      }

      // With all-zero switch-overs an idle system would poll forever at one
      // epoch; after a full fruitless round, advance time to the next
      // arrival (which is then immediately visible).
      if (t == last_poll && all_empty()) {
        if (++stalled_polls >= n_) {
          t = jump_to_next_arrival(t);
          stalled_polls = 0;
        }
      } else {
        stalled_polls = 0;
      }
      last_poll = t;
      ++visits;

      if (measuring && current == cfg_.record_queue) record_polling_instant();

      // Visit.
      int served = 0;
      const Discipline& disc = spec_.queues[current].discipline;
      switch (disc.kind) {
        case Discipline::Kind::Exhaustive:
          while (true) {
            advance_arrivals_before(t);
            if (queues_[current].fifo.empty()) break;
            serve_head(current, t, measuring);
            ++served;
          }
          break;
        case Discipline::Kind::Gated: {
          const std::size_t gate = queues_[current].fifo.size();
          for (std::size_t i = 0; i < gate; ++i) {
            serve_head(current, t, measuring);
            ++served;
          }
          break;
        }
        case Discipline::Kind::KLimited:
          while (served < disc.limit) {
            advance_arrivals_before(t);
            if (queues_[current].fifo.empty()) break;
            serve_head(current, t, measuring);
            ++served;
          }
          break;
      }
      if (served > summary_.max_served_per_visit[current])
        summary_.max_served_per_visit[current] = served;

      // Visit end: pick the next queue, then incur the departed queue's
      // switch-over time.
      advance_arrivals_before(t);
      const int departed = current;
      current = spec_.visit_order == VisitOrder::Cyclic ? (current + 1) % n_
                                                        : longest_queue();
      t += sample(spec_.switchovers[departed], queues_[departed].switchovers);
    }

    summary_.cycles = cfg_.cycles_per_replication - cfg_.warmup_cycles;
    return std::move(summary_);
  }

 private:
  void advance_arrivals_before(double t) {
    while (true) {
      int q = -1;
      double earliest = t;
      for (int i = 0; i < n_; ++i) {
        if (queues_[i].next_arrival < earliest) {
          earliest = queues_[i].next_arrival;
          q = i;
        }
      }
      if (q < 0) return;
      queues_[q].fifo.push_back(earliest);
      queues_[q].next_arrival =
          earliest + sample(spec_.queues[q].interarrival, queues_[q].arrivals);
    }
  }

  bool all_empty() const {
    for (const auto& q : queues_)
      if (!q.fifo.empty()) return false;
    return true;
  }

  double jump_to_next_arrival(double t) {
    double target = std::numeric_limits<double>::infinity();
    for (const auto& q : queues_) target = std::min(target, q.next_arrival);
    if (!std::isfinite(target) || target < t) return t;
    // Inclusive: the arrival at the jump target enters its queue.
    for (int i = 0; i < n_; ++i) {
      QueueRuntime& q = queues_[i];
      while (q.next_arrival <= target) {
        const double epoch = q.next_arrival;
        q.fifo.push_back(epoch);
        q.next_arrival = epoch + sample(spec_.queues[i].interarrival, q.arrivals);
      }
    }
    return target;
  }

  void serve_head(int q, double& t, bool measuring) {
    QueueRuntime& rt = queues_[q];
    const double arrival_epoch = rt.fifo.front();
    rt.fifo.pop_front();
    if (measuring) {
      const double wait = t - arrival_epoch;
      summary_.waiting[q].add(wait);
      if (cfg_.collect_waiting_samples && q == cfg_.record_queue)
        summary_.waiting_samples.push_back(wait);
    }
    t += sample(spec_.queues[q].service, rt.services);
    if (measuring) ++summary_.services_completed[q];
  }

  int longest_queue() const {
    int best = 0;
    std::size_t longest = queues_[0].fifo.size();
    for (int i = 1; i < n_; ++i) {
      if (queues_[i].fifo.size() > longest) {
        longest = queues_[i].fifo.size();
        best = i;
      }
    }
    return best;
  }

  void record_polling_instant() {
    ++summary_.polling_instants;
    summary_.polling_length.add(static_cast<double>(queues_[cfg_.record_queue].fifo.size()));
    for (int a = 0; a < n_; ++a) {
      const double la = static_cast<double>(queues_[a].fifo.size());
      summary_.joint_sum[a] += la;
      for (int b = 0; b < n_; ++b)
        summary_.joint_cross[static_cast<std::size_t>(a) * n_ + b] +=
            la * static_cast<double>(queues_[b].fifo.size());
    }
    if (cfg_.collect_polling_vectors)
      for (int a = 0; a < n_; ++a)
        summary_.polling_vectors.push_back(static_cast<std::uint32_t>(queues_[a].fifo.size()));
  }

  const SystemSpec& spec_;
  const SimConfig& cfg_;
  int n_;
  std::vector<QueueRuntime> queues_;
  ReplicationSummary summary_;
};

SummaryStat summarize(const std::vector<Moments>& reps) {
  Moments total;
  for (const auto& r : reps) total += r;
  const Estimate mean_est = estimate_mean(reps);
  const Estimate scv_est = estimate_scv(reps);
  SummaryStat s;
  s.count = total.count;
  s.mean = mean_est.value;
  s.mean_ci_half_width = mean_est.ci_half_width;
  s.scv = scv_est.value;
  s.scv_ci_half_width = scv_est.ci_half_width;
  s.scv_defined = scv_est.defined;
  return s;
}

}  // namespace

SimResult run(const SystemSpec& spec, const SimConfig& cfg) {
  validate(spec);
  cfg.validate_against(spec);

  std::vector<ReplicationSummary> reps(cfg.replications);
  int workers = cfg.threads == 0
                    ? static_cast<int>(std::thread::hardware_concurrency())
                    : cfg.threads;
  if (workers < 1) workers = 1;
  if (workers > cfg.replications) workers = cfg.replications;

  if (workers == 1) {
    for (int r = 0; r < cfg.replications; ++r) reps[r] = Replication(spec, cfg, r).run();
  } else {
    std::atomic<int> next{0};
    auto work = [&] {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= cfg.replications) return;
        reps[r] = Replication(spec, cfg, r).run();
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Deterministic reduction in replication order.
  SimResult out;
  out.master_seed = cfg.master_seed;
  out.replications = cfg.replications;

  const int n = spec.queue_count();
  std::vector<std::vector<Moments>> waits(n, std::vector<Moments>(cfg.replications));
  std::vector<Moments> polling(cfg.replications);
  long long instants = 0;
  std::vector<double> joint_sum(n, 0.0);
  double duration = 0.0;
  long cycles = 0;
  for (int r = 0; r < cfg.replications; ++r) {
    for (int q = 0; q < n; ++q) waits[q][r] = reps[r].waiting[q];
    polling[r] = reps[r].polling_length;
    instants += reps[r].polling_instants;
    for (int q = 0; q < n; ++q) joint_sum[q] += reps[r].joint_sum[q];
    duration += reps[r].measured_duration;
    cycles += reps[r].cycles;
  }
  if (instants == 0)
    throw NumericalError("no post-warmup polling instants at the recorded queue");

  out.waiting_by_queue.resize(n);
  for (int q = 0; q < n; ++q) out.waiting_by_queue[q] = summarize(waits[q]);
  out.polling_length = summarize(polling);

  // Scaling every sample by 1/E[S] divides mean and standard deviation alike,
  // so the scaled scv is the raw scv by construction.
  const DerivedLoads loads = derived_loads(spec);
  out.polling_length_scaled = out.polling_length;
  if (loads.mean_total_switchover > 0.0) {
    out.polling_length_scaled.mean /= loads.mean_total_switchover;
    out.polling_length_scaled.mean_ci_half_width /= loads.mean_total_switchover;
  }

  out.joint_polling_mean.resize(n);
  for (int q = 0; q < n; ++q)
    out.joint_polling_mean[q] = joint_sum[q] / static_cast<double>(instants);
  out.total_measured_cycles = cycles;
  out.mean_cycle_duration = cycles > 0 ? duration / static_cast<double>(cycles) : 0.0;

  if (cfg.collect_waiting_samples) {
    for (auto& r : reps)
      out.waiting_samples.insert(out.waiting_samples.end(), r.waiting_samples.begin(),
                                 r.waiting_samples.end());
  }
  if (cfg.collect_polling_vectors) {
    for (auto& r : reps)
      out.polling_vectors.insert(out.polling_vectors.end(), r.polling_vectors.begin(),
                                 r.polling_vectors.end());
  }
  out.per_replication = std::move(reps);
  return out;
}

}  // namespace polling
