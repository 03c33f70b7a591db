#include <doctest.h>

#include <cmath>

#include "polling/branching.hpp"
#include "polling/errors.hpp"
#include "polling/rng.hpp"
#include "polling/simulate.hpp"

using namespace polling;

namespace {

SystemSpec single_queue(const DistributionSpec& inter, const DistributionSpec& service,
                        Discipline disc, const DistributionSpec& sw) {
  SystemSpec spec;
  spec.queues.push_back({inter, service, disc});
  spec.switchovers.push_back(sw);
  return spec;
}

SystemSpec symmetric3(double switchover) {
  SystemSpec spec;
  for (int i = 0; i < 3; ++i) {
    spec.queues.push_back({Exponential{1.0}, Exponential{4.0}, Discipline::exhaustive()});
    spec.switchovers.push_back(Deterministic{switchover});
  }
  return spec;
}

}  // namespace

TEST_CASE("M/M/1 mean wait matches the Pollaczek-Khinchine value") {
  // Single exhaustive queue with zero switch-over time is a plain M/G/1:
  // E[W] = lambda E[B^2] / (2 (1 - rho)) = 1 for lambda = 0.5, exp(1) service.
  const SystemSpec spec = single_queue(Exponential{0.5}, Exponential{1.0},
                                       Discipline::exhaustive(), Deterministic{0.0});
  SimConfig cfg;
  cfg.master_seed = 2024;
  cfg.replications = 16;
  cfg.cycles_per_replication = 30000;
  cfg.warmup_cycles = 1000;
  const SimResult res = run(spec, cfg);
  const SummaryStat& w = res.waiting_by_queue[0];
  CHECK(w.count > 100000);
  CHECK(std::abs(w.mean - 1.0) <= w.mean_ci_half_width);
}

TEST_CASE("no arrivals: cycles are exactly the total switch-over time") {
  SystemSpec spec;
  for (int i = 0; i < 3; ++i) {
    spec.queues.push_back({Deterministic{1e9}, Exponential{4.0}, Discipline::exhaustive()});
    spec.switchovers.push_back(Deterministic{1.0});
  }
  SimConfig cfg;
  cfg.replications = 2;
  cfg.cycles_per_replication = 100;
  cfg.warmup_cycles = 10;
  const SimResult res = run(spec, cfg);
  CHECK(res.mean_cycle_duration == 3.0);
  CHECK(res.polling_length.count == 180);
  CHECK(res.polling_length.mean == 0.0);
  CHECK_FALSE(res.polling_length.scv_defined);
  for (const auto& w : res.waiting_by_queue) CHECK(w.count == 0);
}

TEST_CASE("deterministic gated trace: gate closes at the visit start") {
  // Arrivals every 0.625, service 0.5, switch-over 0.25 -- all dyadic, so
  // every epoch is exact. Customers arriving during a visit are served only
  // in the next one.
  const SystemSpec spec = single_queue(Deterministic{0.625}, Deterministic{0.5},
                                       Discipline::gated(), Deterministic{0.25});
  SimConfig cfg;
  cfg.replications = 1;
  cfg.cycles_per_replication = 12;
  cfg.warmup_cycles = 0;
  cfg.collect_waiting_samples = true;
  const SimResult res = run(spec, cfg);
  const double expected[] = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.625, 0.75, 0.625};
  REQUIRE(res.waiting_samples.size() >= 9);
  for (int i = 0; i < 9; ++i) CHECK(res.waiting_samples[i] == expected[i]);
}

TEST_CASE("deterministic exhaustive trace: arrivals during the visit are served") {
  const SystemSpec spec = single_queue(Deterministic{0.625}, Deterministic{0.5},
                                       Discipline::exhaustive(), Deterministic{0.25});
  SimConfig cfg;
  cfg.replications = 1;
  cfg.cycles_per_replication = 12;
  cfg.warmup_cycles = 0;
  cfg.collect_waiting_samples = true;
  const SimResult res = run(spec, cfg);
  // Every cycle a service completes exactly at the next arrival epoch; the
  // visit ends first (server events precede arrivals at equal timestamps),
  // so that customer waits for the next cycle. Periodic waits result.
  const double expected[] = {0.125, 0.25, 0.125, 0.25, 0.125, 0.25, 0.125, 0.25};
  REQUIRE(res.waiting_samples.size() >= 8);
  for (int i = 0; i < 8; ++i) CHECK(res.waiting_samples[i] == expected[i]);
}

TEST_CASE("longest-queue policy: ties to the lowest index, self-transitions allowed") {
  SystemSpec spec;
  spec.visit_order = VisitOrder::LongestQueue;
  spec.queues.push_back({Deterministic{3.0}, Deterministic{0.2}, Discipline::exhaustive()});
  spec.queues.push_back({Deterministic{3.1}, Deterministic{0.2}, Discipline::exhaustive()});
  spec.queues.push_back({Deterministic{2.9}, Deterministic{0.2}, Discipline::exhaustive()});
  for (int i = 0; i < 3; ++i) spec.switchovers.push_back(Deterministic{0.5});

  SimConfig cfg;
  cfg.replications = 1;
  cfg.cycles_per_replication = 4;
  cfg.warmup_cycles = 0;
  const SimResult res = run(spec, cfg);
  // Hand trace over the 12 visits: the server self-loops on the empty Q1
  // until t = 3.0, then jumps straight to Q3 (the only nonempty queue),
  // serving its 2.9 arrival at t = 3.5 (wait 0.6). The (1,1,0) tie that
  // follows goes to Q1 (wait 1.2), then Q2 (wait 1.8), and the final (1,0,1)
  // tie again picks Q1 (wait 6.1 - 6.0 = 0.1).
  CHECK(res.waiting_by_queue[2].count == 1);
  CHECK(res.waiting_by_queue[2].mean == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(res.waiting_by_queue[0].count == 2);
  CHECK(res.waiting_by_queue[0].mean == doctest::Approx(0.65).epsilon(1e-9));
  CHECK(res.waiting_by_queue[1].count == 1);
  CHECK(res.waiting_by_queue[1].mean == doctest::Approx(1.8).epsilon(1e-9));
}

TEST_CASE("cyclic order on the same deterministic system for contrast") {
  SystemSpec spec;
  spec.queues.push_back({Deterministic{3.0}, Deterministic{0.2}, Discipline::exhaustive()});
  spec.queues.push_back({Deterministic{3.1}, Deterministic{0.2}, Discipline::exhaustive()});
  spec.queues.push_back({Deterministic{2.9}, Deterministic{0.2}, Discipline::exhaustive()});
  for (int i = 0; i < 3; ++i) spec.switchovers.push_back(Deterministic{0.5});

  SimConfig cfg;
  cfg.replications = 1;
  cfg.cycles_per_replication = 4;
  cfg.warmup_cycles = 0;
  const SimResult res = run(spec, cfg);
  // The arrival at exactly t = 3.0 is not visible to the Q1 poll at 3.0.
  CHECK(res.waiting_by_queue[0].count == 1);
  CHECK(res.waiting_by_queue[0].mean == doctest::Approx(1.9).epsilon(1e-9));
  CHECK(res.waiting_by_queue[1].count == 1);
  CHECK(res.waiting_by_queue[1].mean == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(res.waiting_by_queue[2].count == 2);
  CHECK(res.waiting_by_queue[2].mean == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("1-limited serves at most one customer per visit") {
  SystemSpec spec;
  spec.queues.push_back({Exponential{0.9}, Exponential{4.0}, Discipline::exhaustive()});
  spec.queues.push_back({Exponential{0.3}, Exponential{4.0}, Discipline::k_limited(1)});
  spec.switchovers.push_back(Deterministic{0.3});
  spec.switchovers.push_back(Deterministic{0.3});
  SimConfig cfg;
  cfg.replications = 4;
  cfg.cycles_per_replication = 5000;
  cfg.warmup_cycles = 100;
  const SimResult res = run(spec, cfg);
  for (const auto& rep : res.per_replication) CHECK(rep.max_served_per_visit[1] <= 1);
  CHECK(res.waiting_by_queue[1].count > 0);
}

TEST_CASE("waits recorded equal services completed after warmup") {
  SystemSpec spec;
  spec.queues.push_back({Exponential{0.8}, Exponential{4.0}, Discipline::gated()});
  spec.queues.push_back({Exponential{0.5}, Exponential{2.0}, Discipline::exhaustive()});
  spec.queues.push_back({Exponential{0.2}, Exponential{1.0}, Discipline::k_limited(2)});
  for (int i = 0; i < 3; ++i) spec.switchovers.push_back(Deterministic{0.5});
  SimConfig cfg;
  cfg.replications = 3;
  cfg.cycles_per_replication = 3000;
  cfg.warmup_cycles = 50;
  const SimResult res = run(spec, cfg);
  for (const auto& rep : res.per_replication) {
    for (int q = 0; q < 3; ++q) {
      CHECK(rep.waiting[q].count == rep.services_completed[q]);
      CHECK(rep.waiting[q].count > 0);
    }
    CHECK(rep.max_served_per_visit[2] <= 2);
  }
}

TEST_CASE("identical config gives bit-identical results, whatever the thread count") {
  const SystemSpec spec = symmetric3(1.0);
  SimConfig cfg;
  cfg.master_seed = 77;
  cfg.replications = 6;
  cfg.cycles_per_replication = 500;
  cfg.warmup_cycles = 50;
  cfg.collect_waiting_samples = true;
  const SimResult a = run(spec, cfg);
  const SimResult b = run(spec, cfg);
  cfg.threads = 3;
  const SimResult c = run(spec, cfg);
  CHECK(a.polling_length.mean == b.polling_length.mean);
  CHECK(a.polling_length.scv == b.polling_length.scv);
  CHECK(a.waiting_by_queue[0].mean == b.waiting_by_queue[0].mean);
  CHECK(a.polling_length.mean == c.polling_length.mean);
  CHECK(a.polling_length.scv == c.polling_length.scv);
  CHECK(a.waiting_samples == c.waiting_samples);
}

TEST_CASE("scaled polling scv is identical to the raw scv") {
  const SystemSpec spec = symmetric3(10.0);
  SimConfig cfg;
  cfg.replications = 4;
  cfg.cycles_per_replication = 400;
  cfg.warmup_cycles = 40;
  const SimResult res = run(spec, cfg);
  CHECK(res.polling_length_scaled.scv == res.polling_length.scv);
  CHECK(res.polling_length_scaled.mean ==
        doctest::Approx(res.polling_length.mean / 30.0).epsilon(1e-15));
}

TEST_CASE("simulated Table-1 reference cell: scv near 0.259 at unit switch-overs") {
  const SystemSpec spec = symmetric3(1.0);
  SimConfig cfg;
  cfg.master_seed = 5150;
  cfg.replications = 20;
  cfg.cycles_per_replication = 4000;
  cfg.warmup_cycles = 200;
  const SimResult res = run(spec, cfg);
  const double analytic = polling_moments(spec).scv_at_q1;  // 0.259259...
  CHECK(analytic == doctest::Approx(0.259259).epsilon(1e-4));
  CHECK(std::abs(res.polling_length.scv - analytic) <=
        std::max(3.0 * res.polling_length.scv_ci_half_width, 0.01));
}

TEST_CASE("simulation agrees with the moment recursion on randomized systems") {
  RngStream pick(31337, 0, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + static_cast<int>(pick.uniform() * 2.0);  // 2 or 3 queues
    SystemSpec spec;
    double rho = 0.0;
    for (int i = 0; i < n; ++i) {
      const double lambda = 0.2 + 0.3 * pick.uniform();
      const double eb = 0.2 + 0.4 * pick.uniform();
      QueueSpec q;
      q.interarrival = Exponential{lambda};
      q.service = Exponential{1.0 / eb};
      q.discipline = pick.uniform() < 0.5 ? Discipline::exhaustive() : Discipline::gated();
      spec.queues.push_back(q);
      rho += lambda * eb;
      spec.switchovers.push_back(Deterministic{0.5 + 1.5 * pick.uniform()});
    }
    if (rho >= 0.85) {  // rescale services to keep comfortably stable
      for (auto& q : spec.queues) {
        const double rate = std::get<Exponential>(q.service).rate;
        q.service = Exponential{rate * rho / 0.7};
      }
    }

    const MomentSolution analytic = polling_moments(spec);
    SimConfig cfg;
    cfg.master_seed = 400 + trial;
    cfg.replications = 12;
    cfg.cycles_per_replication = 6000;
    cfg.warmup_cycles = 300;
    const SimResult res = run(spec, cfg);

    CHECK(std::abs(res.polling_length.mean - analytic.mean(0)) <=
          std::max(res.polling_length.mean_ci_half_width * 1.2, 1e-3));
    CHECK(std::abs(res.polling_length.scv - analytic.scv_at_q1) <=
          std::max(res.polling_length.scv_ci_half_width * 1.2, 1e-3));
  }
}

TEST_CASE("invalid simulation configs are rejected") {
  const SystemSpec spec = symmetric3(1.0);
  SimConfig cfg;
  cfg.replications = 0;
  CHECK_THROWS_AS(run(spec, cfg), SpecError);
  cfg.replications = 2;
  cfg.cycles_per_replication = 10;
  cfg.warmup_cycles = 10;
  CHECK_THROWS_AS(run(spec, cfg), SpecError);
  cfg.warmup_cycles = 0;
  cfg.record_queue = 5;
  CHECK_THROWS_AS(run(spec, cfg), SpecError);
}
