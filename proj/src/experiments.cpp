#include "polling/experiments.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "polling/branching.hpp"
#include "polling/errors.hpp"
#include "polling/fit.hpp"
#include "polling/rng.hpp"
#include "polling/simulate.hpp"

namespace polling {

using nlohmann::json;

SystemSpec symmetric_system(double scv_arrival, double switchover, VisitOrder order) {
  SystemSpec spec;
  spec.visit_order = order;
  for (int i = 0; i < 3; ++i) {
    QueueSpec q;
    q.interarrival = fit_phase_type(1.0, scv_arrival);
    q.service = Exponential{4.0};  // mean 0.25
    q.discipline = Discipline::exhaustive();
    spec.queues.push_back(std::move(q));
    spec.switchovers.push_back(Deterministic{switchover});
  }
  return spec;
}

SystemSpec imbalanced_system(double rho, double scv_arrival, double imbalance_arrival,
                             double imbalance_service, double switchover) {
  ImbalanceParams p;
  p.queue_count = 3;
  p.rho = rho;
  p.imbalance_arrival = imbalance_arrival;
  p.imbalance_service = imbalance_service;
  p.scv_arrival = scv_arrival;
  const ImbalancedRates rates = rates_from_imbalance(p);

  SystemSpec spec;
  for (int i = 0; i < p.queue_count; ++i) {
    QueueSpec q;
    q.interarrival = fit_phase_type(1.0 / rates.arrival_rate[i], scv_arrival);
    q.service = Exponential{1.0 / rates.mean_service[i]};
    q.discipline = Discipline::exhaustive();
    spec.queues.push_back(std::move(q));
    spec.switchovers.push_back(Deterministic{switchover});
  }
  return spec;
}

TwoQueueSpec reference_twoqueue(Discipline::Kind q1_kind) {
  TwoQueueSpec spec;
  spec.q1.interarrival = Exponential{0.3};
  spec.q1.service = Exponential{1.0};
  spec.q1.discipline = {q1_kind, 0};
  spec.q2.interarrival = Exponential{0.2};
  spec.q2.service = Exponential{1.0};
  spec.q2.discipline = Discipline::k_limited(1);
  spec.switchover1 = Deterministic{1.0};
  spec.switchover2 = Deterministic{1.0};
  return spec;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string fmt3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

std::string fmt_int(long long v) { return std::to_string(v); }
std::string fmt_seed(std::uint64_t v) { return std::to_string(v); }

std::uint64_t cell_seed(std::uint64_t master, std::uint64_t row, std::uint64_t col) {
  return RngStream::derive_seed(master, row, col);
}

/// Long-switch-over cells run ten times fewer (much longer) cycles.
SimConfig table_cell_config(const SimConfig& base, double switchover, std::uint64_t seed) {
  SimConfig cfg = base;
  cfg.master_seed = seed;
  if (switchover >= 100.0) {
    cfg.cycles_per_replication = std::max<long>(cfg.warmup_cycles / 10 + 1,
                                                cfg.cycles_per_replication / 10);
    cfg.warmup_cycles /= 10;
  }
  return cfg;
}

std::vector<double> doubles_or(const json& params, const char* key,
                               std::vector<double> fallback) {
  if (!params.contains(key)) return fallback;
  return params.at(key).get<std::vector<double>>();
}

ExperimentResult run_table13(const ExperimentConfig& cfg, const json& params,
                             VisitOrder order) {
  const std::vector<double> s_values = doubles_or(params, "switchover_values", {1, 10, 100});
  const std::vector<double> c_values = doubles_or(params, "scv_values", {0.25, 0.5, 1, 2});
  const bool analytic_poisson = order == VisitOrder::Cyclic;
  const char* name = order == VisitOrder::Cyclic ? "table1" : "table3";

  ExperimentResult out;
  out.header = {"experiment", "visit_order", "s_i",      "c2_arrival",
                "metric",     "method",      "estimate", "ci_half_width",
                "seed"};
  std::ostringstream pretty;
  pretty << (order == VisitOrder::Cyclic ? "Cyclic" : "Longest queue")
         << ": scv of N_1 at polling instants of Q_1\n        ";
  for (double c : c_values) pretty << "c2=" << c << "\t";
  pretty << "\n";

  for (std::size_t si = 0; si < s_values.size(); ++si) {
    const double s = s_values[si];
    pretty << "S_i=" << s << "\t";
    for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
      const double c = c_values[ci];
      const SystemSpec spec = symmetric_system(c, s, order);
      std::string method, estimate, half_width;
      if (analytic_poisson && c == 1.0) {
        const MomentSolution sol = polling_moments(spec);
        method = "analytic";
        estimate = fmt(sol.scv_at_q1);
        pretty << fmt3(sol.scv_at_q1) << "*\t";
      } else {
        const SimConfig cell =
            table_cell_config(cfg.sim, s, cell_seed(cfg.sim.master_seed, si, ci));
        const SimResult res = run(spec, cell);
        method = "simulated";
        estimate = fmt(res.polling_length.scv);
        half_width = fmt(res.polling_length.scv_ci_half_width);
        pretty << fmt3(res.polling_length.scv) << "\t";
      }
      out.rows.push_back({name, order == VisitOrder::Cyclic ? "cyclic" : "longest-queue",
                          fmt(s), fmt(c), "c2_polling_q1", method, estimate, half_width,
                          fmt_seed(cfg.sim.master_seed)});
    }
    pretty << "\n";
  }
  if (analytic_poisson) pretty << "(* analytic)\n";
  out.pretty = pretty.str();
  return out;
}

ExperimentResult run_table2(const ExperimentConfig& cfg, const json& params) {
  const std::vector<double> c_values = doubles_or(params, "scv_values", {0.25, 1, 2});
  const double rho = params.value("rho", 0.75);
  const double s = params.value("switchover", 100.0);
  std::vector<std::pair<double, double>> combos = {{1, 1}, {1, 3}, {3, 1}, {3, 3}};
  if (params.contains("imbalance")) {
    combos.clear();
    for (const auto& pair : params.at("imbalance"))
      combos.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  }

  ExperimentResult out;
  out.header = {"experiment", "c2_arrival", "imbalance_arrival", "imbalance_service",
                "metric",     "method",     "estimate",          "ci_half_width",
                "seed"};
  std::ostringstream pretty;
  pretty << "Cyclic, rho=" << rho << ", S_i=" << s << "\n"
         << "c2_A\tI_A\tI_B\tc2_W1\tc2_P\n";

  std::uint64_t row_id = 0;
  for (double c : c_values) {
    for (const auto& [ia, ib] : combos) {
      const SystemSpec spec = imbalanced_system(rho, c, ia, ib, s);
      const SimConfig cell = table_cell_config(cfg.sim, s, cell_seed(cfg.sim.master_seed, 17, row_id));
      ++row_id;
      const SimResult res = run(spec, cell);

      const std::string seed_s = fmt_seed(cfg.sim.master_seed);
      out.rows.push_back({"table2", fmt(c), fmt(ia), fmt(ib), "c2_wait_q1", "simulated",
                          fmt(res.waiting_by_queue[0].scv),
                          fmt(res.waiting_by_queue[0].scv_ci_half_width), seed_s});
      std::string polling, polling_note;
      if (c == 1.0) {
        const MomentSolution sol = polling_moments(spec);
        polling = fmt(sol.scv_at_q1);
        polling_note = fmt3(sol.scv_at_q1) + "*";
        out.rows.push_back({"table2", fmt(c), fmt(ia), fmt(ib), "c2_polling_q1", "analytic",
                            polling, "", seed_s});
      } else {
        polling = fmt(res.polling_length.scv);
        polling_note = fmt3(res.polling_length.scv);
        out.rows.push_back({"table2", fmt(c), fmt(ia), fmt(ib), "c2_polling_q1", "simulated",
                            polling, fmt(res.polling_length.scv_ci_half_width), seed_s});
      }
      pretty << c << "\t" << ia << "\t" << ib << "\t" << fmt3(res.waiting_by_queue[0].scv)
             << "\t" << polling_note << "\n";
    }
  }
  pretty << "(* analytic)\n";
  out.pretty = pretty.str();
  return out;
}

ExperimentResult run_limit_sweep(const ExperimentConfig& cfg, const json& params) {
  const std::vector<double> multipliers =
      doubles_or(params, "multipliers", {1, 10, 100, 1000});
  const double c2 = params.value("scv_arrival", 1.0);
  const double base_s = params.value("base_switchover", 1.0);
  for (double m : multipliers)
    if (!(m > 0.0)) throw SpecError("switch-over multiplier must be positive");

  ExperimentResult out;
  out.header = {"experiment",     "s_multiplier", "c2_arrival",   "ks_distance",
                "mean_w_over_s",  "limit_mean",   "scv_polling",  "scv_polling_times_s",
                "seed"};
  std::ostringstream pretty;
  pretty << "Switch-over sweep, c2_A=" << c2 << "\n"
         << "mult\tKS\tE[W/S]\tlimit\tc2_P\tc2_P*S\n";

  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    const double m = multipliers[i];
    const SystemSpec spec = symmetric_system(c2, base_s * m, VisitOrder::Cyclic);
    const LimitLaw law = limit_law(spec, 0);
    const double total_s = 3.0 * base_s * m;

    SimConfig sim = cfg.sim;
    sim.master_seed = cell_seed(cfg.sim.master_seed, 29, i);
    sim.collect_waiting_samples = true;
    if (params.contains("cycles_at_multiplier")) {
      sim.cycles_per_replication = params.at("cycles_at_multiplier").get<long>();
    } else {
      sim.cycles_per_replication =
          std::max<long>(60, static_cast<long>(cfg.sim.cycles_per_replication / m));
    }
    sim.warmup_cycles = std::max<long>(5, sim.cycles_per_replication / 10);

    const SimResult res = run(spec, sim);
    std::vector<double> scaled = res.waiting_samples;
    for (double& w : scaled) w /= total_s;
    const double ks = ks_statistic(scaled, [&law](double x) { return law.cdf(x); });
    double mean_scaled = 0.0;
    for (double w : scaled) mean_scaled += w;
    if (!scaled.empty()) mean_scaled /= static_cast<double>(scaled.size());
    const double scv_p = res.polling_length.scv;

    out.rows.push_back({"limit-sweep", fmt(m), fmt(c2), fmt(ks), fmt(mean_scaled),
                        fmt(law.mean()), fmt(scv_p), fmt(scv_p * total_s),
                        fmt_seed(cfg.sim.master_seed)});
    pretty << m << "\t" << fmt3(ks) << "\t" << fmt3(mean_scaled) << "\t" << fmt3(law.mean())
           << "\t" << fmt(scv_p) << "\t" << fmt3(scv_p * total_s) << "\n";
  }
  out.pretty = pretty.str();
  return out;
}

TwoQueueSpec twoqueue_from(const ExperimentConfig& cfg, Discipline::Kind default_q1) {
  if (!cfg.system) return reference_twoqueue(default_q1);
  const SystemSpec& sys = *cfg.system;
  if (sys.queue_count() != 2) throw SpecError("two-queue experiment needs exactly 2 queues");
  TwoQueueSpec spec;
  spec.q1 = sys.queues[0];
  spec.q2 = sys.queues[1];
  spec.switchover1 = sys.switchovers[0];
  spec.switchover2 = sys.switchovers[1];
  return spec;
}

ExperimentResult run_pcl_check(const ExperimentConfig& cfg, const json&) {
  const TwoQueueSpec spec = twoqueue_from(cfg, Discipline::Kind::Gated);
  const SimResult res = run(spec.to_system(), cfg.sim);
  const PclReport rep =
      pcl_g1l(spec, res.waiting_by_queue[0].mean, res.waiting_by_queue[1].mean);

  ExperimentResult out;
  out.header = {"experiment", "lambda1", "lambda2", "mean_w1", "mean_w2",
                "lhs",        "rhs",     "relative_gap", "cycles", "seed"};
  out.rows.push_back({"pcl-check", fmt(spec.lambda1()), fmt(spec.lambda2()),
                      fmt(res.waiting_by_queue[0].mean), fmt(res.waiting_by_queue[1].mean),
                      fmt(rep.lhs), fmt(rep.rhs), fmt(rep.relative_gap),
                      fmt_int(res.total_measured_cycles),
                      fmt_seed(cfg.sim.master_seed)});
  std::ostringstream pretty;
  pretty << "Pseudo-conservation check (gated + 1-limited)\n"
         << "  E[W_1] = " << res.waiting_by_queue[0].mean << " +- "
         << res.waiting_by_queue[0].mean_ci_half_width << "\n"
         << "  E[W_2] = " << res.waiting_by_queue[1].mean << " +- "
         << res.waiting_by_queue[1].mean_ci_half_width << "\n"
         << "  lhs = " << rep.lhs << ", rhs = " << rep.rhs
         << ", relative gap = " << rep.relative_gap << "\n";
  out.pretty = pretty.str();
  return out;
}

ExperimentResult run_e1l_eval(const ExperimentConfig& cfg, const json& params) {
  const TwoQueueSpec spec = twoqueue_from(cfg, Discipline::Kind::Exhaustive);
  const E1LTransform f1(spec);
  const int grid = params.value("grid", 20);
  if (grid < 2) throw SpecError("e1l grid needs at least 2 points per axis");

  ExperimentResult out;
  out.header = {"experiment", "z1", "z2", "f1", "seed"};
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double z1 = static_cast<double>(i) / (grid - 1);
      const double z2 = static_cast<double>(j) / (grid - 1);
      out.rows.push_back({"e1l-eval", fmt(z1), fmt(z2), fmt(f1.evaluate_real(z1, z2)),
                          fmt_seed(cfg.sim.master_seed)});
    }
  }
  std::ostringstream pretty;
  pretty << "E/1-L joint PGF at Q_1 polling instants\n"
         << "  normalization constant C = " << f1.constant()
         << " (numeric limit " << f1.constant_numeric_limit() << ")\n"
         << "  F_1(1,1) = " << f1.evaluate_real(1.0, 1.0) << "\n"
         << "  " << grid << "x" << grid << " grid written\n";
  out.pretty = pretty.str();
  return out;
}

ExperimentResult run_g1l_residual(const ExperimentConfig& cfg, const json& params) {
  const TwoQueueSpec spec = twoqueue_from(cfg, Discipline::Kind::Gated);

  SimConfig sim = cfg.sim;
  sim.collect_polling_vectors = true;
  const SimResult res = run(spec.to_system(), sim);
  std::vector<long long> rep_instants;
  rep_instants.reserve(res.per_replication.size());
  for (const auto& r : res.per_replication) rep_instants.push_back(r.polling_instants);
  const EmpiricalPgf pgf(res.polling_vectors, 2, rep_instants);

  const PgfEvaluator f1 = [&pgf](Complex a, Complex b) { return pgf(a, b); };
  const PgfEvaluator h1 = spec.q1.discipline.kind == Discipline::Kind::Gated
                              ? gated_offspring_pgf(spec)
                              : PgfEvaluator([g = busy_period_g(spec)](Complex, Complex b) {
                                  return g.value(b);
                                });

  std::vector<std::pair<double, double>> points = {{0.25, 0.25}, {0.5, 0.5},  {0.75, 0.75},
                                                   {0.25, 0.75}, {0.75, 0.25}, {1.0, 1.0}};
  if (params.contains("points")) {
    points.clear();
    for (const auto& p : params.at("points"))
      points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }

  ExperimentResult out;
  out.header = {"experiment", "z1", "z2", "residual", "pgf_std_error", "samples", "seed"};
  std::ostringstream pretty;
  pretty << "G/1-L functional-equation residuals from " << pgf.sample_count()
         << " polling instants\n"
         << "z1\tz2\tresidual\tpgf SE\n";
  for (const auto& [z1, z2] : points) {
    const double r = functional_equation_residual(spec, f1, h1, Complex{z1, 0.0},
                                                  Complex{z2, 0.0});
    const double se = pgf.at(z1, z2).ci_half_width;
    out.rows.push_back({"g1l-residual", fmt(z1), fmt(z2), fmt(r), fmt(se),
                        fmt_int(pgf.sample_count()),
                        fmt_seed(cfg.sim.master_seed)});
    pretty << z1 << "\t" << z2 << "\t" << fmt(r) << "\t" << fmt(se) << "\n";
  }
  out.pretty = pretty.str();
  return out;
}

ExperimentResult run_custom(const ExperimentConfig& cfg, const json&) {
  if (!cfg.system) throw SpecError("custom experiment needs a \"system\" block");
  const SimResult res = run(*cfg.system, cfg.sim);

  ExperimentResult out;
  out.header = {"experiment", "queue", "metric", "estimate", "ci_half_width", "count", "seed"};
  const std::string seed_s = fmt_seed(cfg.sim.master_seed);
  std::ostringstream pretty;
  pretty << "Custom simulation (" << res.total_measured_cycles << " measured cycles)\n";
  for (std::size_t q = 0; q < res.waiting_by_queue.size(); ++q) {
    const SummaryStat& w = res.waiting_by_queue[q];
    out.rows.push_back({"custom", fmt_int(static_cast<long long>(q) + 1), "mean_wait", fmt(w.mean),
                        fmt(w.mean_ci_half_width), fmt_int(w.count), seed_s});
    out.rows.push_back({"custom", fmt_int(static_cast<long long>(q) + 1), "scv_wait", fmt(w.scv),
                        fmt(w.scv_ci_half_width), fmt_int(w.count), seed_s});
    pretty << "  Q" << (q + 1) << ": E[W] = " << w.mean << " +- " << w.mean_ci_half_width
           << ", c2_W = " << w.scv << "\n";
  }
  const SummaryStat& p = res.polling_length;
  const int rq = cfg.sim.record_queue + 1;
  out.rows.push_back({"custom", fmt_int(rq), "mean_polling_length",
                      fmt(p.mean), fmt(p.mean_ci_half_width),
                      fmt_int(p.count), seed_s});
  out.rows.push_back({"custom", fmt_int(rq), "scv_polling_length",
                      fmt(p.scv), fmt(p.scv_ci_half_width), fmt_int(p.count),
                      seed_s});
  pretty << "  Q" << rq << " polling length: mean " << p.mean << ", scv " << p.scv << "\n";
  out.pretty = pretty.str();
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const json& params) {
  if (cfg.kind == "table1") return run_table13(cfg, params, VisitOrder::Cyclic);
  if (cfg.kind == "table3") return run_table13(cfg, params, VisitOrder::LongestQueue);
  if (cfg.kind == "table2") return run_table2(cfg, params);
  if (cfg.kind == "limit-sweep") return run_limit_sweep(cfg, params);
  if (cfg.kind == "pcl-check") return run_pcl_check(cfg, params);
  if (cfg.kind == "e1l-eval") return run_e1l_eval(cfg, params);
  if (cfg.kind == "g1l-residual") return run_g1l_residual(cfg, params);
  if (cfg.kind == "custom") return run_custom(cfg, params);
  throw SpecError("unknown experiment kind: " + cfg.kind);
}

void write_result(const ExperimentResult& result, const ExperimentConfig& cfg,
                  std::ostream& out) {
  if (cfg.format == "pretty") {
    out << result.pretty;
    return;
  }
  for (std::size_t i = 0; i < result.header.size(); ++i)
    out << result.header[i] << (i + 1 < result.header.size() ? "," : "\n");
  for (const auto& row : result.rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

}  // namespace polling
