#include "polling/branching.hpp"

#include <cmath>

#include "polling/errors.hpp"
#include "polling/transforms.hpp"

namespace polling {

namespace {

void require_branching(const SystemSpec& spec, int queue) {
  if (queue < 0 || queue >= spec.queue_count()) throw SpecError("queue index out of range");
  if (!spec.queues[queue].discipline.is_branching())
    throw SpecError("k-limited service is not branching-type");
}

void require_poisson(const SystemSpec& spec) {
  for (const auto& q : spec.queues)
    if (!is_exponential(q.interarrival))
      throw SpecError("branching analytics require Poisson arrivals");
}

void require_branching_system(const SystemSpec& spec) {
  validate(spec);
  require_poisson(spec);
  for (int i = 0; i < spec.queue_count(); ++i) require_branching(spec, i);
  if (spec.visit_order != VisitOrder::Cyclic)
    throw SpecError("moment recursion requires cyclic visit order");
}

Eigen::VectorXd arrival_rates(const SystemSpec& spec) {
  Eigen::VectorXd lambda(spec.queue_count());
  for (int i = 0; i < spec.queue_count(); ++i) lambda(i) = spec.arrival_rate(i);
  return lambda;
}

}  // namespace

Eigen::MatrixXd OffspringMoments::covariance() const {
  // Cov(xi_j, xi_k) from PGF derivatives: h_jk + delta_jk m_j - m_j m_k.
  Eigen::MatrixXd c = second_deriv - mean * mean.transpose();
  c.diagonal() += mean;
  return c;
}

double exhaustiveness(const SystemSpec& spec, int queue) {
  require_branching(spec, queue);
  switch (spec.queues[queue].discipline.kind) {
    case Discipline::Kind::Exhaustive:
      return 1.0;
    case Discipline::Kind::Gated:
      return 1.0 - spec.load(queue);
    default:
      throw SpecError("k-limited service is not branching-type");
  }
}

OffspringMoments offspring_moments(const SystemSpec& spec, int queue) {
  require_branching(spec, queue);
  require_poisson(spec);
  const Eigen::VectorXd lambda = arrival_rates(spec);

  OffspringMoments out;
  if (spec.queues[queue].discipline.kind == Discipline::Kind::Gated) {
    // Offspring = arrivals during one service time.
    const double eb = mean(spec.queues[queue].service);
    const double eb2 = second_moment(spec.queues[queue].service);
    out.mean = lambda * eb;
    out.second_deriv = lambda * lambda.transpose() * eb2;
  } else {
    // Offspring = arrivals at the other queues during one busy period.
    const BusyPeriodMoments bp =
        busy_period_moments(lambda(queue), spec.queues[queue].service);
    Eigen::VectorXd masked = lambda;
    masked(queue) = 0.0;
    out.mean = masked * bp.mean;
    out.second_deriv = masked * masked.transpose() * bp.second_moment;
  }
  return out;
}

namespace {

struct CycleMaps {
  // Visit map at queue i: mean <- M_i mean, cov <- M_i cov M_i^T + mean_i C_i.
  std::vector<Eigen::MatrixXd> visit_matrix;
  std::vector<Eigen::MatrixXd> offspring_cov;
  // Switch-over map after queue i: mean <- mean + imm_mean_i,
  // cov <- cov + imm_cov_i (compound-Poisson over the switch-over time).
  std::vector<Eigen::VectorXd> immigration_mean;
  std::vector<Eigen::MatrixXd> immigration_cov;
};

CycleMaps build_cycle_maps(const SystemSpec& spec) {
  const int n = spec.queue_count();
  const Eigen::VectorXd lambda = arrival_rates(spec);
  CycleMaps maps;
  maps.visit_matrix.reserve(n);
  maps.offspring_cov.reserve(n);
  maps.immigration_mean.reserve(n);
  maps.immigration_cov.reserve(n);
  for (int i = 0; i < n; ++i) {
    const OffspringMoments off = offspring_moments(spec, i);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    m.col(i) = off.mean;
    maps.visit_matrix.push_back(std::move(m));
    maps.offspring_cov.push_back(off.covariance());

    const double es = mean(spec.switchovers[i]);
    const double vs = variance(spec.switchovers[i]);
    maps.immigration_mean.push_back(lambda * es);
    Eigen::MatrixXd ic = vs * lambda * lambda.transpose();
    ic.diagonal() += lambda * es;
    maps.immigration_cov.push_back(std::move(ic));
  }
  return maps;
}

void propagate_cycle(const CycleMaps& maps, StepMoments& s,
                     std::vector<StepMoments>* record = nullptr) {
  const int n = static_cast<int>(maps.visit_matrix.size());
  for (int i = 0; i < n; ++i) {
    if (record) (*record)[i] = s;
    const Eigen::MatrixXd& m = maps.visit_matrix[i];
    s.covariance = m * s.covariance * m.transpose() + s.mean(i) * maps.offspring_cov[i];
    s.covariance = 0.5 * (s.covariance + s.covariance.transpose()).eval();
    s.mean = m * s.mean;
    s.mean += maps.immigration_mean[i];
    s.covariance += maps.immigration_cov[i];
  }
}

}  // namespace

MomentSolution polling_moments(const SystemSpec& spec, const std::optional<StepMoments>& start) {
  require_branching_system(spec);
  const int n = spec.queue_count();
  const CycleMaps maps = build_cycle_maps(spec);

  StepMoments s;
  if (start) {
    s = *start;
  } else {
    s.mean = Eigen::VectorXd::Zero(n);
    s.covariance = Eigen::MatrixXd::Zero(n, n);
  }

  constexpr long kMaxCycles = 1000000;
  constexpr double kTol = 1e-12;
  long it = 0;
  for (; it < kMaxCycles; ++it) {
    const Eigen::VectorXd prev_mean = s.mean;
    const Eigen::MatrixXd prev_cov = s.covariance;
    propagate_cycle(maps, s);
    const double delta = std::max((s.mean - prev_mean).cwiseAbs().maxCoeff(),
                                  (s.covariance - prev_cov).cwiseAbs().maxCoeff());
    if (delta < kTol) break;
  }
  if (it == kMaxCycles)
    throw NumericalError("polling-moment fixed point did not converge");

  MomentSolution out;
  out.mean = s.mean;
  out.covariance = s.covariance;
  out.iterations = it + 1;
  out.scv_at_q1 = s.mean(0) != 0.0 ? s.covariance(0, 0) / (s.mean(0) * s.mean(0)) : 0.0;
  return out;
}

std::vector<StepMoments> visit_start_moments(const SystemSpec& spec) {
  const MomentSolution fixed = polling_moments(spec);
  const CycleMaps maps = build_cycle_maps(spec);
  std::vector<StepMoments> per_queue(spec.queue_count());
  StepMoments s{fixed.mean, fixed.covariance};
  propagate_cycle(maps, s, &per_queue);
  return per_queue;
}

double LimitLaw::scv() const {
  const double lo = support_low, hi = support_high;
  const double sum = lo + hi;
  if (sum == 0.0) return 0.0;
  return (hi - lo) * (hi - lo) / (3.0 * sum * sum);
}

double LimitLaw::cdf(double x) const {
  const double a = scale * support_low;
  const double b = scale * support_high;
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  return (x - a) / (b - a);
}

LimitLaw limit_law(const SystemSpec& spec, int queue) {
  require_branching(spec, queue);
  const DerivedLoads loads = derived_loads(spec);
  for (const auto& s : spec.switchovers)
    if (!is_deterministic(s))
      throw SpecError("the switch-over limit law assumes deterministic switch-over times");
  if (!(loads.mean_total_switchover > 0.0))
    throw SpecError("asymptotic scaling needs E[S] > 0");

  const double phi = exhaustiveness(spec, queue);
  LimitLaw law;
  law.scale = (1.0 - loads.load_per_queue[queue]) / (1.0 - loads.total_load);
  law.support_low = (1.0 - phi) / phi;
  law.support_high = 1.0 / phi;
  return law;
}

namespace {

SystemSpec scale_switchovers(const SystemSpec& spec, double factor) {
  SystemSpec scaled = spec;
  for (auto& s : scaled.switchovers) {
    if (!is_deterministic(s))
      throw SpecError("switch-over scaling assumes deterministic switch-over times");
    s = Deterministic{std::get<Deterministic>(s).value * factor};
  }
  return scaled;
}

}  // namespace

std::vector<double> scv_under_switchover_scaling(const SystemSpec& spec,
                                                 const std::vector<double>& multipliers) {
  std::vector<double> out;
  out.reserve(multipliers.size());
  for (double m : multipliers) {
    if (!(m > 0.0)) throw SpecError("switch-over multiplier must be positive");
    out.push_back(polling_moments(scale_switchovers(spec, m)).scv_at_q1);
  }
  return out;
}

double eval_f1(const SystemSpec& spec, const Eigen::VectorXd& z, int depth) {
  require_branching_system(spec);
  const int n = spec.queue_count();
  if (z.size() != n) throw SpecError("evaluation point has wrong dimension");
  for (int i = 0; i < n; ++i)
    if (z(i) < 0.0 || z(i) > 1.0) throw SpecError("evaluation point must lie in [0,1]^N");
  if (depth < 0) throw SpecError("truncation depth must be nonnegative");

  const Eigen::VectorXd lambda = arrival_rates(spec);
  auto offspring_value = [&](int i, const Eigen::VectorXd& w) -> double {
    if (spec.queues[i].discipline.kind == Discipline::Kind::Gated) {
      double u = 0.0;
      for (int j = 0; j < n; ++j) u += lambda(j) * (1.0 - w(j));
      return lst(spec.queues[i].service, u).real();
    }
    double u = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) u += lambda(j) * (1.0 - w(j));
    return busy_period_lst(u, lambda(i), spec.queues[i].service).real();
  };

  // F_1(z) = sigma_N(u(z)) F_N(T_N z), F_i(y) = sigma_{i-1}(u(y)) F_{i-1}(T_{i-1} y):
  // peel one sigma factor per visit, walking i = N..1, then recurse on the
  // transformed argument; the argument contracts to 1 where F_1 = 1.
  Eigen::VectorXd w = z;
  double value = 1.0;
  for (int cycle = 0; cycle < depth; ++cycle) {
    for (int i = n - 1; i >= 0; --i) {
      double u = 0.0;
      for (int j = 0; j < n; ++j) u += lambda(j) * (1.0 - w(j));
      value *= lst(spec.switchovers[i], u).real();
      w(i) = offspring_value(i, w);
    }
  }
  return value;
}

}  // namespace polling
