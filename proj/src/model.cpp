#include "polling/model.hpp"

#include <cmath>
#include <sstream>

#include "polling/errors.hpp"

namespace polling {

void validate(const SystemSpec& spec) {
  const int n = spec.queue_count();
  if (n < 1) throw SpecError("system needs at least one queue");
  if (spec.switchovers.size() != spec.queues.size())
    throw SpecError("need exactly one switch-over law per queue");

  double rho = 0.0;
  for (int i = 0; i < n; ++i) {
    const QueueSpec& q = spec.queues[i];
    validate(q.interarrival);
    validate(q.service);
    if (!(mean(q.interarrival) > 0.0))
      throw SpecError("interarrival mean must be positive");
    if (!(mean(q.service) > 0.0)) throw SpecError("service mean must be positive");
    if (q.discipline.kind == Discipline::Kind::KLimited && q.discipline.limit < 1)
      throw SpecError("k-limited discipline needs k >= 1");
    rho += spec.load(i);
  }
  for (const auto& s : spec.switchovers) validate(s);

  if (!(rho < 1.0)) {
    std::ostringstream msg;
    msg << "unstable system: rho = " << rho << " >= 1";
    throw StabilityError(msg.str());
  }

  // A k-limited queue completes at most k services per cycle; its arrivals
  // over a mean cycle E[S]/(1-rho) must fit, which for k = 1 is exactly
  // positivity of the 1 - lambda_i E[S]/(1-rho) coefficient in the
  // pseudo-conservation law.
  double mean_switchover = 0.0;
  for (const auto& s : spec.switchovers) mean_switchover += mean(s);
  for (int i = 0; i < n; ++i) {
    const Discipline& d = spec.queues[i].discipline;
    if (d.kind != Discipline::Kind::KLimited) continue;
    const double per_cycle = spec.arrival_rate(i) * mean_switchover / (1.0 - rho);
    if (!(per_cycle < d.limit)) {
      std::ostringstream msg;
      msg << "unstable k-limited queue " << i << ": lambda*E[S]/(1-rho) = " << per_cycle
          << " >= k = " << d.limit;
      throw StabilityError(msg.str());
    }
  }
}

DerivedLoads derived_loads(const SystemSpec& spec) {
  validate(spec);
  DerivedLoads out;
  out.load_per_queue.reserve(spec.queues.size());
  for (int i = 0; i < spec.queue_count(); ++i) {
    out.load_per_queue.push_back(spec.load(i));
    out.total_load += out.load_per_queue.back();
  }
  for (const auto& s : spec.switchovers) out.mean_total_switchover += mean(s);
  out.mean_cycle = out.mean_total_switchover / (1.0 - out.total_load);
  return out;
}

ImbalancedRates rates_from_imbalance(const ImbalanceParams& p) {
  if (p.queue_count < 1) throw SpecError("imbalance: queue count must be >= 1");
  if (!(p.rho > 0.0 && p.rho < 1.0)) throw SpecError("imbalance: rho must lie in (0,1)");
  if (p.imbalance_arrival < 1.0 || p.imbalance_service < 1.0)
    throw SpecError("imbalance ratios must be >= 1");
  if (!(p.scv_arrival > 0.0)) throw SpecError("imbalance: interarrival scv must be positive");

  const int n = p.queue_count;
  if (n == 1) {
    if (p.imbalance_arrival != 1.0 || p.imbalance_service != 1.0)
      throw SpecError("imbalance: a single queue admits ratio 1 only");
    return {{1.0}, {p.rho}};
  }

  // lambda_i = a - (i-1) d, decreasing, with sum lambda_i / N = 1 and
  // lambda_1 / lambda_N = I_A. Both constraints pin a and d.
  const double ia = p.imbalance_arrival;
  const double a = 2.0 * ia / (ia + 1.0);
  const double d = a * (ia - 1.0) / (ia * (n - 1));

  ImbalancedRates out;
  out.arrival_rate.resize(n);
  for (int i = 0; i < n; ++i) out.arrival_rate[i] = a - i * d;
  if (out.arrival_rate.back() <= 0.0)
    throw SpecError("imbalance: no positive arrival-rate solution");

  // E[B_i] = b * (1 + (i-1)(I_B - 1)/(N-1)), increasing, with the scale b
  // from the load constraint sum lambda_i E[B_i] = rho.
  const double ib = p.imbalance_service;
  double weighted = 0.0;
  std::vector<double> shape(n);
  for (int i = 0; i < n; ++i) {
    shape[i] = 1.0 + i * (ib - 1.0) / (n - 1);
    weighted += out.arrival_rate[i] * shape[i];
  }
  const double b = p.rho / weighted;
  if (!(b > 0.0)) throw SpecError("imbalance: no positive mean-service solution");
  out.mean_service.resize(n);
  for (int i = 0; i < n; ++i) out.mean_service[i] = b * shape[i];
  return out;
}

std::string describe(const SystemSpec& spec) {
  std::ostringstream out;
  out << spec.queue_count() << " queues, "
      << (spec.visit_order == VisitOrder::Cyclic ? "cyclic" : "longest-queue") << " order\n";
  for (int i = 0; i < spec.queue_count(); ++i) {
    const QueueSpec& q = spec.queues[i];
    out << "  Q" << (i + 1) << ": arrivals " << describe(q.interarrival) << ", service "
        << describe(q.service) << ", ";
    switch (q.discipline.kind) {
      case Discipline::Kind::Exhaustive: out << "exhaustive"; break;
      case Discipline::Kind::Gated: out << "gated"; break;
      case Discipline::Kind::KLimited: out << q.discipline.limit << "-limited"; break;
    }
    out << ", switch-over " << describe(spec.switchovers[i]) << "\n";
  }
  return out.str();
}

}  // namespace polling
