#include "polling/twoqueue.hpp"

#include <cmath>

#include "polling/errors.hpp"

namespace polling {

SystemSpec TwoQueueSpec::to_system() const {
  SystemSpec sys;
  sys.queues = {q1, q2};
  sys.switchovers = {switchover1, switchover2};
  sys.visit_order = VisitOrder::Cyclic;
  return sys;
}

void validate(const TwoQueueSpec& spec) {
  if (!is_exponential(spec.q1.interarrival) || !is_exponential(spec.q2.interarrival))
    throw SpecError("two-queue transform analysis requires Poisson arrivals");
  if (spec.q2.discipline.kind != Discipline::Kind::KLimited || spec.q2.discipline.limit != 1)
    throw SpecError("Q2 must receive 1-limited service");
  if (spec.q1.discipline.kind == Discipline::Kind::KLimited)
    throw SpecError("Q1 must be exhaustive or gated");
  validate(spec.to_system());  // rho < 1 and the 1-limited cycle condition
}

GFunction busy_period_g(const TwoQueueSpec& spec) {
  const double lam1 = spec.lambda1();
  const double lam2 = spec.lambda2();
  const DistributionSpec service = spec.q1.service;
  return GFunction{
      [lam1, lam2, service](Complex z2) {
        return busy_period_lst(lam2 * (1.0 - z2), lam1, service);
      },
      [lam1, lam2, service](Complex z2) {
        return -lam2 * busy_period_lst_derivative(lam2 * (1.0 - z2), lam1, service);
      }};
}

// Value plus d/dz2, enough to follow the chain rule through the composed
// transforms without hand-expanding product rules.
struct E1LTransform::Dual {
  Complex v{0.0};
  Complex d{0.0};
  Dual operator+(const Dual& o) const { return {v + o.v, d + o.d}; }
  Dual operator-(const Dual& o) const { return {v - o.v, d - o.d}; }
  Dual operator*(const Dual& o) const { return {v * o.v, d * o.v + v * o.d}; }
};

E1LTransform::Dual E1LTransform::lst_dual(const DistributionSpec& spec, const Dual& s) {
  return {lst(spec, s.v), lst_derivative(spec, s.v) * s.d};
}

E1LTransform::E1LTransform(const TwoQueueSpec& spec) : E1LTransform(spec, busy_period_g(spec)) {
  if (spec.q1.discipline.kind != Discipline::Kind::Exhaustive)
    throw SpecError("the built-in offspring transform applies to exhaustive Q1 only");
}

E1LTransform::E1LTransform(const TwoQueueSpec& spec, GFunction g)
    : spec_(spec), g_(std::move(g)), lambda1_(spec.lambda1()), lambda2_(spec.lambda2()) {
  validate(spec_);
  normalize();
}

// N~(z2) = sigma_1(g(z2), 0) sigma_2(g(z2), z2) (z2 - beta_2(g(z2), z2))
// D~(z2) = z2 - beta_2(g(z2), z2) sigma_2(g(z2), z2) sigma_1(g(z2), z2)
// so that psi(z2) = C N~(z2) / D~(z2); both vanish at z2 = 1.
E1LTransform::Dual E1LTransform::n_tilde(Complex z2) const {
  const Dual z{z2, 1.0};
  const Dual g{g_.value(z2), g_.derivative(z2)};
  const Dual u{lambda1_ * (1.0 - g.v) + lambda2_ * (1.0 - z2), -lambda1_ * g.d - lambda2_};
  const Dual u0{lambda1_ * (1.0 - g.v) + lambda2_, -lambda1_ * g.d};
  const Dual s10 = lst_dual(spec_.switchover1, u0);
  const Dual s2 = lst_dual(spec_.switchover2, u);
  const Dual a = lst_dual(spec_.q2.service, u);
  return s10 * s2 * (z - a);
}

E1LTransform::Dual E1LTransform::d_tilde(Complex z2) const {
  const Dual z{z2, 1.0};
  const Dual g{g_.value(z2), g_.derivative(z2)};
  const Dual u{lambda1_ * (1.0 - g.v) + lambda2_ * (1.0 - z2), -lambda1_ * g.d - lambda2_};
  const Dual s1 = lst_dual(spec_.switchover1, u);
  const Dual s2 = lst_dual(spec_.switchover2, u);
  const Dual a = lst_dual(spec_.q2.service, u);
  return z - a * s2 * s1;
}

void E1LTransform::normalize() {
  // Route (a): L'Hopital at z2 = 1 with exact derivatives.
  const Dual n1 = n_tilde(1.0);
  const Dual d1 = d_tilde(1.0);
  if (std::abs(n1.d) < 1e-14) throw NumericalError("degenerate normalization limit");
  const double analytic = (d1.d / n1.d).real();

  // Route (b): Richardson/Neville extrapolation of D~/N~ along z2 = 1 - h.
  constexpr int kLevels = 4;
  double h = 1e-2;
  double val[kLevels];
  for (int i = 0; i < kLevels; ++i, h *= 0.5) {
    const Complex z2{1.0 - h, 0.0};
    val[i] = (d_tilde(z2).v / n_tilde(z2).v).real();
  }
  double steps[kLevels];
  h = 1e-2;
  for (int i = 0; i < kLevels; ++i, h *= 0.5) steps[i] = h;
  for (int level = 1; level < kLevels; ++level)
    for (int i = kLevels - 1; i >= level; --i)
      val[i] = val[i] + (val[i] - val[i - 1]) * steps[i] / (steps[i - level] - steps[i]);
  const double numeric = val[kLevels - 1];

  if (std::abs(analytic - numeric) > 1e-6)
    throw NumericalError("normalization limit routes disagree beyond 1e-6");
  if (!(analytic > 0.0) || analytic > 1.0 + 1e-9)
    throw NumericalError("normalization constant outside (0, 1]");
  constant_ = analytic;
  constant_numeric_ = numeric;
}

Complex E1LTransform::psi(Complex z2) const {
  if (z2 == Complex{1.0, 0.0}) return 1.0;
  return constant_ * n_tilde(z2).v / d_tilde(z2).v;
}

Complex E1LTransform::evaluate(Complex z1, Complex z2) const {
  if (!TransformPoint{z1, z2}.in_domain())
    throw SpecError("evaluation point outside the closed unit bidisk");

  const auto u = [this](Complex a, Complex b) {
    return lambda1_ * (1.0 - a) + lambda2_ * (1.0 - b);
  };
  const Complex s1_z10 = lst(spec_.switchover1, u(z1, 0.0));
  if (z2 == Complex{0.0, 0.0}) {
    // The bracket of the functional equation vanishes at z2 = 0 because
    // psi(0) = C; divide it out analytically.
    const Dual n0 = n_tilde(0.0);
    const Dual d0 = d_tilde(0.0);
    const Complex psi_d0 = constant_ * (n0.d * d0.v - n0.v * d0.d) / (d0.v * d0.v);
    const Complex dsig1_dz2 = -lambda2_ * lst_derivative(spec_.switchover1, u(z1, 0.0));
    const Complex beta2 = lst(spec_.q2.service, u(z1, 0.0));
    const Complex sig2 = lst(spec_.switchover2, u(z1, 0.0));
    return beta2 * sig2 * (dsig1_dz2 * constant_ + s1_z10 * psi_d0) +
           constant_ * sig2 * s1_z10;
  }

  const Complex beta2 = lst(spec_.q2.service, u(z1, z2));
  const Complex sig2 = lst(spec_.switchover2, u(z1, z2));
  const Complex sig1 = lst(spec_.switchover1, u(z1, z2));
  return beta2 * sig2 / z2 * (sig1 * psi(z2) - constant_ * s1_z10) +
         constant_ * sig2 * s1_z10;
}

double E1LTransform::evaluate_real(double z1, double z2) const {
  return evaluate(Complex{z1, 0.0}, Complex{z2, 0.0}).real();
}

double functional_equation_residual(const TwoQueueSpec& spec, const PgfEvaluator& f1,
                                    const PgfEvaluator& h1, Complex z1, Complex z2) {
  if (z2 == Complex{0.0, 0.0})
    throw SpecError("the functional-equation residual needs z2 != 0");
  const double lam1 = spec.lambda1();
  const double lam2 = spec.lambda2();
  const auto u = [lam1, lam2](Complex a, Complex b) {
    return lam1 * (1.0 - a) + lam2 * (1.0 - b);
  };
  const Complex beta2 = lst(spec.q2.service, u(z1, z2));
  const Complex sig2 = lst(spec.switchover2, u(z1, z2));
  const Complex sig1 = lst(spec.switchover1, u(z1, z2));
  const Complex sig1_0 = lst(spec.switchover1, u(z1, 0.0));
  const Complex corner = f1(h1(z1, 0.0), 0.0);
  const Complex rhs = beta2 * sig2 / z2 * (sig1 * f1(h1(z1, z2), z2) - sig1_0 * corner) +
                      sig2 * sig1_0 * corner;
  return std::abs(f1(z1, z2) - rhs);
}

PgfEvaluator gated_offspring_pgf(const TwoQueueSpec& spec) {
  const double lam1 = spec.lambda1();
  const double lam2 = spec.lambda2();
  const DistributionSpec service = spec.q1.service;
  return [lam1, lam2, service](Complex z1, Complex z2) {
    return lst(service, lam1 * (1.0 - z1) + lam2 * (1.0 - z2));
  };
}

namespace {

// Integer powers with the PGF convention z^0 = 1 even at z = 0.
template <typename T>
T ipow(T z, std::uint32_t n) {
  T result{1.0};
  while (n != 0) {
    if (n & 1u) result *= z;
    z *= z;
    n >>= 1u;
  }
  return result;
}

}  // namespace

EmpiricalPgf::EmpiricalPgf(std::vector<std::uint32_t> flat, int dim,
                           std::vector<long long> rep_instants)
    : flat_(std::move(flat)), dim_(dim), rep_instants_(std::move(rep_instants)) {
  if (dim_ < 2) throw SpecError("empirical PGF needs at least two queue dimensions");
  total_instants_ = 0;
  for (long long c : rep_instants_) total_instants_ += c;
  if (static_cast<long long>(flat_.size()) != total_instants_ * dim_)
    throw SpecError("empirical PGF data does not match replication counts");
  if (total_instants_ == 0) throw SpecError("empirical PGF needs at least one sample");
}

Complex EmpiricalPgf::operator()(Complex z1, Complex z2) const {
  Complex sum = 0.0;
  for (long long i = 0; i < total_instants_; ++i) {
    sum += ipow(z1, flat_[i * dim_]) * ipow(z2, flat_[i * dim_ + 1]);
  }
  return sum / static_cast<double>(total_instants_);
}

Estimate EmpiricalPgf::at(double z1, double z2) const {
  std::vector<double> rep_sums(rep_instants_.size(), 0.0);
  long long idx = 0;
  for (std::size_t r = 0; r < rep_instants_.size(); ++r) {
    for (long long i = 0; i < rep_instants_[r]; ++i, ++idx) {
      rep_sums[r] += ipow(z1, flat_[idx * dim_]) * ipow(z2, flat_[idx * dim_ + 1]);
    }
  }
  double total = 0.0;
  for (double s : rep_sums) total += s;

  Estimate est;
  est.value = total / static_cast<double>(total_instants_);
  est.defined = true;

  std::vector<double> loo;
  for (std::size_t r = 0; r < rep_instants_.size(); ++r) {
    const long long rest = total_instants_ - rep_instants_[r];
    if (rest <= 0) continue;
    loo.push_back((total - rep_sums[r]) / static_cast<double>(rest));
  }
  if (loo.size() >= 2) {
    double m = 0.0;
    for (double x : loo) m += x;
    m /= static_cast<double>(loo.size());
    double ss = 0.0;
    for (double x : loo) ss += (x - m) * (x - m);
    est.ci_half_width = std::sqrt((loo.size() - 1.0) / loo.size() * ss);  // plain SE
  }
  return est;
}

PclReport pcl_g1l(const TwoQueueSpec& spec, double mean_w1, double mean_w2) {
  validate(spec);
  if (spec.q1.discipline.kind != Discipline::Kind::Gated)
    throw SpecError("this conservation law form applies to gated Q1");

  const double lam1 = spec.lambda1();
  const double lam2 = spec.lambda2();
  const double rho1 = lam1 * mean(spec.q1.service);
  const double rho2 = lam2 * mean(spec.q2.service);
  const double rho = rho1 + rho2;
  const double es = mean(spec.switchover1) + mean(spec.switchover2);
  const double es2 = variance(spec.switchover1) + variance(spec.switchover2) + es * es;
  if (!(lam2 * es < 1.0 - rho))
    throw StabilityError("1-limited queue unstable: lambda_2 E[S] >= 1 - rho");

  PclReport rep;
  rep.lhs = rho1 * mean_w1 + rho2 * (1.0 - lam2 * es / (1.0 - rho)) * mean_w2;
  const double b_term = lam1 * second_moment(spec.q1.service) +
                        lam2 * second_moment(spec.q2.service);
  rep.rhs = rho * b_term / (2.0 * (1.0 - rho)) + rho * es2 / (2.0 * es) +
            es * (rho * rho + rho1 * rho1 + rho2 * rho2) / (2.0 * (1.0 - rho));
  rep.relative_gap = rep.rhs != 0.0 ? std::abs(rep.lhs - rep.rhs) / rep.rhs : 0.0;
  return rep;
}

}  // namespace polling
