#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "polling/model.hpp"
#include "polling/stats.hpp"
#include "polling/transforms.hpp"

namespace polling {

/// Two-queue polling system with Poisson arrivals in which Q2 receives
/// 1-limited service. Q1 is exhaustive (exactly solvable) or gated (open;
/// residual diagnostics only).
struct TwoQueueSpec {
  QueueSpec q1;
  QueueSpec q2;
  DistributionSpec switchover1;  // from Q1 to Q2
  DistributionSpec switchover2;  // from Q2 back to Q1

  double lambda1() const { return 1.0 / mean(q1.interarrival); }
  double lambda2() const { return 1.0 / mean(q2.interarrival); }
  SystemSpec to_system() const;
};

/// Throws unless arrivals are Poisson, Q2 is 1-limited, and the system is
/// stable (rho < 1 and lambda_2 E[S] < 1 - rho).
void validate(const TwoQueueSpec& spec);

using Complex = std::complex<double>;

/// A point of the closed unit bidisk, where the joint PGFs live.
struct TransformPoint {
  Complex z1{0.0};
  Complex z2{0.0};
  bool in_domain() const {
    return std::abs(z1) <= 1.0 + 1e-9 && std::abs(z2) <= 1.0 + 1e-9;
  }
};

/// A univariate PGF and its derivative, playing the role of the Q1 offspring
/// transform h_1(z1, z2) when it does not depend on z1.
struct GFunction {
  std::function<Complex(Complex)> value;
  std::function<Complex(Complex)> derivative;
};

/// The exhaustive-service offspring PGF g(z2) = pi_1(lambda_2 (1 - z2)).
GFunction busy_period_g(const TwoQueueSpec& spec);

/// Exact evaluator of the joint queue-length PGF F_1(z1, z2) at polling
/// instants of Q1 for the E/1-L system (or, with a custom g, for any Q1
/// discipline whose offspring transform is z1-free).
///
/// Solving the visit/switch-over relations along the curve z1 = g(z2) yields
/// psi(z2) = F_1(g(z2), z2) up to a constant C = F_1(g(0), 0), which the
/// normalization F_1(1,1) = 1 pins down through the (0/0) limit at z2 = 1.
/// That limit is computed both from exact derivatives and as a Richardson
/// extrapolation; construction fails if the two disagree beyond 1e-6.
class E1LTransform {
 public:
  explicit E1LTransform(const TwoQueueSpec& spec);
  E1LTransform(const TwoQueueSpec& spec, GFunction g);

  /// The normalization constant C = F_1(g(0), 0) from the derivative route.
  double constant() const { return constant_; }
  /// The same constant from the extrapolated numerical limit.
  double constant_numeric_limit() const { return constant_numeric_; }

  /// psi(z2) = F_1(g(z2), z2).
  Complex psi(Complex z2) const;

  /// F_1(z1, z2) on the closed unit bidisk. The removable 1/z2 singularity
  /// at z2 = 0 is evaluated through its algebraic limit form.
  Complex evaluate(Complex z1, Complex z2) const;
  Complex evaluate(const TransformPoint& p) const { return evaluate(p.z1, p.z2); }
  double evaluate_real(double z1, double z2) const;

 private:
  struct Dual;  // value + d/dz2
  static Dual lst_dual(const DistributionSpec& spec, const Dual& s);
  Dual n_tilde(Complex z2) const;
  Dual d_tilde(Complex z2) const;
  void normalize();

  TwoQueueSpec spec_;
  GFunction g_;
  double lambda1_, lambda2_;
  double constant_ = 0.0;
  double constant_numeric_ = 0.0;
};

using PgfEvaluator = std::function<Complex(Complex, Complex)>;

/// |LHS - RHS| of the combined visit/switch-over functional equation for a
/// two-queue system with 1-limited Q2, with the supplied joint PGF and Q1
/// offspring transform h1 plugged into both sides. Exact solutions give
/// residuals at roundoff level; empirical PGFs give a convergence
/// diagnostic. z2 must be nonzero.
double functional_equation_residual(const TwoQueueSpec& spec, const PgfEvaluator& f1,
                                    const PgfEvaluator& h1, Complex z1, Complex z2);
inline double functional_equation_residual(const TwoQueueSpec& spec, const PgfEvaluator& f1,
                                           const PgfEvaluator& h1, const TransformPoint& p) {
  return functional_equation_residual(spec, f1, h1, p.z1, p.z2);
}

/// The gated offspring transform h_1(z1,z2) = beta_1(lambda_1(1-z1) +
/// lambda_2(1-z2)).
PgfEvaluator gated_offspring_pgf(const TwoQueueSpec& spec);

/// Empirical joint PGF from polling-instant queue-length vectors: the sample
/// mean of z1^n1 z2^n2, with leave-one-replication-out jackknife standard
/// errors.
class EmpiricalPgf {
 public:
  /// `flat` holds dim entries per polling instant (replications
  /// concatenated in order); `rep_instants` the instants per replication.
  EmpiricalPgf(std::vector<std::uint32_t> flat, int dim, std::vector<long long> rep_instants);

  Complex operator()(Complex z1, Complex z2) const;
  /// Value and jackknife standard error at a real point.
  Estimate at(double z1, double z2) const;
  long long sample_count() const { return total_instants_; }

 private:
  std::vector<std::uint32_t> flat_;
  int dim_;
  std::vector<long long> rep_instants_;
  long long total_instants_;
};

struct PclReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_gap = 0.0;
};

/// Pseudo-conservation law for the G/1-L system: the load-weighted mean
/// waits (lhs, from supplied simulation estimates) against the closed-form
/// right-hand side. Q1 must be gated.
PclReport pcl_g1l(const TwoQueueSpec& spec, double mean_w1, double mean_w2);

}  // namespace polling
