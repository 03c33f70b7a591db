#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "polling/model.hpp"

namespace polling {

// Exact analytics for branching-type polling systems with Poisson arrivals.
//
// At a visit to queue i, every customer present is replaced by an i.i.d.
// population (its "offspring"): the arrivals at all queues during that
// customer's service (gated) or during the busy period it spawns
// (exhaustive). During a switch-over, Poisson "immigration" joins every
// queue. Propagating mean and covariance through one server cycle gives an
// affine map whose unique fixed point is the joint queue-length law's first
// two moments at polling instants of Q_1.

/// First and second derivatives at z = 1 of the offspring PGF of queue i.
struct OffspringMoments {
  Eigen::VectorXd mean;           // d h_i / d z_j
  Eigen::MatrixXd second_deriv;   // d^2 h_i / d z_j d z_k
  Eigen::MatrixXd covariance() const;
};

/// Fraction of each present customer NOT replaced by own-queue offspring:
/// 1 for exhaustive, 1 - rho_i for gated. Errors on k-limited.
double exhaustiveness(const SystemSpec& spec, int queue);

OffspringMoments offspring_moments(const SystemSpec& spec, int queue);

struct MomentSolution {
  Eigen::VectorXd mean;        // joint queue length at Q_1 polling instants
  Eigen::MatrixXd covariance;
  double scv_at_q1 = 0.0;      // covariance(0,0) / mean(0)^2
  long iterations = 0;
};

struct StepMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Fixed point of the cycle's moment recursion (visit map then switch-over
/// map, per queue). Requires Poisson arrivals, branching disciplines at all
/// queues, cyclic order and rho < 1. Optionally started from a given point;
/// the fixed point does not depend on it.
MomentSolution polling_moments(const SystemSpec& spec,
                               const std::optional<StepMoments>& start = std::nullopt);

/// Visit-start moments at every queue, from one propagation of the converged
/// cycle.
std::vector<StepMoments> visit_start_moments(const SystemSpec& spec);

/// Asymptotic law of the scaled waiting time W_i / S as deterministic
/// switch-over times grow: scale * Uniform[support_low, support_high].
struct LimitLaw {
  double scale = 1.0;         // (1 - rho_i) / (1 - rho)
  double support_low = 0.0;   // (1 - Phi_i) / Phi_i
  double support_high = 1.0;  // 1 / Phi_i

  double mean() const { return scale * 0.5 * (support_low + support_high); }
  double variance() const {
    const double w = scale * (support_high - support_low);
    return w * w / 12.0;
  }
  double scv() const;
  double cdf(double x) const;
};

LimitLaw limit_law(const SystemSpec& spec, int queue);

/// scv of the Q_1 polling-instant queue length under each scaling of the
/// (deterministic) switch-over times. Multipliers must be positive.
std::vector<double> scv_under_switchover_scaling(const SystemSpec& spec,
                                                 const std::vector<double>& multipliers);

/// Diagnostic evaluation of the joint PGF F_1 at a real point of [0,1]^N by
/// unrolling the visit/switch-over relations for `depth` cycles; the
/// truncation error vanishes geometrically in depth.
double eval_f1(const SystemSpec& spec, const Eigen::VectorXd& z, int depth);

}  // namespace polling
