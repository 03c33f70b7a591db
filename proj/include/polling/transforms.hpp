#pragma once

#include <complex>

#include "polling/distribution.hpp"

namespace polling {

/// LST of the busy period of an M/G/1 queue with arrival rate `lambda` and
/// the given service law: the fixed point pi = lst_B(s + lambda (1 - pi)),
/// |pi| <= 1, for Re(s) >= 0. Plain iteration from 1, tolerance 1e-13.
std::complex<double> busy_period_lst(std::complex<double> s, double lambda,
                                     const DistributionSpec& service);

/// d/ds of the busy-period LST, by implicit differentiation of the fixed
/// point: pi'(s) = beta'(w) / (1 + lambda beta'(w)) with
/// w = s + lambda (1 - pi(s)).
std::complex<double> busy_period_lst_derivative(std::complex<double> s, double lambda,
                                                const DistributionSpec& service);

struct BusyPeriodMoments {
  double mean = 0.0;           // E[B] / (1 - rho_i)
  double second_moment = 0.0;  // E[B^2] / (1 - rho_i)^3
};

BusyPeriodMoments busy_period_moments(double lambda, const DistributionSpec& service);

}  // namespace polling
