#include "polling/transforms.hpp"

#include <cmath>

#include "polling/errors.hpp"

namespace polling {

std::complex<double> busy_period_lst(std::complex<double> s, double lambda,
                                     const DistributionSpec& service) {
  const double rho = lambda * mean(service);
  if (!(rho < 1.0)) throw StabilityError("busy period diverges at rho >= 1");
  std::complex<double> pi = 1.0;
  for (int it = 0; it < 100000; ++it) {
    const std::complex<double> next = lst(service, s + lambda * (1.0 - pi));
    if (std::abs(next - pi) < 1e-13) return next;
    pi = next;
  }
  throw NumericalError("busy-period LST fixed point did not converge");
}

std::complex<double> busy_period_lst_derivative(std::complex<double> s, double lambda,
                                                const DistributionSpec& service) {
  const std::complex<double> pi = busy_period_lst(s, lambda, service);
  const std::complex<double> bd = lst_derivative(service, s + lambda * (1.0 - pi));
  return bd / (1.0 + lambda * bd);
}

BusyPeriodMoments busy_period_moments(double lambda, const DistributionSpec& service) {
  const double rho = lambda * mean(service);
  if (!(rho < 1.0)) throw StabilityError("busy period diverges at rho >= 1");
  const double slack = 1.0 - rho;
  return {mean(service) / slack, second_moment(service) / (slack * slack * slack)};
}

}  // namespace polling
