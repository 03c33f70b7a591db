#include "polling/fit.hpp"

#include <cmath>

#include "polling/errors.hpp"

namespace polling {

MomentPair moments(const DistributionSpec& spec) {
  MomentPair m;
  m.mean = mean(spec);
  m.scv = scv(spec);
  m.second_moment = second_moment(spec);
  return m;
}

DistributionSpec fit_phase_type(double mean, double scv) {
  if (!(mean > 0.0)) throw SpecError("fit_phase_type: mean must be positive");
  if (scv < 0.0) throw SpecError("fit_phase_type: scv must be nonnegative");
  if (scv == 0.0) return Deterministic{mean};
  if (scv == 1.0) return Exponential{1.0 / mean};

  if (scv > 1.0) {
    // Balanced means: prob_i / rate_i equal across the two phases.
    const double skew = std::sqrt((scv - 1.0) / (scv + 1.0));
    const double p1 = 0.5 * (1.0 + skew);
    const double p2 = 1.0 - p1;
    return Hyperexp2{p1, 2.0 * p1 / mean, 2.0 * p2 / mean};
  }

  // scv in (0,1): Erlang(k-1)/Erlang(k) mixture with common rate, where k is
  // the smallest phase count with 1/k <= scv. prob_low solves the scv
  // equation exactly; a tie at scv = 1/(k-1) collapses to the smaller pure
  // Erlang.
  int k = static_cast<int>(std::ceil(1.0 / scv - 1e-12));
  if (k < 2) k = 2;
  const double disc = k * (1.0 + scv) - k * static_cast<double>(k) * scv;
  const double p = (k * scv - std::sqrt(std::max(disc, 0.0))) / (1.0 + scv);
  if (p <= 1e-12) return Erlang{k, k / mean};
  if (p >= 1.0 - 1e-12) return Erlang{k - 1, (k - 1) / mean};
  return MixedErlang{k - 1, k, p, (k - p) / mean};
}

}  // namespace polling
