#pragma once

#include "polling/distribution.hpp"

namespace polling {

struct MomentPair {
  double mean = 0.0;
  double scv = 0.0;
  double second_moment = 0.0;
};

MomentPair moments(const DistributionSpec& spec);

/// Two-moment phase-type fit.
///
/// scv == 0      -> Deterministic(mean)
/// scv in (0,1)  -> mixture of Erlang(k-1) and Erlang(k) with common rate,
///                  k the smallest integer with 1/k <= scv (pure Erlang when
///                  scv hits 1/k exactly)
/// scv == 1      -> Exponential
/// scv > 1       -> balanced-means two-phase hyperexponential
///
/// The returned spec matches (mean, scv) exactly.
DistributionSpec fit_phase_type(double mean, double scv);

}  // namespace polling
