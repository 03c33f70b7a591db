#pragma once

#include <complex>
#include <string>
#include <variant>

#include "polling/rng.hpp"

namespace polling {

// A closed family of nonnegative distributions with closed-form first two
// moments and Laplace-Stieltjes transforms. Together with the two-moment
// phase-type fit (fit.hpp) it covers every interarrival, service and
// switch-over law used by the lab.

struct Deterministic {
  double value = 0.0;
};

struct Exponential {
  double rate = 1.0;
};

struct Erlang {
  int phases = 1;
  double rate = 1.0;
};

/// Mixture of Erlang(phasesLow) and Erlang(phasesLow + 1) with a common rate;
/// probLow is the weight of the low-phase branch.
struct MixedErlang {
  int phases_low = 1;
  int phases_high = 2;
  double prob_low = 0.5;
  double rate = 1.0;
};

/// Two-phase hyperexponential: Exponential(rate1) w.p. prob1, else rate2.
struct Hyperexp2 {
  double prob1 = 0.5;
  double rate1 = 1.0;
  double rate2 = 1.0;
};

using DistributionSpec =
    std::variant<Deterministic, Exponential, Erlang, MixedErlang, Hyperexp2>;

/// Throws SpecError if rates/probabilities/phase counts are out of range.
void validate(const DistributionSpec& spec);

double mean(const DistributionSpec& spec);
double second_moment(const DistributionSpec& spec);
double variance(const DistributionSpec& spec);
double scv(const DistributionSpec& spec);

/// E[exp(-s X)] for Re(s) >= 0, in closed form per variant.
std::complex<double> lst(const DistributionSpec& spec, std::complex<double> s);
/// d/ds E[exp(-s X)].
std::complex<double> lst_derivative(const DistributionSpec& spec, std::complex<double> s);

/// One nonnegative variate from the spec's law.
double sample(const DistributionSpec& spec, RngStream& rng);

bool is_exponential(const DistributionSpec& spec);
bool is_deterministic(const DistributionSpec& spec);

std::string describe(const DistributionSpec& spec);

}  // namespace polling
