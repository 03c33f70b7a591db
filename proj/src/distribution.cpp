#include "polling/distribution.hpp"

#include <cmath>
#include <sstream>

#include "polling/errors.hpp"

namespace polling {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw SpecError(msg);
}

// (rate/(rate+s))^k and its s-derivative, shared by the Erlang family.
std::complex<double> erlang_lst(int k, double rate, std::complex<double> s) {
  return std::pow(rate / (rate + s), k);
}

std::complex<double> erlang_lst_deriv(int k, double rate, std::complex<double> s) {
  return erlang_lst(k, rate, s) * (-static_cast<double>(k) / (rate + s));
}

double sample_erlang(int k, double rate, RngStream& rng) {
  // Product of k uniforms under one log; safe from underflow up to a few
  // hundred phases, beyond that fall back to summing logs.
  if (k <= 256) {
    double prod = 1.0;
    for (int i = 0; i < k; ++i) prod *= rng.uniform();
    return -std::log(prod) / rate;
  }
  double total = 0.0;
  for (int i = 0; i < k; ++i) total += -std::log(rng.uniform());
  return total / rate;
}

}  // namespace

void validate(const DistributionSpec& spec) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          require(d.value >= 0.0, "deterministic value must be nonnegative");
        } else if constexpr (std::is_same_v<T, Exponential>) {
          require(d.rate > 0.0, "exponential rate must be positive");
        } else if constexpr (std::is_same_v<T, Erlang>) {
          require(d.phases >= 1, "erlang phase count must be >= 1");
          require(d.rate > 0.0, "erlang rate must be positive");
        } else if constexpr (std::is_same_v<T, MixedErlang>) {
          require(d.phases_low >= 1, "mixed-erlang low phase count must be >= 1");
          require(d.phases_high == d.phases_low + 1,
                  "mixed-erlang requires phasesHigh = phasesLow + 1");
          require(d.prob_low >= 0.0 && d.prob_low <= 1.0,
                  "mixed-erlang probability must lie in [0,1]");
          require(d.rate > 0.0, "mixed-erlang rate must be positive");
        } else if constexpr (std::is_same_v<T, Hyperexp2>) {
          require(d.prob1 >= 0.0 && d.prob1 <= 1.0, "hyperexp2 probability must lie in [0,1]");
          require(d.rate1 > 0.0 && d.rate2 > 0.0, "hyperexp2 rates must be positive");
        }
      },
      spec);
}

double mean(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return d.value;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return 1.0 / d.rate;
        } else if constexpr (std::is_same_v<T, Erlang>) {
          return d.phases / d.rate;
        } else if constexpr (std::is_same_v<T, MixedErlang>) {
          return (d.phases_high - d.prob_low) / d.rate;
        } else {
          return d.prob1 / d.rate1 + (1.0 - d.prob1) / d.rate2;
        }
      },
      spec);
}

double second_moment(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return d.value * d.value;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return 2.0 / (d.rate * d.rate);
        } else if constexpr (std::is_same_v<T, Erlang>) {
          return static_cast<double>(d.phases) * (d.phases + 1) / (d.rate * d.rate);
        } else if constexpr (std::is_same_v<T, MixedErlang>) {
          const double kl = d.phases_low, kh = d.phases_high;
          return (d.prob_low * kl * (kl + 1) + (1.0 - d.prob_low) * kh * (kh + 1)) /
                 (d.rate * d.rate);
        } else {
          return 2.0 * d.prob1 / (d.rate1 * d.rate1) +
                 2.0 * (1.0 - d.prob1) / (d.rate2 * d.rate2);
        }
      },
      spec);
}

double variance(const DistributionSpec& spec) {
  const double m = mean(spec);
  return second_moment(spec) - m * m;
}

double scv(const DistributionSpec& spec) {
  const double m = mean(spec);
  if (m == 0.0) return 0.0;
  return variance(spec) / (m * m);
}

std::complex<double> lst(const DistributionSpec& spec, std::complex<double> s) {
  return std::visit(
      [s](const auto& d) -> std::complex<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return std::exp(-s * d.value);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return d.rate / (d.rate + s);
        } else if constexpr (std::is_same_v<T, Erlang>) {
          return erlang_lst(d.phases, d.rate, s);
        } else if constexpr (std::is_same_v<T, MixedErlang>) {
          return d.prob_low * erlang_lst(d.phases_low, d.rate, s) +
                 (1.0 - d.prob_low) * erlang_lst(d.phases_high, d.rate, s);
        } else {
          return d.prob1 * d.rate1 / (d.rate1 + s) + (1.0 - d.prob1) * d.rate2 / (d.rate2 + s);
        }
      },
      spec);
}

std::complex<double> lst_derivative(const DistributionSpec& spec, std::complex<double> s) {
  return std::visit(
      [s](const auto& d) -> std::complex<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return -d.value * std::exp(-s * d.value);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          const std::complex<double> den = d.rate + s;
          return -d.rate / (den * den);
        } else if constexpr (std::is_same_v<T, Erlang>) {
          return erlang_lst_deriv(d.phases, d.rate, s);
        } else if constexpr (std::is_same_v<T, MixedErlang>) {
          return d.prob_low * erlang_lst_deriv(d.phases_low, d.rate, s) +
                 (1.0 - d.prob_low) * erlang_lst_deriv(d.phases_high, d.rate, s);
        } else {
          const std::complex<double> den1 = d.rate1 + s;
          const std::complex<double> den2 = d.rate2 + s;
          return -d.prob1 * d.rate1 / (den1 * den1) -
                 (1.0 - d.prob1) * d.rate2 / (den2 * den2);
        }
      },
      spec);
}

double sample(const DistributionSpec& spec, RngStream& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return d.value;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log(rng.uniform()) / d.rate;
        } else if constexpr (std::is_same_v<T, Erlang>) {
          return sample_erlang(d.phases, d.rate, rng);
        } else if constexpr (std::is_same_v<T, MixedErlang>) {
          const int k = rng.uniform() < d.prob_low ? d.phases_low : d.phases_high;
          return sample_erlang(k, d.rate, rng);
        } else {
          const double rate = rng.uniform() < d.prob1 ? d.rate1 : d.rate2;
          return -std::log(rng.uniform()) / rate;
        }
      },
      spec);
}

bool is_exponential(const DistributionSpec& spec) {
  return std::holds_alternative<Exponential>(spec);
}

bool is_deterministic(const DistributionSpec& spec) {
  return std::holds_alternative<Deterministic>(spec);
}

std::string describe(const DistributionSpec& spec) {
  std::ostringstream out;
  std::visit(
      [&out](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          out << "deterministic(" << d.value << ")";
        } else if constexpr (std::is_same_v<T, Exponential>) {
          out << "exponential(rate=" << d.rate << ")";
        } else if constexpr (std::is_same_v<T, Erlang>) {
          out << "erlang(k=" << d.phases << ", rate=" << d.rate << ")";
        } else if constexpr (std::is_same_v<T, MixedErlang>) {
          out << "mixed-erlang(k=" << d.phases_low << "/" << d.phases_high
              << ", p=" << d.prob_low << ", rate=" << d.rate << ")";
        } else {
          out << "hyperexp2(p1=" << d.prob1 << ", rates=" << d.rate1 << "," << d.rate2 << ")";
        }
      },
      spec);
  return out.str();
}

}  // namespace polling
