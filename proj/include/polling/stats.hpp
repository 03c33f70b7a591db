#pragma once

#include <functional>
#include <vector>

namespace polling {

/// Streaming first/second raw-moment accumulator, mergeable and (for
/// leave-one-out jackknifing) subtractable.
struct Moments {
  long long count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    sum_sq += x * x;
  }
  Moments& operator+=(const Moments& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }
  Moments operator-(const Moments& o) const {
    return {count - o.count, sum - o.sum, sum_sq - o.sum_sq};
  }

  double mean() const { return count > 0 ? sum / count : 0.0; }
  /// Population variance of the pooled sample.
  double variance() const {
    if (count <= 0) return 0.0;
    const double m = mean();
    const double v = sum_sq / count - m * m;
    return v > 0.0 ? v : 0.0;
  }
  double scv() const {
    const double m = mean();
    return m != 0.0 ? variance() / (m * m) : 0.0;
  }
};

/// Two-sided 95% Student-t critical value (0.975 quantile).
double t_critical_975(long long df);

struct Estimate {
  double value = 0.0;
  double ci_half_width = 0.0;
  bool defined = false;
};

/// Pooled mean over replications; CI half-width from the t-interval over
/// replication means. Requires >= 2 nonempty replications for a CI.
Estimate estimate_mean(const std::vector<Moments>& replications);

/// Pooled scv = variance/mean^2 over all samples; CI half-width from a
/// leave-one-replication-out jackknife of the pooled scv. Undefined (flagged)
/// when the pooled mean is zero.
Estimate estimate_scv(const std::vector<Moments>& replications);

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and the
/// continuous CDF `cdf`. Sorts a copy of the samples.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace polling
