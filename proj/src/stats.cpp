#include "polling/stats.hpp"

#include <algorithm>
#include <cmath>

namespace polling {

double t_critical_975(long long df) {
  // Exact table for small degrees of freedom, Cornish-Fisher expansion
  // around the normal quantile beyond it.
  static const double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
      2.040,  2.037, 2.035, 2.032, 2.030, 2.028, 2.026, 2.024, 2.023, 2.021};
  if (df < 1) return 0.0;
  if (df <= 40) return table[df - 1];
  const double z = 1.959963984540054;
  const double z3 = z * z * z, z5 = z3 * z * z;
  const double nu = static_cast<double>(df);
  return z + (z3 + z) / (4.0 * nu) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * nu * nu);
}

namespace {

Moments pool(const std::vector<Moments>& reps) {
  Moments total;
  for (const auto& r : reps) total += r;
  return total;
}

}  // namespace

Estimate estimate_mean(const std::vector<Moments>& replications) {
  const Moments total = pool(replications);
  Estimate est;
  if (total.count == 0) return est;
  est.value = total.mean();
  est.defined = true;

  std::vector<double> rep_means;
  for (const auto& r : replications)
    if (r.count > 0) rep_means.push_back(r.mean());
  const std::size_t k = rep_means.size();
  if (k < 2) return est;
  double m = 0.0;
  for (double x : rep_means) m += x;
  m /= k;
  double ss = 0.0;
  for (double x : rep_means) ss += (x - m) * (x - m);
  const double se = std::sqrt(ss / (k - 1) / k);
  est.ci_half_width = t_critical_975(static_cast<long long>(k) - 1) * se;
  return est;
}

Estimate estimate_scv(const std::vector<Moments>& replications) {
  const Moments total = pool(replications);
  Estimate est;
  if (total.count == 0 || total.mean() == 0.0) return est;  // scv undefined
  est.value = total.scv();
  est.defined = true;

  // Leave-one-replication-out jackknife of the pooled scv.
  std::vector<double> loo;
  for (const auto& r : replications) {
    if (r.count == 0) continue;
    const Moments rest = total - r;
    if (rest.count == 0 || rest.mean() == 0.0) continue;
    loo.push_back(rest.scv());
  }
  const std::size_t k = loo.size();
  if (k < 2) return est;
  double m = 0.0;
  for (double x : loo) m += x;
  m /= k;
  double ss = 0.0;
  for (double x : loo) ss += (x - m) * (x - m);
  // Jackknife variance of the pooled estimator: (k-1)/k * sum of squared
  // leave-one-out deviations.
  const double se = std::sqrt((static_cast<double>(k) - 1.0) / k * ss);
  est.ci_half_width = t_critical_975(static_cast<long long>(k) - 1) * se;
  return est;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) return 1.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace polling
