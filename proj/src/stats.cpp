#include "permgraph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace permgraph {

double poisson_pmf(std::int64_t k, double lambda) {
  if (k < 0) return 0;
  return boost::math::pdf(boost::math::poisson_distribution<double>(lambda), static_cast<double>(k));
}

double tv_distance_poisson(std::span<const double> pmf, double lambda) {
  if (pmf.empty()) throw std::invalid_argument("tv_distance: empty distribution");
  if (!(lambda > 0)) throw std::invalid_argument("tv_distance: lambda must be positive");
  double diff = 0;
  double covered = 0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double pk = poisson_pmf(static_cast<std::int64_t>(k), lambda);
    diff += std::abs(pmf[k] - pk);
    covered += pk;
  }
  const double tail = std::max(0.0, 1.0 - covered);
  return std::clamp(0.5 * (diff + tail), 0.0, 1.0);
}

double tv_distance_poisson(std::span<const std::int64_t> histogram, double lambda) {
  const auto total = std::accumulate(histogram.begin(), histogram.end(), std::int64_t{0});
  if (total <= 0) throw std::invalid_argument("tv_distance: empty histogram");
  std::vector<double> pmf(histogram.size());
  for (std::size_t k = 0; k < histogram.size(); ++k)
    pmf[k] = static_cast<double>(histogram[k]) / static_cast<double>(total);
  return tv_distance_poisson(pmf, lambda);
}

Moments moments(std::span<const double> values) {
  Moments m;
  const auto count = static_cast<double>(values.size());
  if (values.empty()) return m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.variance = ss / (count - 1);
  }
  m.std_error = std::sqrt(m.variance / count);
  return m;
}

double kolmogorov_survival(double x) {
  if (x <= 0) return 1;
  if (x < 1.18) {
    // Theta-function form, accurate for small x.
    const double y = std::exp(-1.2337005501361697 / (x * x));  // pi^2 / 8
    const double sum = y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49);
    return std::clamp(1.0 - 2.5066282746310002 / x * sum, 0.0, 1.0);  // sqrt(2 pi)
  }
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_one_sample: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double s = std::sqrt(n);
  return {d, kolmogorov_survival((s + 0.12 + 0.11 / s) * d)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

double exponential_cdf(double x) { return x <= 0 ? 0.0 : -std::expm1(-x); }

double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

double chi_square_survival(double statistic, double degrees_of_freedom) {
  if (statistic <= 0) return 1;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(degrees_of_freedom),
                                                  statistic));
}

ChiSquareResult chi_square_uniform(std::span<const std::int64_t> counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi_square_uniform: need at least two cells");
  const auto total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  const double expected = total / static_cast<double>(counts.size());
  ChiSquareResult r;
  for (auto c : counts) r.statistic += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  r.degrees_of_freedom = static_cast<int>(counts.size()) - 1;
  r.p_value = chi_square_survival(r.statistic, r.degrees_of_freedom);
  return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: cell count mismatch");
  const auto na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::int64_t{0}));
  const auto nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::int64_t{0}));
  if (na <= 0 || nb <= 0) throw std::invalid_argument("chi_square_two_sample: empty sample");
  ChiSquareResult r;
  int cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double pooled = static_cast<double>(a[i] + b[i]);
    if (pooled == 0) continue;
    ++cells;
    const double ea = pooled * na / (na + nb);
    const double eb = pooled * nb / (na + nb);
    r.statistic += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
  }
  r.degrees_of_freedom = std::max(cells - 1, 1);
  r.p_value = chi_square_survival(r.statistic, r.degrees_of_freedom);
  return r;
}

}  // namespace permgraph
