#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace permgraph {

double poisson_pmf(std::int64_t k, double lambda);

// (1/2) sum_k |p(k) - Poisson(lambda)(k)| over the support of p, plus half the
// Poisson mass beyond it. p must be a probability vector indexed from 0.
double tv_distance_poisson(std::span<const double> pmf, double lambda);
// Same for an empirical histogram of counts.
double tv_distance_poisson(std::span<const std::int64_t> histogram, double lambda);

struct Moments {
  double mean = 0;
  double variance = 0;   // unbiased
  double std_error = 0;  // sqrt(variance / count)
};
Moments moments(std::span<const double> values);

struct KsResult {
  double statistic = 0;
  double p_value = 1;  // asymptotic
};

// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_survival(double x);

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double exponential_cdf(double x);  // rate 1
double gumbel_cdf(double x);       // standard: exp(-exp(-x))

struct ChiSquareResult {
  double statistic = 0;
  int degrees_of_freedom = 0;
  double p_value = 1;
};

double chi_square_survival(double statistic, double degrees_of_freedom);
// Goodness of fit of counts to the uniform distribution on their cells.
ChiSquareResult chi_square_uniform(std::span<const std::int64_t> counts);

// Homogeneity of two count vectors over the same cells; cells empty in both
// samples are dropped.
ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

}  // namespace permgraph
