#include <doctest.h>

#include <cmath>
#include <random>

#include "permgraph/random.hpp"
#include "permgraph/stats.hpp"

using namespace permgraph;

TEST_CASE("total variation to Poisson") {
  const std::vector<double> point{1.0};
  CHECK(tv_distance_poisson(point, 1.0) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-12));
  std::vector<double> exact;
  for (int k = 0; k < 80; ++k) exact.push_back(poisson_pmf(k, 3.0));
  CHECK(tv_distance_poisson(exact, 3.0) < 1e-12);
  const std::vector<std::int64_t> hist{0, 10};
  CHECK(tv_distance_poisson(hist, 1.0) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(tv_distance_poisson(std::vector<double>{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tv_distance_poisson(point, 0.0), std::invalid_argument);
}

TEST_CASE("kolmogorov distribution") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639452436).epsilon(1e-8));
  CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.2699996716).epsilon(1e-8));
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(1e-2));
  // Both series agree where they switch.
  CHECK(kolmogorov_survival(1.1799999) == doctest::Approx(kolmogorov_survival(1.1800001)).epsilon(1e-6));
}

TEST_CASE("one-sample KS") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_one_sample({0.5}, uniform).statistic == doctest::Approx(0.5));
  CHECK(ks_one_sample({0.25, 0.75}, uniform).statistic == doctest::Approx(0.25));
  Rng rng(1, 0);
  std::vector<double> exps;
  for (int i = 0; i < 5000; ++i) exps.push_back(-std::log1p(-rng.uniform01()));
  const auto r = ks_one_sample(exps, exponential_cdf);
  CHECK(r.statistic < 0.03);
  CHECK(r.p_value > 1e-3);
  std::vector<double> gum;
  for (int i = 0; i < 5000; ++i) gum.push_back(-std::log(-std::log(rng.uniform01())));
  CHECK(ks_one_sample(gum, gumbel_cdf).statistic < 0.03);
  CHECK(ks_one_sample(gum, exponential_cdf).statistic > 0.2);
}

TEST_CASE("two-sample KS") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == 1.0);
  CHECK(ks_two_sample({1, 2}, {3, 4}).statistic == 1.0);
  // Ties: both samples on the same two values.
  CHECK(ks_two_sample({1, 1, 2, 2}, {1, 2, 2, 2}).statistic == doctest::Approx(0.25));
}

TEST_CASE("chi-square") {
  CHECK(chi_square_survival(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  const std::vector<std::int64_t> even{100, 100, 100};
  CHECK(chi_square_uniform(even).statistic == 0.0);
  CHECK(chi_square_uniform(even).p_value == 1.0);
  const std::vector<std::int64_t> skew{0, 300};
  CHECK(chi_square_uniform(skew).p_value < 1e-10);
}

TEST_CASE("two-sample chi-square") {
  const std::vector<std::int64_t> a{50, 30, 20, 0};
  CHECK(chi_square_two_sample(a, a).statistic == 0.0);
  const std::vector<std::int64_t> b{20, 30, 50, 0};
  // pooled expectations 35, 30, 35 for each sample
  const auto r = chi_square_two_sample(a, b);
  CHECK(r.statistic == doctest::Approx(4 * 225.0 / 35));
  CHECK(r.p_value == doctest::Approx(std::exp(-r.statistic / 2)));
  CHECK(chi_square_two_sample(a, b).degrees_of_freedom == 2);
  CHECK_THROWS_AS(chi_square_two_sample(a, std::vector<std::int64_t>{1}), std::invalid_argument);
}

TEST_CASE("sampling noise of the Poisson distance") {
  std::mt19937_64 gen(99);
  std::poisson_distribution<int> pois(2.0);
  std::vector<std::int64_t> hist(1, 0);
  for (int i = 0; i < 1000000; ++i) {
    const int k = pois(gen);
    if (k >= static_cast<int>(hist.size())) hist.resize(k + 1, 0);
    ++hist[k];
  }
  CHECK(tv_distance_poisson(hist, 2.0) <= 0.005);
}

TEST_CASE("moments") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto m = moments(v);
  CHECK(m.mean == 2.5);
  CHECK(m.variance == doctest::Approx(5.0 / 3.0));
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)));
}
