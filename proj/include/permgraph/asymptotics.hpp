#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace permgraph {

// h(q) = prod_{j >= 1} (1 - q^j), truncated once the remaining factors move
// the value by less than tol (relative). Requires 0 <= q < 1.
double euler_h(double q, double tol = 1e-15);
long double euler_h_extended(long double q, long double tol = 1e-18L);

// Heuristic density of indecomposable permutations at ratio alpha = m / n,
// exp(-(pi^2/6) alpha - pi^2/12 + log(alpha)/2 + log(2 pi)/2).
double indecomposable_density_estimate(double alpha);

enum class Regime {
  nontrivial,             // m in [n-1, C(n-1,2)]
  always_decomposable,    // m < n-1
  always_indecomposable,  // m > C(n-1,2)
};

std::string to_string(Regime r);

struct ThresholdParams {
  std::int64_t n = 0;
  std::int64_t m = 0;
  Regime regime = Regime::nontrivial;
  double alpha = 0;   // m / n
  double q = 0;       // alpha / (alpha + 1)
  std::int64_t nu = 0;  // ceil(2 (alpha + 1) log n)
  double h = 0;       // euler_h(q)
  double lambda = 0;  // n h
};

// Throws std::invalid_argument unless n >= 2 and 0 <= m <= C(n,2).
ThresholdParams threshold_params(std::int64_t n, std::int64_t m);

struct AlphaChoice {
  double alpha = 0;
  std::int64_t m = 0;  // round(alpha n), clamped to [n-1, C(n-1,2)]
};

// alpha = (6/pi^2) (log n + log(log n)/2 + log(12/pi)/2 - pi^2/12 + mu), the
// ratio at which the expected number of blocks beyond the first is about e^-mu.
AlphaChoice alpha_for_mu(std::int64_t n, double mu);

// Positions i in [1, len - 2 nu] (increasing) with y_{i+t} <= t - 1 for every
// t in [1, nu]. One pass with a sliding-window minimum.
std::vector<std::int64_t> marked_points(std::span<const std::int64_t> y, std::int64_t nu);

}  // namespace permgraph
