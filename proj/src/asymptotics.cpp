#include "permgraph/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <string>

#include "permgraph/counting.hpp"

namespace permgraph {

namespace {

template <typename Real>
Real euler_h_impl(Real q, Real tol) {
  if (!(q >= 0) || !(q < 1)) throw std::invalid_argument("euler_h: q must lie in [0, 1)");
  if (!(tol > 0)) throw std::invalid_argument("euler_h: tolerance must be positive");
  Real prod = 1;
  Real qj = q;
  for (;;) {
    prod *= 1 - qj;
    // Relative change from all later factors is at most
    // -log prod_{i>j}(1 - q^i) <= q^{j+1} / ((1 - q)(1 - q^{j+1})).
    const Real next = qj * q;
    if (next / ((1 - q) * (1 - next)) < tol) break;
    qj = next;
  }
  return prod;
}

}  // namespace

double euler_h(double q, double tol) { return euler_h_impl(q, tol); }

long double euler_h_extended(long double q, long double tol) { return euler_h_impl(q, tol); }

double indecomposable_density_estimate(double alpha) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return std::exp(-pi2 / 6 * alpha - pi2 / 12 + 0.5 * std::log(alpha) + 0.5 * std::log(2 * std::numbers::pi));
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::nontrivial: return "nontrivial";
    case Regime::always_decomposable: return "always_decomposable";
    case Regime::always_indecomposable: return "always_indecomposable";
  }
  return "unknown";
}

ThresholdParams threshold_params(std::int64_t n, std::int64_t m) {
  if (n < 2) throw std::invalid_argument("threshold_params: n must be at least 2");
  if (m < 0 || m > max_inversions(n))
    throw std::invalid_argument("threshold_params: m outside [0, C(n,2)]");
  ThresholdParams p;
  p.n = n;
  p.m = m;
  if (m < n - 1) p.regime = Regime::always_decomposable;
  else if (m > max_inversions(n - 1)) p.regime = Regime::always_indecomposable;
  p.alpha = static_cast<double>(m) / static_cast<double>(n);
  p.q = p.alpha / (p.alpha + 1);
  p.nu = static_cast<std::int64_t>(std::ceil(2 * (p.alpha + 1) * std::log(static_cast<double>(n))));
  p.h = p.q < 1 ? euler_h(p.q, 1e-14) : 0.0;
  p.lambda = static_cast<double>(n) * p.h;
  return p;
}

AlphaChoice alpha_for_mu(std::int64_t n, double mu) {
  if (n < 3) throw std::invalid_argument("alpha_for_mu: n must be at least 3");
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double ln = std::log(static_cast<double>(n));
  AlphaChoice out;
  out.alpha = 6 / pi2 * (ln + 0.5 * std::log(ln) + 0.5 * std::log(12 / std::numbers::pi) - pi2 / 12 + mu);
  const double raw = std::round(out.alpha * static_cast<double>(n));
  const auto lo = static_cast<double>(n - 1);
  const double hi = static_cast<double>(n - 1) * static_cast<double>(n - 2) / 2;
  out.m = static_cast<std::int64_t>(std::clamp(raw, lo, hi));
  return out;
}

std::vector<std::int64_t> marked_points(std::span<const std::int64_t> y, std::int64_t nu) {
  const auto len = static_cast<std::int64_t>(y.size());
  if (nu < 1) throw std::invalid_argument("marked_points: nu must be positive");
  if (nu > len) throw std::invalid_argument("marked_points: nu exceeds the sequence length");
  // i is marked iff i <= min_{i < k <= i + nu} (k - 1 - y_k).
  std::vector<std::int64_t> out;
  std::deque<std::int64_t> window;  // coordinates k with increasing k - 1 - y_k
  auto key = [&](std::int64_t k) { return k - 1 - y[k - 1]; };
  auto push = [&](std::int64_t k) {
    while (!window.empty() && key(window.back()) >= key(k)) window.pop_back();
    window.push_back(k);
  };
  for (std::int64_t k = 2; k <= std::min(len, 1 + nu); ++k) push(k);
  for (std::int64_t i = 1; i <= len - 2 * nu; ++i) {
    while (window.front() <= i) window.pop_front();
    if (i <= key(window.front())) out.push_back(i);
    if (i + nu + 1 <= len) push(i + nu + 1);
  }
  return out;
}

}  // namespace permgraph
