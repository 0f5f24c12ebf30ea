#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace permgraph {

using BigInt = mpz_class;
using Rational = mpq_class;

// num / den in lowest terms; den must be nonzero.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline constexpr std::int64_t max_inversions(std::int64_t n) { return n * (n - 1) / 2; }

inline constexpr std::uint64_t kNoBudgetCap = std::numeric_limits<std::uint64_t>::max();

// Table of s(n', m) = number of permutations of [n'] with m inversions, for
// 1 <= n' <= max_n. A budget cap limits stored columns to m <= cap; entries
// beyond the cap are recovered through s(n, m) = s(n, C(n,2) - m) when the
// mirrored entry is stored. Each row also keeps cumulative sums.
class InversionTable {
 public:
  InversionTable() = default;

  int max_n() const { return max_n_; }
  std::uint64_t budget_cap() const { return cap_; }

  // Stored part of row n (m = 0 .. min(C(n,2), cap)).
  std::span<const BigInt> row(int n) const;

  // True when s(n, m) is available directly or through the mirror.
  bool covers(int n, std::int64_t m) const;

  // s(n, m). Zero for m outside [0, C(n,2)]. Throws std::out_of_range if n is
  // not in [1, max_n] or the entry was cut by the cap on both sides.
  const BigInt& count(int n, std::int64_t m) const;

  // sum_{k <= m} s(n, k); zero for m < 0 and n! for m >= C(n,2).
  BigInt prefix(int n, std::int64_t m) const;
  // Same, returned by reference; requires m <= stored end of the row or m < 0
  // or m >= C(n,2).
  const BigInt& prefix_ref(int n, std::int64_t m) const;

  void save(std::ostream& out) const;
  static InversionTable load(std::istream& in);

  friend bool operator==(const InversionTable& a, const InversionTable& b) {
    return a.max_n_ == b.max_n_ && a.cap_ == b.cap_ && a.rows_ == b.rows_;
  }

 private:
  friend InversionTable build_table(int max_n, std::uint64_t budget_cap);
  void rebuild_prefixes();
  std::int64_t stored_end(int n) const;  // last stored column
  void check_row(int n) const;

  int max_n_ = 0;
  std::uint64_t cap_ = kNoBudgetCap;
  std::vector<std::vector<BigInt>> rows_;      // rows_[n-1]
  std::vector<std::vector<BigInt>> prefixes_;  // prefixes_[n-1][m]
  std::vector<BigInt> factorials_;             // factorials_[n-1] = n!
};

InversionTable build_table(int max_n, std::uint64_t budget_cap = kNoBudgetCap);

// Coefficients of prod_{i=1}^{n} (1 + x + ... + x^{i-1}), by plain polynomial
// multiplication. Index k holds the coefficient of x^k.
std::vector<BigInt> mahonian_polynomial(int n);

}  // namespace permgraph
