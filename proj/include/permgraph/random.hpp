#pragma once

#include <cstdint>
#include <random>

#include <gmpxx.h>

namespace permgraph {

// Deterministic random stream addressed by (seed, stream). Distinct stream ids
// expand through seed_seq into unrelated engine states, so trial i of a run
// sees the same draws regardless of thread scheduling.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream);

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  // Uniform integer in [0, bound), exact (multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::mt19937_64 engine_;
};

// Uniform integer in [0, bound); bound must be positive.
mpz_class uniform_below(const mpz_class& bound, Rng& rng);

// Returns true with probability num/den, exactly. Compares a lazily expanded
// uniform U = 0.u1 u2 ... (base 2^64) against the expansion of num/den.
bool bernoulli(const mpz_class& num, const mpz_class& den, Rng& rng);
bool bernoulli(const mpq_class& p, Rng& rng);

// Same comparison when the leading 64-bit digit of U was already drawn.
bool uniform_less_than(std::uint64_t leading_digit, const mpz_class& num,
                       const mpz_class& den, Rng& rng);

}  // namespace permgraph
