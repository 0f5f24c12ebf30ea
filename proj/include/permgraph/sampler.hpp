#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "permgraph/counting.hpp"
#include "permgraph/permutation.hpp"
#include "permgraph/random.hpp"

namespace permgraph {

// Shared counting table (may be null) plus the random stream of one trial.
class SamplerContext {
 public:
  SamplerContext(std::shared_ptr<const InversionTable> table, std::uint64_t seed, std::uint64_t stream_id)
      : table_(std::move(table)), rng_(seed, stream_id), seed_(seed), stream_id_(stream_id) {}

  const std::shared_ptr<const InversionTable>& table() const { return table_; }
  Rng& rng() { return rng_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::shared_ptr<const InversionTable> table_;
  Rng rng_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

// Budgets above half the maximum are sampled through the reflection
// x_i -> (i-1) - x_i, so a table needs columns up to min(m, C(n,2) - m).
std::int64_t effective_budget(int n, std::int64_t m);

// Bijection from [0, s(n, m)) onto the inversion sequences of length n with
// total m.
InversionSequence unrank_inversion_sequence(const InversionTable& table, int n, std::int64_t m,
                                            const BigInt& rank);

// Probability that the table-driven sampler emits x, as the product of its
// per-coordinate conditionals.
Rational sampling_probability(const InversionTable& table, const InversionSequence& x);

// Uniform weak composition of total into parts nonnegative parts.
std::vector<std::int64_t> sample_composition(std::int64_t parts, std::int64_t total, Rng& rng);
std::vector<std::int64_t> sample_composition(std::int64_t parts, std::int64_t total, SamplerContext& ctx);

struct SamplerOptions {
  // Largest counting table the sampler may build for the direct method.
  std::uint64_t table_memory_limit = std::uint64_t{256} << 20;
  // Head length bounds for the split method.
  int min_head = 16;
  int max_head = 160;
  // Fixed head length (testing); 0 picks it from the budget density.
  int head_override = 0;
  // Always settle the split acceptance with exact arithmetic.
  bool force_exact_split = false;
  // Never use the direct method (testing).
  bool force_split = false;
};

// Exactly uniform sampler over inversion sequences of length n with total m.
// Small instances unrank a uniform integer against a counting table. Large
// ones sample the first coordinates from a table and the rest as a uniform
// composition with rejection on the coordinate bounds.
class InversionSampler {
 public:
  InversionSampler(int n, std::int64_t m, SamplerOptions options = {});
  ~InversionSampler();
  InversionSampler(InversionSampler&&) noexcept;
  InversionSampler& operator=(InversionSampler&&) noexcept;

  InversionSequence sample(Rng& rng) const;

  int n() const;
  std::int64_t m() const;
  bool uses_table_only() const;
  int head_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Uses ctx.table() when it covers (n, m); otherwise builds a sampler.
InversionSequence sample_inversion_sequence(int n, std::int64_t m, SamplerContext& ctx);

}  // namespace permgraph
