#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "permgraph/counting.hpp"
#include "permgraph/permutation.hpp"
#include "permgraph/random.hpp"
#include "permgraph/sampler.hpp"

namespace permgraph {

// A step from total m is reflected when 2m >= C(n,2); its transitions are
// then the transpose of those from total C(n,2) - 1 - m.
inline bool is_reflected_budget(int n, std::int64_t m) { return 2 * m >= max_inversions(n); }

// Probabilities beta_1 .. beta_r, r = min(n-1, m'+1), that a step from
// total m' raises the last coordinate when its current value is k-1.
// For reflected budgets m' = C(n,2) - 1 - m.
struct BetaSolution {
  int n = 0;
  std::int64_t m = 0;
  bool reflected = false;
  std::int64_t source_budget = 0;
  std::vector<Rational> betas;
};

// Forward recursion over the column balance equations. Throws
// std::logic_error if a value leaves [0, 1] or the last equation fails.
BetaSolution solve_betas(int n, std::int64_t m, const InversionTable& table);

// beta_k at a non-reflected budget from cumulative row sums, independent of
// the other betas.
Rational beta_closed_form(const InversionTable& table, int n, std::int64_t m, int k);

// Thread-safe memo of solve_betas.
class BetaTable {
 public:
  explicit BetaTable(std::shared_ptr<const InversionTable> table) : table_(std::move(table)) {}

  const BetaSolution& get(int n, std::int64_t m) const;
  const InversionTable& counts() const { return *table_; }
  const std::shared_ptr<const InversionTable>& counts_ptr() const { return table_; }

 private:
  std::shared_ptr<const InversionTable> table_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, std::int64_t>, std::unique_ptr<BetaSolution>> memo_;
};

// Transition matrix from totals m to m+1, rows and columns in colex order.
struct RhoMatrix {
  int n = 0;
  std::int64_t m = 0;
  std::vector<InversionSequence> rows;
  std::vector<InversionSequence> cols;
  // Per row: (column index, probability), sorted by column, nonzero only.
  std::vector<std::vector<std::pair<int, Rational>>> entries;

  Rational at(int row, int col) const;
  std::vector<Rational> row_sums() const;
  std::vector<Rational> col_sums() const;
};

inline constexpr int kRhoMaxN = 8;

// Builds the matrix from the block recursion; n is limited to kRhoMaxN.
RhoMatrix materialize_rho(int n, std::int64_t m, const BetaTable& betas);

struct ChainState {
  InversionSequence x;
  std::int64_t t = 0;
};

// Markov chain on inversion sequences that raises the total by one per step
// and keeps the uniform distribution on each level. Transition weights come
// from the counting table in closed form; no matrix is stored.
class MarkovCoupling {
 public:
  explicit MarkovCoupling(std::shared_ptr<const InversionTable> table);

  const InversionTable& table() const { return *table_; }

  // Entry i-1 is the probability of raising coordinate i.
  std::vector<Rational> transition_probabilities(const InversionSequence& x) const;
  // Raises one coordinate of x and returns it (1-based).
  int step(InversionSequence& x, Rng& rng) const;

 private:
  template <typename Decide>
  int walk(const InversionSequence& x, Decide&& decide) const;

  std::shared_ptr<const InversionTable> table_;
};

ChainState chain_step(ChainState state, const BetaTable& betas, SamplerContext& ctx);

// Runs from the zero sequence to total m_target. The context table is used
// when it covers the run; otherwise a capped table is built. If trace is
// given it receives the raised coordinate of every step.
ChainState run_chain(int n, std::int64_t m_target, SamplerContext& ctx, std::vector<int>* trace = nullptr);

}  // namespace permgraph
