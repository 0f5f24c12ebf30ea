#include "permgraph/coupling.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace permgraph {

namespace {

void check_step_budget(int n, std::int64_t m) {
  if (n < 2) throw std::invalid_argument("coupling: n must be at least 2");
  if (m < 0 || m >= max_inversions(n))
    throw std::invalid_argument("coupling: budget " + std::to_string(m) + " outside [0, " +
                                std::to_string(max_inversions(n) - 1) + "]");
}

// Numerator of beta_{i+1}(len, b); the denominator is s(len, b+1) s(len-1, b-i).
BigInt beta_numerator(const InversionTable& t, int len, std::int64_t b, std::int64_t i) {
  const BigInt below_sum = t.prefix_ref(len - 1, b) - t.prefix_ref(len - 1, b - i - 1);
  const BigInt above_sum = t.prefix_ref(len - 1, b + 1) - t.prefix_ref(len - 1, b - i);
  return below_sum * t.count(len, b + 1) - t.count(len, b) * above_sum;
}

using SparseRows = std::map<std::vector<int>, std::map<std::vector<int>, Rational>>;

std::vector<int> to_vec(const InversionSequence& x) { return {x.values().begin(), x.values().end()}; }

std::vector<int> reflect_vec(std::vector<int> v) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i) - v[i];
  return v;
}

const SparseRows& rho_sparse(int n, std::int64_t m, const BetaTable& betas,
                             std::map<std::pair<int, std::int64_t>, SparseRows>& memo) {
  const auto key = std::make_pair(n, m);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const auto& counts = betas.counts();
  const BetaSolution& sol = betas.get(n, m);
  SparseRows out;
  if (sol.reflected) {
    const SparseRows& src = rho_sparse(n, sol.source_budget, betas, memo);
    const Rational scale = make_rational(counts.count(n, sol.source_budget + 1), counts.count(n, sol.source_budget));
    for (const auto& [row, cols] : src)
      for (const auto& [col, p] : cols) out[reflect_vec(col)][reflect_vec(row)] = p * scale;
  } else {
    for_each_inversion_sequence(n, m, [&](const InversionSequence& x) {
      const std::vector<int> v = to_vec(x);
      auto& dst = out[v];
      const int last = v.back();
      Rational raise = 0;
      if (last + 1 <= n - 1) {
        raise = sol.betas[last];
        if (sgn(raise) != 0) {
          auto up = v;
          ++up.back();
          dst[up] = raise;
        }
      }
      const Rational rest = Rational(1) - raise;
      if (sgn(rest) == 0) return;
      const SparseRows& lower = rho_sparse(n - 1, m - last, betas, memo);
      const std::vector<int> head(v.begin(), v.end() - 1);
      for (const auto& [col, p] : lower.at(head)) {
        auto full = col;
        full.push_back(last);
        dst[full] = rest * p;
      }
    });
  }
  return memo.emplace(key, std::move(out)).first->second;
}

}  // namespace

BetaSolution solve_betas(int n, std::int64_t m, const InversionTable& table) {
  check_step_budget(n, m);
  BetaSolution sol;
  sol.n = n;
  sol.m = m;
  sol.reflected = is_reflected_budget(n, m);
  sol.source_budget = sol.reflected ? max_inversions(n) - 1 - m : m;
  const std::int64_t b = sol.source_budget;
  const int r = static_cast<int>(std::min<std::int64_t>(n - 1, b + 1));
  const Rational gamma = make_rational(table.count(n, b), table.count(n, b + 1));
  // Column i balances: beta_i A_i + (1 - beta_{i+1}) B_i = gamma A_i.
  auto above = [&](int i) { return Rational(table.count(n - 1, b + 1 - i)); };
  auto below = [&](int i) { return Rational(table.count(n - 1, b - i)); };
  Rational prev = 0;
  sol.betas.reserve(r);
  for (int k = 1; k <= r; ++k) {
    Rational beta = Rational(1) - above(k - 1) * (gamma - prev) / below(k - 1);
    beta.canonicalize();
    if (beta < 0 || beta > 1)
      throw std::logic_error("solve_betas: beta_" + std::to_string(k) + " outside [0, 1]");
    sol.betas.push_back(beta);
    prev = beta;
  }
  if (prev * above(r) + below(r) != gamma * above(r))
    throw std::logic_error("solve_betas: final balance equation fails");
  return sol;
}

Rational beta_closed_form(const InversionTable& table, int n, std::int64_t m, int k) {
  check_step_budget(n, m);
  if (is_reflected_budget(n, m)) throw std::invalid_argument("beta_closed_form: reflected budget");
  const int r = static_cast<int>(std::min<std::int64_t>(n - 1, m + 1));
  if (k < 1 || k > r) throw std::out_of_range("beta_closed_form: index outside [1, r]");
  const std::int64_t i = k - 1;
  return make_rational(beta_numerator(table, n, m, i), table.count(n, m + 1) * table.count(n - 1, m - i));
}

const BetaSolution& BetaTable::get(int n, std::int64_t m) const {
  std::lock_guard lock(mutex_);
  auto& slot = memo_[{n, m}];
  if (!slot) slot = std::make_unique<BetaSolution>(solve_betas(n, m, *table_));
  return *slot;
}

Rational RhoMatrix::at(int row, int col) const {
  const auto& r = entries.at(row);
  auto it = std::lower_bound(r.begin(), r.end(), col, [](const auto& e, int c) { return e.first < c; });
  return it != r.end() && it->first == col ? it->second : Rational(0);
}

std::vector<Rational> RhoMatrix::row_sums() const {
  std::vector<Rational> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [c, p] : entries[i]) out[i] += p;
  return out;
}

std::vector<Rational> RhoMatrix::col_sums() const {
  std::vector<Rational> out(cols.size());
  for (const auto& r : entries)
    for (const auto& [c, p] : r) out[c] += p;
  return out;
}

RhoMatrix materialize_rho(int n, std::int64_t m, const BetaTable& betas) {
  if (n > kRhoMaxN) throw std::length_error("materialize_rho: n above " + std::to_string(kRhoMaxN));
  check_step_budget(n, m);
  std::map<std::pair<int, std::int64_t>, SparseRows> memo;
  const SparseRows& sparse = rho_sparse(n, m, betas, memo);
  RhoMatrix out;
  out.n = n;
  out.m = m;
  out.rows = inversion_sequences(n, m);
  out.cols = inversion_sequences(n, m + 1);
  std::map<std::vector<int>, int> col_index;
  for (std::size_t j = 0; j < out.cols.size(); ++j) col_index[to_vec(out.cols[j])] = static_cast<int>(j);
  out.entries.resize(out.rows.size());
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    auto it = sparse.find(to_vec(out.rows[i]));
    if (it == sparse.end()) continue;
    for (const auto& [col, p] : it->second) out.entries[i].emplace_back(col_index.at(col), p);
    std::sort(out.entries[i].begin(), out.entries[i].end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return out;
}

MarkovCoupling::MarkovCoupling(std::shared_ptr<const InversionTable> table) : table_(std::move(table)) {
  if (!table_) throw std::invalid_argument("MarkovCoupling: null table");
}

template <typename Decide>
int MarkovCoupling::walk(const InversionSequence& x, Decide&& decide) const {
  const InversionTable& t = *table_;
  const int n = x.size();
  const std::int64_t total = x.total();
  check_step_budget(n, total);
  if (n > t.max_n()) throw std::out_of_range("chain: table has fewer rows than the state length");
  if (static_cast<std::uint64_t>(total + 1) > t.budget_cap() &&
      static_cast<std::uint64_t>(max_inversions(n)) > t.budget_cap())
    throw std::out_of_range("chain: table budget cap below the next total");

  // Descends through the block recursion. In row mode the walk follows the
  // row of x in rho_{len,b}; in column mode the column of x in rho_{len,b}
  // (reached by a transpose). Reflection flips the coordinates seen below.
  bool flipped = false;
  bool row_mode = true;
  std::int64_t b = total;
  BigInt num;
  BigInt den;
  for (int len = n; len >= 2; --len) {
    const std::int64_t cap = max_inversions(len);
    if (2 * b >= cap) {
      row_mode = !row_mode;
      flipped = !flipped;
      b = cap - 1 - b;
    }
    const int raw = x.at(len);
    const int v = flipped ? len - 1 - raw : raw;
    if (row_mode && v + 1 <= len - 1) {
      num = beta_numerator(t, len, b, v);
      den = t.count(len, b + 1) * t.count(len - 1, b - v);
    } else if (!row_mode && v >= 1) {
      num = beta_numerator(t, len, b, v - 1);
      den = t.count(len, b) * t.count(len - 1, b - (v - 1));
    } else {
      num = 0;
      den = 1;
    }
    if (sgn(num) < 0 || num > den) throw std::logic_error("chain: transition weight outside [0, 1]");
    const bool certain = num == den;
    if (decide(len, num, den) || certain) return len;
    b -= v;
  }
  throw std::logic_error("chain: no coordinate selected");
}

std::vector<Rational> MarkovCoupling::transition_probabilities(const InversionSequence& x) const {
  std::vector<Rational> out(x.size());
  Rational remaining = 1;
  walk(x, [&](int len, const BigInt& num, const BigInt& den) {
    const Rational p = make_rational(num, den);
    out[len - 1] = remaining * p;
    remaining *= Rational(1) - p;
    return false;
  });
  return out;
}

int MarkovCoupling::step(InversionSequence& x, Rng& rng) const {
  const int coord = walk(x, [&](int, const BigInt& num, const BigInt& den) { return bernoulli(num, den, rng); });
  x.increment(coord);
  return coord;
}

ChainState chain_step(ChainState state, const BetaTable& betas, SamplerContext& ctx) {
  MarkovCoupling chain(betas.counts_ptr());
  chain.step(state.x, ctx.rng());
  ++state.t;
  return state;
}

ChainState run_chain(int n, std::int64_t m_target, SamplerContext& ctx, std::vector<int>* trace) {
  if (n < 1) throw std::invalid_argument("run_chain: n must be at least 1");
  if (m_target < 0 || m_target > max_inversions(n))
    throw std::invalid_argument("run_chain: target outside [0, C(n,2)]");
  std::shared_ptr<const InversionTable> table = ctx.table();
  const bool covered = table && table->max_n() >= n &&
                       (table->budget_cap() >= static_cast<std::uint64_t>(m_target) ||
                        table->budget_cap() >= static_cast<std::uint64_t>(max_inversions(n)));
  if (!covered) table = std::make_shared<const InversionTable>(build_table(std::max(n, 1), m_target));
  ChainState state{InversionSequence::zeros(n), 0};
  if (trace) trace->clear();
  if (n < 2) return state;
  MarkovCoupling chain(table);
  while (state.t < m_target) {
    const int c = chain.step(state.x, ctx.rng());
    if (trace) trace->push_back(c);
    ++state.t;
  }
  return state;
}

}  // namespace permgraph
