#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "permgraph/asymptotics.hpp"
#include "permgraph/counting.hpp"
#include "permgraph/coupling.hpp"
#include "permgraph/experiments.hpp"
#include "permgraph/permutation.hpp"
#include "permgraph/sampler.hpp"
#include "permgraph/stats.hpp"

using namespace permgraph;

namespace {

constexpr std::uint64_t kSeed = 20241016;

Rational q(long a, long b) { return make_rational(BigInt(a), BigInt(b)); }

std::shared_ptr<const InversionTable> shared_table(int n) {
  return std::make_shared<const InversionTable>(build_table(n));
}

// Collects failed sub-checks of one criterion.
struct Check {
  std::vector<std::string> failures;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
    else if (!ok) failures.back() = "...";
  }
};

struct Criterion {
  std::string name;
  std::string title;
  double limit_seconds;  // 0: no hard limit
  std::function<void(Check&)> run;
};

void exact_counting(Check& c) {
  const auto t12 = build_table(12);
  c.expect(t12.row(3).size() == 4 && t12.count(3, 0) == 1 && t12.count(3, 1) == 2 && t12.count(3, 2) == 2 &&
               t12.count(3, 3) == 1,
           "s(3,.) != 1 2 2 1");
  c.expect(t12.count(4, 2) == 5, "s(4,2) != 5");
  c.expect(t12.count(4, 3) == 6, "s(4,3) != 6");

  const auto t = build_table(40);
  BigInt fact = 1;
  for (int n = 1; n <= 40; ++n) {
    fact *= n;
    const auto row = t.row(n);
    const auto poly = mahonian_polynomial(n);
    const std::int64_t top = max_inversions(n);
    c.expect(std::equal(row.begin(), row.end(), poly.begin(), poly.end()), "row " + std::to_string(n) + " != polynomial");
    BigInt sum = 0;
    for (std::int64_t m = 0; m <= top; ++m) {
      sum += row[m];
      if (row[m] != row[top - m]) c.expect(false, "asymmetric row " + std::to_string(n));
      if (m > 0 && m < top && row[m] * row[m] < row[m - 1] * row[m + 1])
        c.expect(false, "not log-concave at n=" + std::to_string(n) + " m=" + std::to_string(m));
    }
    c.expect(sum == fact, "row sum != n! at n=" + std::to_string(n));
  }
  c.detail << "rows 1..40 checked";
}

void beta_construction(Check& c) {
  const auto t = build_table(7);
  c.expect(solve_betas(4, 2, t).betas == std::vector<Rational>{q(7, 12), q(9, 12), q(10, 12)}, "beta(4,2)");

  // Displayed transition matrix from X(4,2) to X(4,3).
  const BetaTable b4(shared_table(4));
  const auto rho = materialize_rho(4, 2, b4);
  std::map<std::pair<std::string, std::string>, Rational> got;
  for (std::size_t i = 0; i < rho.rows.size(); ++i)
    for (const auto& [col, p] : rho.entries[i]) got[{rho.rows[i].to_string(), rho.cols[col].to_string()}] = p;
  const std::map<std::pair<std::string, std::string>, Rational> want{
      {{"0110", "0120"}, q(5, 12)}, {{"0110", "0111"}, q(7, 12)}, {{"0020", "0120"}, q(5, 12)},
      {{"0020", "0021"}, q(7, 12)}, {{"0101", "0111"}, q(3, 12)}, {{"0101", "0102"}, q(9, 12)},
      {{"0011", "0021"}, q(3, 12)}, {{"0011", "0012"}, q(9, 12)}, {{"0002", "0102"}, q(1, 12)},
      {{"0002", "0012"}, q(1, 12)}, {{"0002", "0003"}, q(10, 12)}};
  c.expect(got == want, "rho(4,2) entries");
  c.expect(rho.rows.size() == 5 && rho.cols.size() == 6, "rho(4,2) shape");

  int matrices = 0;
  for (int n = 2; n <= 7; ++n) {
    const BetaTable betas(shared_table(n));
    for (std::int64_t m = 0; m < max_inversions(n); ++m) {
      for (const auto& beta : solve_betas(n, m, t).betas)
        if (beta < 0 || beta > 1) c.expect(false, "beta outside [0,1] at n=" + std::to_string(n));
      const auto r = materialize_rho(n, m, betas);
      const Rational col = make_rational(t.count(n, m), t.count(n, m + 1));
      for (const auto& s : r.row_sums())
        if (s != 1) c.expect(false, "row sum at n=" + std::to_string(n) + " m=" + std::to_string(m));
      for (const auto& s : r.col_sums())
        if (s != col) c.expect(false, "column sum at n=" + std::to_string(n) + " m=" + std::to_string(m));
      ++matrices;
    }
  }
  c.detail << matrices << " matrices";
}

void chain_uniformity(Check& c) {
  std::size_t states = 0;
  for (int n = 1; n <= 6; ++n) {
    auto table = shared_table(n);
    const MarkovCoupling chain(table);
    std::map<std::vector<int>, Rational> dist{{std::vector<int>(n, 0), Rational(1)}};
    for (std::int64_t m = 1; m <= max_inversions(n); ++m) {
      std::map<std::vector<int>, Rational> next;
      for (const auto& [v, p] : dist) {
        const auto probs = chain.transition_probabilities(InversionSequence(v));
        for (int k = 1; k <= n; ++k) {
          if (sgn(probs[k - 1]) == 0) continue;
          auto w = v;
          ++w[k - 1];
          next[w] += p * probs[k - 1];
        }
      }
      dist = std::move(next);
      const Rational uniform = make_rational(BigInt(1), table->count(n, m));
      c.expect(BigInt(static_cast<unsigned long>(dist.size())) == table->count(n, m),
               "support size at n=" + std::to_string(n) + " m=" + std::to_string(m));
      for (const auto& [v, p] : dist)
        if (p != uniform) c.expect(false, "non-uniform at n=" + std::to_string(n) + " m=" + std::to_string(m));
      states += dist.size();
    }
  }
  c.detail << states << " level states";
}

// f(n) from n! - f(n) = sum_{i<n} (n-i)! f(i).
std::vector<BigInt> indecomposable_by_recurrence(int n_max) {
  std::vector<BigInt> fact(n_max + 1, 1), f(n_max + 1, 0);
  for (int n = 1; n <= n_max; ++n) fact[n] = fact[n - 1] * n;
  for (int n = 1; n <= n_max; ++n) {
    BigInt s = 0;
    for (int i = 1; i < n; ++i) s += fact[n - i] * f[i];
    f[n] = fact[n] - s;
  }
  return f;
}

void monotonicity(Check& c) {
  const auto report = run_monotonicity_check(8);
  c.expect(report.passed(), "report not passed");
  c.expect(report.monotonicity.size() == 8, "expected rows for n = 1..8");
  const auto f = indecomposable_by_recurrence(8);
  const auto t = build_table(8);
  for (const auto& row : report.monotonicity) {
    const std::string tag = " at n=" + std::to_string(row.n);
    c.expect(row.monotone, "p(n,.) not nondecreasing" + tag);
    c.expect(row.dominated, "block counts not dominated" + tag);
    c.expect(row.totals_match && row.indecomposable_total == f[row.n], "indecomposable total" + tag);
    Rational weighted = 0;
    for (std::int64_t m = 0; m <= max_inversions(row.n); ++m) weighted += row.indecomposable[m] * t.count(row.n, m);
    c.expect(weighted == Rational(f[row.n]), "sum p(n,m) s(n,m) != f(n)" + tag);
  }
  c.detail << "f(8) = " << f[8].get_str();
}

int find(std::vector<int>& parent, int a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

void bijection_structure(Check& c) {
  long perms = 0;
  for (int n = 1; n <= 8; ++n) {
    std::vector<int> w(n);
    std::iota(w.begin(), w.end(), 1);
    std::set<std::vector<int>> images;
    do {
      ++perms;
      const Permutation p(w);
      const auto x = inversion_sequence(p);
      c.expect(permutation_from_inversion_sequence(x) == p, "round trip " + p.to_string());
      images.insert({x.values().begin(), x.values().end()});

      std::vector<int> parent(n + 1);
      std::iota(parent.begin(), parent.end(), 0);
      const auto edges = permutation_graph_edges(p);
      for (const auto& [a, b] : edges) parent[find(parent, a)] = find(parent, b);
      std::map<int, std::vector<int>> comps;
      for (int v = 1; v <= n; ++v) comps[find(parent, v)].push_back(v);
      std::vector<std::vector<int>> ordered;
      for (auto& [root, vs] : comps) ordered.push_back(vs);
      std::sort(ordered.begin(), ordered.end());

      const auto b = blocks(x);
      c.expect((comps.size() == 1) == (b.count() == 1), "connectivity vs indecomposability " + p.to_string());
      c.expect(static_cast<long>(edges.size()) == x.total(), "edge count " + p.to_string());
      bool intervals = ordered.size() == b.sizes.size();
      int start = 1;
      for (std::size_t k = 0; intervals && k < ordered.size(); ++k) {
        const auto& vs = ordered[k];
        intervals = vs.front() == start && static_cast<int>(vs.size()) == b.sizes[k] &&
                    vs.back() - vs.front() + 1 == static_cast<int>(vs.size());
        // positions of a block are the same interval
        for (int pos = start; intervals && pos < start + b.sizes[k]; ++pos)
          intervals = p.at(pos) >= start && p.at(pos) < start + b.sizes[k];
        start += b.sizes[k];
      }
      c.expect(intervals, "components are not the block intervals " + p.to_string());

      const auto r = block_reversal(p);
      c.expect(block_reversal(r) == p, "reversal not an involution " + p.to_string());
      c.expect(inversion_sequence(r).total() == x.total(), "reversal changes inversions " + p.to_string());
      auto sizes = b.sizes;
      std::reverse(sizes.begin(), sizes.end());
      c.expect(blocks(r).sizes == sizes, "reversal block sizes " + p.to_string());
    } while (std::next_permutation(w.begin(), w.end()));
    long fact = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    c.expect(static_cast<long>(images.size()) == fact, "inversion sequences not distinct at n=" + std::to_string(n));
  }
  c.detail << perms << " permutations";
}

ExperimentConfig census(CensusMode mode, std::vector<double> mus) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.n = 100000;
  cfg.mu_list = std::move(mus);
  cfg.trials = 2000;
  cfg.seed = kSeed;
  cfg.parallelism = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return cfg;
}

void poisson_limit(Check& c) {
  const auto report = run_component_census(census(CensusMode::components, {-1.0, 0.0, 1.0}));
  for (const auto& e : report.components) {
    const double mu = e.point.mu.value_or(0);
    const double lambda = e.point.params.lambda;
    const double z = (e.stats.mean - lambda) / e.stats.std_error;
    c.detail << std::setprecision(4) << "\n      mu=" << mu << " lambda=" << lambda << " mean=" << e.stats.mean
             << " (" << z << " se) tv=" << e.tv;
    c.expect(std::abs(z) <= kMeanStdErrors, "mean off by " + std::to_string(z) + " se at mu=" + std::to_string(mu));
    c.expect(e.tv <= kPoissonTvTolerance, "tv " + std::to_string(e.tv) + " at mu=" + std::to_string(mu));
  }
}

void block_limits(Check& c) {
  const auto report = run_block_census(census(CensusMode::blocks, {-3.0}));
  const auto& e = report.blocks.at(0);
  c.detail << std::setprecision(4) << "ks_min=" << e.ks_u.statistic << " ks_max=" << e.ks_v.statistic
           << " first/last p=" << e.first_vs_last.p_value;
  c.expect(e.structure_ok, "block sizes inconsistent");
  c.expect(e.ks_u.statistic <= kBlockKsTolerance, "KS smallest vs Exp(1) " + std::to_string(e.ks_u.statistic));
  c.expect(e.ks_v.statistic <= kBlockKsTolerance, "KS largest vs Gumbel " + std::to_string(e.ks_v.statistic));
  c.expect(e.first_vs_last.p_value > kFirstLastMinPValue, "first vs last p " + std::to_string(e.first_vs_last.p_value));
}

void sampler_correctness(Check& c) {
  const auto t = build_table(6);
  long checked = 0;
  for (int n = 1; n <= 6; ++n)
    for (std::int64_t m = 0; m <= max_inversions(n); ++m) {
      const Rational uniform = make_rational(BigInt(1), t.count(n, m));
      std::set<std::string> seen;
      for (const auto& x : inversion_sequences(n, m)) {
        c.expect(sampling_probability(t, x) == uniform, "probability of " + x.to_string());
        ++checked;
      }
      const long size = t.count(n, m).get_si();
      for (long r = 0; r < size; ++r) seen.insert(unrank_inversion_sequence(t, n, m, BigInt(r)).to_string());
      c.expect(static_cast<long>(seen.size()) == size, "unranking not onto at n=" + std::to_string(n));
    }

  auto table = shared_table(4);
  SamplerContext ctx(table, kSeed, 0);
  std::map<std::string, std::int64_t> counts;
  for (int i = 0; i < 100000; ++i) ++counts[sample_inversion_sequence(4, 2, ctx).to_string()];
  std::vector<std::int64_t> cells;
  for (const auto& x : inversion_sequences(4, 2)) cells.push_back(counts[x.to_string()]);
  const auto chi = chi_square_uniform(cells);
  c.expect(counts.size() == 5, "support of X(4,2)");
  c.expect(chi.p_value > 1e-4, "chi-square p " + std::to_string(chi.p_value));
  c.detail << checked << " sequences exact, chi-square p=" << std::setprecision(4) << chi.p_value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<std::string> only;
  std::vector<std::string> known;
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--known-failures", known, "Criteria reported but excluded from the exit status")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"counting", "exact counting", 10, exact_counting},
      {"betas", "beta construction", 30, beta_construction},
      {"chain", "chain uniformity", 60, chain_uniformity},
      {"monotonicity", "monotonicity", 300, monotonicity},
      {"structure", "bijection and structure", 120, bijection_structure},
      {"poisson", "Poisson limit", 0, poisson_limit},
      {"blocks", "block-size limits", 0, block_limits},
      {"sampler", "sampler correctness", 0, sampler_correctness},
  };

  int failed = 0, known_failed = 0;
  for (const auto& cr : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), cr.name) == only.end()) continue;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.limit_seconds > 0 && secs > cr.limit_seconds)
      check.failures.push_back("runtime " + std::to_string(secs) + " s over " + std::to_string(cr.limit_seconds));
    const bool ok = check.failures.empty();
    const bool expected = std::find(known.begin(), known.end(), cr.name) != known.end();
    std::cout << (ok ? "PASS" : expected ? "FAIL (known)" : "FAIL") << "  " << cr.name << "  " << cr.title << "  ["
              << std::fixed << std::setprecision(1) << secs << " s]" << std::defaultfloat << "  " << check.detail.str()
              << "\n";
    for (const auto& f : check.failures) std::cout << "      - " << f << "\n";
    std::cout.flush();
    if (!ok) ++(expected ? known_failed : failed);
  }
  std::cout << "summary: " << failed << " failed, " << known_failed << " known failures\n";
  return failed == 0 ? 0 : 1;
}
