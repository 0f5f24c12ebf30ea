#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <map>
#include <set>
#include <string>

#include "permgraph/counting.hpp"
#include "permgraph/permutation.hpp"
#include "permgraph/random.hpp"

using namespace permgraph;

namespace {

std::vector<int> inversion_oracle(std::span<const int> w) {
  std::vector<int> x(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] += w[j] > w[i];
  return x;
}

// Connected components of the permutation graph by union-find, as the sorted
// list of component sizes in left-to-right order of their smallest value.
std::vector<std::vector<int>> graph_components(const Permutation& p) {
  const int n = p.size();
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& [a, b] : permutation_graph_edges(p)) parent[find(a)] = find(b);
  std::map<int, std::vector<int>> groups;
  for (int v = 1; v <= n; ++v) groups[find(v)].push_back(v);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> decomposition_oracle(std::span<const int> y) {
  std::vector<int> out;
  const int n = static_cast<int>(y.size());
  for (int j = 1; j < n; ++j) {
    bool ok = true;
    for (int i = 1; i <= n - j; ++i) ok = ok && y[j + i - 1] <= i - 1;
    if (ok) out.push_back(j);
  }
  return out;
}

}  // namespace

TEST_CASE("worked conversion") {
  const auto p = Permutation::parse("231764985");
  CHECK(inversion_sequence(p).to_string() == "002012014");
  CHECK(permutation_from_inversion_sequence(InversionSequence::parse("002012014")) == p);
}

TEST_CASE("worked block example") {
  const auto p = Permutation::parse("24135867");
  const auto b = blocks(p);
  CHECK(b.sizes == std::vector<int>{4, 1, 3});
  CHECK(decomposition_points(inversion_sequence(p)) == std::vector<int>{4, 5});
  const auto edges = permutation_graph_edges(p);
  std::set<std::pair<int, int>> first_block;
  for (const auto& e : edges)
    if (e.second <= 4) first_block.insert(e);
  CHECK(first_block == std::set<std::pair<int, int>>{{1, 2}, {1, 4}, {3, 4}});
  const auto r = block_reversal(p);
  CHECK(inversion_sequence(r).to_string() == "01100021");
  CHECK(blocks(r).sizes == std::vector<int>{3, 1, 4});
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(Permutation({1, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation({0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(InversionSequence({0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(InversionSequence({1}), std::invalid_argument);
  CHECK_THROWS_AS(InversionSequence::parse("0x"), std::invalid_argument);
  auto x = InversionSequence::parse("01");
  CHECK_THROWS_AS(x.increment(2), std::out_of_range);
  CHECK_THROWS_AS(x.increment(3), std::out_of_range);
  CHECK_THROWS_AS(x.increment(1), std::out_of_range);
  CHECK(Permutation::parse("10 2 1 3 4 5 6 7 8 9").at(1) == 10);
  CHECK(InversionSequence::parse("0, 1, 2").total() == 3);
}

TEST_CASE("exhaustive structure for n <= 7") {
  for (int n = 1; n <= 7; ++n) {
    std::vector<int> w(n);
    std::iota(w.begin(), w.end(), 1);
    do {
      const Permutation p(w);
      const auto x = inversion_sequence(p);
      CHECK(x.values().size() == static_cast<std::size_t>(n));
      CHECK(std::equal(x.values().begin(), x.values().end(), inversion_oracle(w).begin()));
      CHECK(permutation_from_inversion_sequence(x) == p);
      const auto pts = decomposition_points(x);
      CHECK(pts == decomposition_oracle(x.values()));
      // Components of the graph are exactly the blocks, as value intervals.
      const auto comps = graph_components(p);
      const auto b = blocks(x);
      REQUIRE(comps.size() == b.sizes.size());
      int start = 1;
      for (std::size_t k = 0; k < comps.size(); ++k) {
        CHECK(comps[k].front() == start);
        CHECK(static_cast<int>(comps[k].size()) == b.sizes[k]);
        CHECK(comps[k].back() == start + b.sizes[k] - 1);
        start += b.sizes[k];
      }
      const auto r = block_reversal(p);
      CHECK(block_reversal(r) == p);
      CHECK(inversion_sequence(r).total() == x.total());
      auto sizes = b.sizes;
      std::reverse(sizes.begin(), sizes.end());
      CHECK(blocks(r).sizes == sizes);
    } while (std::next_permutation(w.begin(), w.end()));
  }
}

TEST_CASE("random round trips at moderate n") {
  Rng rng(7, 0);
  for (int n : {1, 2, 50, 2000}) {
    std::vector<int> w(n);
    std::iota(w.begin(), w.end(), 1);
    std::shuffle(w.begin(), w.end(), rng);
    const Permutation p(w);
    const auto x = inversion_sequence(p);
    CHECK(std::equal(x.values().begin(), x.values().end(), inversion_oracle(w).begin()));
    CHECK(permutation_from_inversion_sequence(x) == p);
    CHECK(decomposition_points(x) == decomposition_oracle(x.values()));
  }
}

TEST_CASE("large round trip") {
  Rng rng(11, 3);
  const int n = 200000;
  std::vector<int> w(n);
  std::iota(w.begin(), w.end(), 1);
  std::shuffle(w.begin(), w.end(), rng);
  const Permutation p(w);
  CHECK(permutation_from_inversion_sequence(inversion_sequence(p)) == p);
  CHECK(inversion_sequence(Permutation::identity(n)).total() == 0);
}

TEST_CASE("decomposition points of general sequences") {
  const std::vector<int> zeros(6, 0);
  CHECK(decomposition_points(zeros) == std::vector<int>{1, 2, 3, 4, 5});
  const std::vector<int> big{0, 9, 9, 9};
  CHECK(decomposition_points(big).empty());
  Rng rng(5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> y(30);
    for (auto& v : y) v = static_cast<int>(rng.below(4));
    CHECK(decomposition_points(y) == decomposition_oracle(y));
  }
}

TEST_CASE("enumeration in colex order") {
  const auto all = inversion_sequences(4, 2);
  std::vector<std::string> names;
  for (const auto& x : all) names.push_back(x.to_string());
  CHECK(names == std::vector<std::string>{"0110", "0020", "0101", "0011", "0002"});
  const auto table = build_table(7);
  for (int n = 1; n <= 7; ++n)
    for (std::int64_t m = 0; m <= max_inversions(n); ++m) {
      const auto xs = inversion_sequences(n, m);
      CHECK(BigInt(static_cast<long>(xs.size())) == table.count(n, m));
      for (std::size_t i = 1; i < xs.size(); ++i) CHECK(colex_less(xs[i - 1].values(), xs[i].values()));
      for (const auto& x : xs) CHECK(x.total() == m);
    }
  CHECK(inversion_sequences(3, 4).empty());
}

TEST_CASE("fenwick order statistics") {
  FenwickTree f(10);
  f.fill_ones();
  CHECK(f.prefix(10) == 10);
  f.add(3, -1);
  CHECK(f.find_kth(3) == 4);
  CHECK(f.find_kth(1) == 1);
  CHECK(f.find_kth(9) == 10);
}
