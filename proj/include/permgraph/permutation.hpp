#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace permgraph {

// One-line notation, values 1..n.
class Permutation {
 public:
  Permutation() = default;
  // Throws std::invalid_argument unless word is a permutation of 1..size.
  explicit Permutation(std::vector<int> word);

  static Permutation identity(int n);
  // Parses "24135867" (single digits) or whitespace/comma separated values.
  static Permutation parse(const std::string& text);

  int size() const { return static_cast<int>(word_.size()); }
  // 1-based position.
  int at(int position) const { return word_[position - 1]; }
  std::span<const int> word() const { return word_; }
  std::string to_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> word_;
};

// x_i = #{j < i : sigma(j) > sigma(i)}, with 0 <= x_i <= i - 1.
class InversionSequence {
 public:
  InversionSequence() = default;
  // Throws std::invalid_argument if some x_i lies outside [0, i-1].
  explicit InversionSequence(std::vector<int> values);

  static InversionSequence zeros(int n);
  // Parses "002012014" (single digits) or whitespace/comma separated values.
  static InversionSequence parse(const std::string& text);

  int size() const { return static_cast<int>(values_.size()); }
  // 1-based coordinate.
  int at(int i) const { return values_[i - 1]; }
  std::span<const int> values() const { return values_; }
  std::int64_t total() const;
  std::string to_string() const;

  // x_i += 1; throws std::out_of_range if that leaves [0, i-1].
  void increment(int i);
  // x_i -> (i-1) - x_i for every coordinate.
  InversionSequence reflected() const;

  friend bool operator==(const InversionSequence&, const InversionSequence&) = default;

 private:
  std::vector<int> values_;
};

// Colexicographic order: compare from the last coordinate down.
bool colex_less(std::span<const int> a, std::span<const int> b);

struct BlockDecomposition {
  // Block sizes left to right; they sum to n.
  std::vector<int> sizes;

  int count() const { return static_cast<int>(sizes.size()); }
  int first() const { return sizes.front(); }
  int last() const { return sizes.back(); }
  int smallest() const;
  int largest() const;
};

InversionSequence inversion_sequence(const Permutation& p);
Permutation permutation_from_inversion_sequence(const InversionSequence& x);

// Positions j in [1, n-1] (increasing) such that y_{j+i} <= i - 1 for every
// i in [1, n-j]. Defined for any nonnegative sequence.
std::vector<int> decomposition_points(std::span<const int> y);
std::vector<int> decomposition_points(const InversionSequence& x);

BlockDecomposition blocks_from_points(int n, std::span<const int> points);
BlockDecomposition blocks(const InversionSequence& x);
BlockDecomposition blocks(const Permutation& p);

// Edges {a, b}, a < b, of the permutation graph: a and b are joined when the
// larger value appears first. Sorted lexicographically.
std::vector<std::pair<int, int>> permutation_graph_edges(const Permutation& p);

// Reverses the order of the blocks while keeping each block's internal
// pattern; an involution preserving inversion count and block multiset.
Permutation block_reversal(const Permutation& p);

// Calls fn on every inversion sequence of length n with total m, in
// colexicographic order.
void for_each_inversion_sequence(int n, std::int64_t m,
                                 const std::function<void(const InversionSequence&)>& fn);
std::vector<InversionSequence> inversion_sequences(int n, std::int64_t m);

// Counts with a Fenwick tree over 1..size.
class FenwickTree {
 public:
  explicit FenwickTree(int size) : tree_(size + 1, 0) {}
  int size() const { return static_cast<int>(tree_.size()) - 1; }
  void add(int index, int delta);
  int prefix(int index) const;
  // Smallest index with prefix(index) >= k; requires 1 <= k <= total.
  int find_kth(int k) const;
  void fill_ones();

 private:
  std::vector<int> tree_;
};

}  // namespace permgraph
