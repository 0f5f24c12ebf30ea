#include "permgraph/permutation.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "permgraph/counting.hpp"

namespace permgraph {

namespace {

std::vector<int> parse_values(const std::string& text) {
  const bool separated = std::any_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) || c == ',';
  });
  std::vector<int> out;
  if (!separated) {
    for (unsigned char c : text) {
      if (!std::isdigit(c)) throw std::invalid_argument("unexpected character in '" + text + "'");
      out.push_back(c - '0');
    }
    return out;
  }
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad value '" + tok + "'");
    }
    if (used != tok.size()) throw std::invalid_argument("bad value '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::string join_values(std::span<const int> v) {
  const bool compact = std::all_of(v.begin(), v.end(), [](int a) { return a >= 0 && a <= 9; });
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!compact && i > 0) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

Permutation::Permutation(std::vector<int> word) : word_(std::move(word)) {
  const int n = size();
  std::vector<char> seen(n + 1, 0);
  for (int v : word_) {
    if (v < 1 || v > n || seen[v]) throw std::invalid_argument("not a permutation of 1.." + std::to_string(n));
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> w(n);
  std::iota(w.begin(), w.end(), 1);
  return Permutation(std::move(w));
}

Permutation Permutation::parse(const std::string& text) { return Permutation(parse_values(text)); }

std::string Permutation::to_string() const { return join_values(word_); }

InversionSequence::InversionSequence(std::vector<int> values) : values_(std::move(values)) {
  for (int i = 0; i < size(); ++i)
    if (values_[i] < 0 || values_[i] > i)
      throw std::invalid_argument("inversion sequence: coordinate " + std::to_string(i + 1) +
                                  " has value " + std::to_string(values_[i]) + " outside [0, " +
                                  std::to_string(i) + "]");
}

InversionSequence InversionSequence::zeros(int n) { return InversionSequence(std::vector<int>(n, 0)); }

InversionSequence InversionSequence::parse(const std::string& text) {
  return InversionSequence(parse_values(text));
}

std::int64_t InversionSequence::total() const {
  return std::accumulate(values_.begin(), values_.end(), std::int64_t{0});
}

std::string InversionSequence::to_string() const { return join_values(values_); }

void InversionSequence::increment(int i) {
  if (i < 1 || i > size() || values_[i - 1] >= i - 1)
    throw std::out_of_range("inversion sequence: cannot increment coordinate " + std::to_string(i));
  ++values_[i - 1];
}

InversionSequence InversionSequence::reflected() const {
  InversionSequence out = *this;
  for (int i = 0; i < size(); ++i) out.values_[i] = i - values_[i];
  return out;
}

bool colex_less(std::span<const int> a, std::span<const int> b) {
  return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

int BlockDecomposition::smallest() const { return *std::min_element(sizes.begin(), sizes.end()); }
int BlockDecomposition::largest() const { return *std::max_element(sizes.begin(), sizes.end()); }

void FenwickTree::add(int index, int delta) {
  for (; index < static_cast<int>(tree_.size()); index += index & -index) tree_[index] += delta;
}

int FenwickTree::prefix(int index) const {
  int s = 0;
  for (; index > 0; index -= index & -index) s += tree_[index];
  return s;
}

int FenwickTree::find_kth(int k) const {
  int pos = 0;
  int step = 1;
  while (step * 2 <= size()) step *= 2;
  for (; step > 0; step /= 2) {
    if (pos + step <= size() && tree_[pos + step] < k) {
      pos += step;
      k -= tree_[pos];
    }
  }
  return pos + 1;
}

void FenwickTree::fill_ones() {
  const int n = size();
  for (int i = 1; i <= n; ++i) tree_[i] = i & -i;
}

InversionSequence inversion_sequence(const Permutation& p) {
  const int n = p.size();
  FenwickTree seen(n);
  std::vector<int> x(n);
  for (int i = 0; i < n; ++i) {
    const int v = p.word()[i];
    x[i] = i - seen.prefix(v);
    seen.add(v, 1);
  }
  return InversionSequence(std::move(x));
}

Permutation permutation_from_inversion_sequence(const InversionSequence& x) {
  const int n = x.size();
  FenwickTree unused(n);
  unused.fill_ones();
  std::vector<int> w(n);
  // Position t takes the (x_t + 1)-th largest value not used by later positions.
  for (int t = n; t >= 1; --t) {
    const int v = unused.find_kth(t - x.at(t));
    w[t - 1] = v;
    unused.add(v, -1);
  }
  return Permutation(std::move(w));
}

std::vector<int> decomposition_points(std::span<const int> y) {
  const int n = static_cast<int>(y.size());
  std::vector<int> points;
  // j is a point iff j <= k - 1 - y_k for every k > j.
  std::int64_t bound = std::numeric_limits<std::int64_t>::max();
  for (int j = n - 1; j >= 1; --j) {
    bound = std::min<std::int64_t>(bound, static_cast<std::int64_t>(j) - y[j]);
    if (j <= bound) points.push_back(j);
  }
  std::reverse(points.begin(), points.end());
  return points;
}

std::vector<int> decomposition_points(const InversionSequence& x) { return decomposition_points(x.values()); }

BlockDecomposition blocks_from_points(int n, std::span<const int> points) {
  BlockDecomposition b;
  int prev = 0;
  for (int p : points) {
    b.sizes.push_back(p - prev);
    prev = p;
  }
  b.sizes.push_back(n - prev);
  return b;
}

BlockDecomposition blocks(const InversionSequence& x) {
  const auto pts = decomposition_points(x);
  return blocks_from_points(x.size(), pts);
}

BlockDecomposition blocks(const Permutation& p) { return blocks(inversion_sequence(p)); }

std::vector<std::pair<int, int>> permutation_graph_edges(const Permutation& p) {
  std::vector<std::pair<int, int>> edges;
  const auto w = p.word();
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j)
      if (w[i] > w[j]) edges.emplace_back(w[j], w[i]);
  std::sort(edges.begin(), edges.end());
  return edges;
}

Permutation block_reversal(const Permutation& p) {
  const auto x = inversion_sequence(p);
  const auto b = blocks(x);
  std::vector<int> out;
  out.reserve(x.size());
  int end = x.size();
  for (int k = b.count() - 1; k >= 0; --k) {
    const int start = end - b.sizes[k];
    out.insert(out.end(), x.values().begin() + start, x.values().begin() + end);
    end = start;
  }
  return permutation_from_inversion_sequence(InversionSequence(std::move(out)));
}

void for_each_inversion_sequence(int n, std::int64_t m,
                                 const std::function<void(const InversionSequence&)>& fn) {
  if (n < 1) throw std::invalid_argument("for_each_inversion_sequence: n must be at least 1");
  if (m < 0 || m > max_inversions(n)) return;
  std::vector<int> v(n, 0);
  std::function<void(int, std::int64_t)> rec = [&](int k, std::int64_t rem) {
    if (k == 0) {
      fn(InversionSequence(v));
      return;
    }
    const std::int64_t lo = std::max<std::int64_t>(0, rem - max_inversions(k - 1));
    const std::int64_t hi = std::min<std::int64_t>(k - 1, rem);
    for (std::int64_t val = lo; val <= hi; ++val) {
      v[k - 1] = static_cast<int>(val);
      rec(k - 1, rem - val);
    }
    v[k - 1] = 0;
  };
  rec(n, m);
}

std::vector<InversionSequence> inversion_sequences(int n, std::int64_t m) {
  std::vector<InversionSequence> out;
  for_each_inversion_sequence(n, m, [&](const InversionSequence& x) { out.push_back(x); });
  return out;
}

}  // namespace permgraph
