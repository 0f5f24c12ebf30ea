#include "permgraph/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace permgraph {

namespace {

void check_budget(int n, std::int64_t m) {
  if (n < 1) throw std::invalid_argument("sampler: n must be at least 1");
  if (m < 0 || m > max_inversions(n))
    throw std::invalid_argument("sampler: budget " + std::to_string(m) + " outside [0, " +
                                std::to_string(max_inversions(n)) + "]");
}

// Unranks against s(., .) for a budget that needs no reflection.
void unrank_into(const InversionTable& table, int n, std::int64_t m, BigInt rank, int* out) {
  std::int64_t b = m;
  for (int len = n; len >= 2; --len) {
    const std::int64_t hi = std::min<std::int64_t>(len - 1, b);
    std::int64_t j = 0;
    for (;; ++j) {
      if (j > hi) throw std::logic_error("unrank: rank exceeds count");
      const BigInt& c = table.count(len - 1, b - j);
      if (rank < c) break;
      rank -= c;
    }
    out[len - 1] = static_cast<int>(j);
    b -= j;
  }
  out[0] = 0;
  if (b != 0 || sgn(rank) != 0) throw std::logic_error("unrank: inconsistent table");
}

void reflect_in_place(std::vector<int>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i) - v[i];
}

double log_big(const BigInt& v) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

// Rough size of a table with rows 1..n and columns 0..cap.
double table_bytes(int n, std::int64_t cap) {
  double bytes = 0;
  double log2_fact = 0;
  for (int len = 1; len <= n; ++len) {
    log2_fact += std::log2(static_cast<double>(len));
    const double entries = static_cast<double>(std::min(max_inversions(len), cap) + 1);
    const double log2_comp = (std::lgamma(static_cast<double>(cap + len)) - std::lgamma(static_cast<double>(len)) -
                              std::lgamma(static_cast<double>(cap + 1))) / std::log(2.0);
    const double bits = std::min(log2_fact, log2_comp);
    bytes += entries * 2.0 * (32.0 + bits / 8.0);
  }
  return bytes;
}

constexpr long double kEnvelopeScale = 1099511627776.0L;  // 2^40
constexpr long double kEnvelopeSlack = 1.0L + 1.0L / 1048576.0L;
constexpr long double kFastMargin = 1e-9L;

}  // namespace

std::int64_t effective_budget(int n, std::int64_t m) {
  const std::int64_t total = max_inversions(n);
  return 2 * m > total ? total - m : m;
}

InversionSequence unrank_inversion_sequence(const InversionTable& table, int n, std::int64_t m,
                                            const BigInt& rank) {
  check_budget(n, m);
  const std::int64_t eff = effective_budget(n, m);
  const BigInt& total = table.count(n, eff);
  if (sgn(rank) < 0 || rank >= total) throw std::out_of_range("unrank: rank outside [0, s(n, m))");
  std::vector<int> v(n);
  unrank_into(table, n, eff, rank, v.data());
  if (eff != m) reflect_in_place(v);
  return InversionSequence(std::move(v));
}

Rational sampling_probability(const InversionTable& table, const InversionSequence& x) {
  const int n = x.size();
  const std::int64_t m = x.total();
  const std::int64_t eff = effective_budget(n, m);
  const InversionSequence path = eff == m ? x : x.reflected();
  Rational p = 1;
  std::int64_t b = eff;
  for (int len = n; len >= 2; --len) {
    const int j = path.at(len);
    p *= make_rational(table.count(len - 1, b - j), table.count(len, b));
    b -= j;
  }
  return p;
}

std::vector<std::int64_t> sample_composition(std::int64_t parts, std::int64_t total, Rng& rng) {
  if (parts < 0 || total < 0) throw std::invalid_argument("sample_composition: negative argument");
  if (parts == 0) {
    if (total != 0) throw std::invalid_argument("sample_composition: positive total with no parts");
    return {};
  }
  // Stars and bars: choose parts-1 bar slots among total+parts-1 (Floyd).
  const std::uint64_t slots = static_cast<std::uint64_t>(total + parts - 1);
  const std::uint64_t bars = static_cast<std::uint64_t>(parts - 1);
  const bool pick_bars = bars <= slots - bars;
  const std::uint64_t pick = pick_bars ? bars : slots - bars;
  std::vector<std::uint64_t> chosen((slots + 63) / 64, 0);
  auto test = [&](std::uint64_t i) { return (chosen[i >> 6] >> (i & 63)) & 1U; };
  auto set = [&](std::uint64_t i) { chosen[i >> 6] |= std::uint64_t{1} << (i & 63); };
  for (std::uint64_t j = slots - pick; j < slots; ++j) {
    const std::uint64_t r = rng.below(j + 1);
    if (test(r)) set(j); else set(r);
  }
  std::vector<std::int64_t> out;
  out.reserve(parts);
  std::int64_t prev = -1;
  for (std::size_t w = 0; w < chosen.size(); ++w) {
    std::uint64_t word = pick_bars ? chosen[w] : ~chosen[w];
    if (w + 1 == chosen.size() && slots % 64 != 0) word &= (std::uint64_t{1} << (slots % 64)) - 1;
    while (word != 0) {
      const auto pos = static_cast<std::int64_t>(64 * w + std::countr_zero(word));
      out.push_back(pos - prev - 1);
      prev = pos;
      word &= word - 1;
    }
  }
  out.push_back(static_cast<std::int64_t>(slots) - prev - 1);
  return out;
}

std::vector<std::int64_t> sample_composition(std::int64_t parts, std::int64_t total, SamplerContext& ctx) {
  return sample_composition(parts, total, ctx.rng());
}

struct InversionSampler::Impl {
  int n = 0;
  std::int64_t m = 0;
  std::int64_t eff = 0;
  bool table_only = true;
  int head = 0;
  std::shared_ptr<const InversionTable> table;

  // Split method: t = total of the tail coordinates.
  std::int64_t tail_parts = 0;
  std::int64_t t_lo = 0;
  std::int64_t t_ref = 0;
  std::vector<long double> rel_log_weight;  // log w(t) - log w(t_ref)
  std::vector<std::uint64_t> envelope;      // G(t) >= 2^40 w(t) / w(t_ref)
  std::vector<std::uint64_t> cumulative;
  bool force_exact = false;
  BigInt ref_weight;  // s(head, eff - t_ref) * C(t_ref + tail_parts - 1, tail_parts - 1)

  BigInt exact_weight(std::int64_t t) const {
    BigInt binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(t + tail_parts - 1),
                 static_cast<unsigned long>(tail_parts - 1));
    return table->count(head, eff - t) * binom;
  }

  bool accept_split(std::size_t idx, Rng& rng) const {
    const std::uint64_t lead = rng();
    if (!force_exact) {
      const long double target = std::exp(rel_log_weight[idx]) * kEnvelopeScale /
                                 (static_cast<long double>(envelope[idx]) * kEnvelopeSlack);
      const long double u = static_cast<long double>(lead) * 0x1.0p-64L;
      if (u < target - kFastMargin) return true;
      if (u > target + kFastMargin) return false;
    }
    // Acceptance probability w(t) 2^60 / (w(t_ref) G(t) (2^20 + 1)).
    const std::int64_t t = t_lo + static_cast<std::int64_t>(idx);
    BigInt num = exact_weight(t) << 60;
    BigInt den = ref_weight * BigInt(static_cast<unsigned long>(envelope[idx])) * BigInt(1048577UL);
    if (num > den) throw std::logic_error("split sampler: envelope below target");
    return uniform_less_than(lead, num, den, rng);
  }

  void sample_split(Rng& rng, std::vector<int>& out) const {
    for (;;) {
      const std::uint64_t r = rng.below(cumulative.back());
      const auto idx = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
      if (!accept_split(idx, rng)) continue;
      const std::int64_t t = t_lo + static_cast<std::int64_t>(idx);
      const auto tail = sample_composition(tail_parts, t, rng);
      bool ok = true;
      for (std::int64_t k = 0; k < tail_parts; ++k) {
        if (tail[k] > head + k) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const std::int64_t head_budget = eff - t;
      const std::int64_t head_eff = effective_budget(head, head_budget);
      const BigInt rank = uniform_below(table->count(head, head_eff), rng);
      unrank_into(*table, head, head_eff, rank, out.data());
      if (head_eff != head_budget)
        for (int i = 0; i < head; ++i) out[i] = i - out[i];
      for (std::int64_t k = 0; k < tail_parts; ++k) out[head + k] = static_cast<int>(tail[k]);
      return;
    }
  }
};

InversionSampler::InversionSampler(int n, std::int64_t m, SamplerOptions options) : impl_(std::make_unique<Impl>()) {
  check_budget(n, m);
  auto& s = *impl_;
  s.n = n;
  s.m = m;
  s.eff = effective_budget(n, m);
  s.force_exact = options.force_exact_split;

  int head = n;
  if (s.eff > 0) {
    const double alpha = static_cast<double>(s.eff) / n;
    const double q = alpha / (1.0 + alpha);
    // Choose the head so that sum_{i > head} q^i / (1 - q) stays below e^-12.
    const double need = std::ceil((std::log(1.0 / (1.0 - q)) + 12.0) / -std::log(q));
    head = static_cast<int>(std::min<double>(n, std::max<double>(options.min_head, need)));
  }
  if (options.head_override > 0) head = std::min(n, options.head_override);
  const bool table_fits = table_bytes(n, s.eff) <= static_cast<double>(options.table_memory_limit);
  const bool can_split = head < n && head <= options.max_head;
  if ((table_fits && !options.force_split) || !can_split) {
    if (!table_fits && !can_split)
      throw std::invalid_argument("sampler: n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                                  " exceeds the table memory limit and the split method range");
    s.table_only = true;
    s.head = n;
    s.table = std::make_shared<const InversionTable>(build_table(n, static_cast<std::uint64_t>(s.eff)));
    return;
  }

  s.table_only = false;
  s.head = head;
  s.tail_parts = n - head;
  const std::int64_t head_max = max_inversions(head);
  s.table = std::make_shared<const InversionTable>(build_table(head, static_cast<std::uint64_t>(head_max / 2 + 1)));
  s.t_lo = std::max<std::int64_t>(0, s.eff - head_max);
  const std::int64_t t_hi = s.eff;
  const auto len = static_cast<std::size_t>(t_hi - s.t_lo + 1);

  std::vector<long double> logw(len);
  long double log_binom = 0;  // relative to t_lo
  for (std::size_t i = 0; i < len; ++i) {
    const std::int64_t t = s.t_lo + static_cast<std::int64_t>(i);
    if (i > 0) log_binom += std::log1p(static_cast<long double>(s.tail_parts - 1) / static_cast<long double>(t));
    logw[i] = log_binom + log_big(s.table->count(head, s.eff - t));
  }
  const auto best = static_cast<std::size_t>(std::max_element(logw.begin(), logw.end()) - logw.begin());
  s.t_ref = s.t_lo + static_cast<std::int64_t>(best);
  s.rel_log_weight.resize(len);
  s.envelope.resize(len);
  s.cumulative.resize(len);
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < len; ++i) {
    s.rel_log_weight[i] = logw[i] - logw[best];
    s.envelope[i] = static_cast<std::uint64_t>(std::floor(kEnvelopeScale * std::exp(s.rel_log_weight[i]))) + 1;
    acc += s.envelope[i];
    s.cumulative[i] = acc;
  }
  s.ref_weight = s.exact_weight(s.t_ref);
}

InversionSampler::~InversionSampler() = default;
InversionSampler::InversionSampler(InversionSampler&&) noexcept = default;
InversionSampler& InversionSampler::operator=(InversionSampler&&) noexcept = default;

InversionSequence InversionSampler::sample(Rng& rng) const {
  const auto& s = *impl_;
  std::vector<int> v(s.n);
  if (s.table_only) {
    const BigInt rank = uniform_below(s.table->count(s.n, s.eff), rng);
    unrank_into(*s.table, s.n, s.eff, rank, v.data());
  } else {
    s.sample_split(rng, v);
  }
  if (s.eff != s.m) reflect_in_place(v);
  return InversionSequence(std::move(v));
}

int InversionSampler::n() const { return impl_->n; }
std::int64_t InversionSampler::m() const { return impl_->m; }
bool InversionSampler::uses_table_only() const { return impl_->table_only; }
int InversionSampler::head_size() const { return impl_->head; }

InversionSequence sample_inversion_sequence(int n, std::int64_t m, SamplerContext& ctx) {
  check_budget(n, m);
  const std::int64_t eff = effective_budget(n, m);
  const auto& table = ctx.table();
  if (table && table->max_n() >= n && static_cast<std::uint64_t>(eff) <= table->budget_cap()) {
    std::vector<int> v(n);
    unrank_into(*table, n, eff, uniform_below(table->count(n, eff), ctx.rng()), v.data());
    if (eff != m) reflect_in_place(v);
    return InversionSequence(std::move(v));
  }
  return InversionSampler(n, m).sample(ctx.rng());
}

}  // namespace permgraph
