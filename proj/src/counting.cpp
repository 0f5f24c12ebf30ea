#include "permgraph/counting.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace permgraph {

namespace {

const BigInt& zero_big() {
  static const BigInt z = 0;
  return z;
}

constexpr std::array<char, 8> kMagic = {'M', 'A', 'H', 'O', 'N', 'T', 'B', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("inversion table: truncated input");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void InversionTable::check_row(int n) const {
  if (n < 1 || n > max_n_)
    throw std::out_of_range("inversion table: n=" + std::to_string(n) + " outside [1, " +
                            std::to_string(max_n_) + "]");
}

std::int64_t InversionTable::stored_end(int n) const {
  return static_cast<std::int64_t>(rows_[n - 1].size()) - 1;
}

std::span<const BigInt> InversionTable::row(int n) const {
  check_row(n);
  return rows_[n - 1];
}

bool InversionTable::covers(int n, std::int64_t m) const {
  if (n < 1 || n > max_n_) return false;
  const std::int64_t total = max_inversions(n);
  if (m < 0 || m > total) return true;
  return m <= stored_end(n) || total - m <= stored_end(n);
}

const BigInt& InversionTable::count(int n, std::int64_t m) const {
  check_row(n);
  const std::int64_t total = max_inversions(n);
  if (m < 0 || m > total) return zero_big();
  const std::int64_t end = stored_end(n);
  if (m <= end) return rows_[n - 1][m];
  if (total - m <= end) return rows_[n - 1][total - m];
  throw std::out_of_range("inversion table: s(" + std::to_string(n) + ", " + std::to_string(m) +
                          ") beyond budget cap");
}

const BigInt& InversionTable::prefix_ref(int n, std::int64_t m) const {
  check_row(n);
  if (m < 0) return zero_big();
  if (m >= max_inversions(n)) return factorials_[n - 1];
  if (m <= stored_end(n)) return prefixes_[n - 1][m];
  throw std::out_of_range("inversion table: prefix beyond budget cap");
}

BigInt InversionTable::prefix(int n, std::int64_t m) const {
  check_row(n);
  const std::int64_t total = max_inversions(n);
  if (m < 0 || m >= total || m <= stored_end(n)) return prefix_ref(n, m);
  const std::int64_t mirror = total - m - 1;
  if (mirror <= stored_end(n)) return factorials_[n - 1] - prefixes_[n - 1][mirror];
  throw std::out_of_range("inversion table: prefix beyond budget cap");
}

void InversionTable::rebuild_prefixes() {
  prefixes_.assign(rows_.size(), {});
  factorials_.assign(rows_.size(), BigInt(1));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    auto& acc = prefixes_[i];
    acc.resize(rows_[i].size());
    BigInt running = 0;
    for (std::size_t m = 0; m < rows_[i].size(); ++m) {
      running += rows_[i][m];
      acc[m] = running;
    }
    if (i > 0) factorials_[i] = factorials_[i - 1] * static_cast<unsigned long>(i + 1);
  }
}

InversionTable build_table(int max_n, std::uint64_t budget_cap) {
  if (max_n < 1) throw std::invalid_argument("build_table: max_n must be at least 1");
  InversionTable t;
  t.max_n_ = max_n;
  t.cap_ = budget_cap;
  t.rows_.resize(max_n);
  t.rows_[0] = {BigInt(1)};
  for (int n = 2; n <= max_n; ++n) {
    const auto total = static_cast<std::uint64_t>(max_inversions(n));
    const auto end = static_cast<std::int64_t>(std::min(total, budget_cap));
    const auto& prev = t.rows_[n - 2];
    const auto prev_end = static_cast<std::int64_t>(prev.size()) - 1;
    auto& row = t.rows_[n - 1];
    row.resize(end + 1);
    // s(n, m) = sum_{j=0}^{n-1} s(n-1, m-j), kept as a sliding window.
    BigInt window = 0;
    for (std::int64_t m = 0; m <= end; ++m) {
      if (m <= prev_end) window += prev[m];
      const std::int64_t drop = m - n;
      if (drop >= 0 && drop <= prev_end) window -= prev[drop];
      row[m] = window;
    }
  }
  t.rebuild_prefixes();
  return t;
}

void InversionTable::save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, kFormatVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(max_n_));
  write_le<std::uint64_t>(out, cap_);
  std::vector<unsigned char> buf;
  for (const auto& row : rows_) {
    write_le<std::uint64_t>(out, row.size());
    for (const auto& v : row) {
      const std::size_t bytes = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
      buf.assign(bytes, 0);
      std::size_t written = 0;
      mpz_export(buf.data(), &written, -1, 1, -1, 0, v.get_mpz_t());
      write_le<std::uint32_t>(out, static_cast<std::uint32_t>(written));
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(written));
    }
  }
  if (!out) throw std::runtime_error("inversion table: write failed");
}

InversionTable InversionTable::load(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("inversion table: bad magic");
  if (read_le<std::uint32_t>(in) != kFormatVersion)
    throw std::runtime_error("inversion table: unsupported format version");
  InversionTable t;
  t.max_n_ = static_cast<int>(read_le<std::uint32_t>(in));
  t.cap_ = read_le<std::uint64_t>(in);
  if (t.max_n_ < 1) throw std::runtime_error("inversion table: bad max_n");
  t.rows_.resize(t.max_n_);
  std::vector<unsigned char> buf;
  for (int n = 1; n <= t.max_n_; ++n) {
    const auto entries = read_le<std::uint64_t>(in);
    const auto expected = std::min<std::uint64_t>(max_inversions(n), t.cap_) + 1;
    if (entries != expected) throw std::runtime_error("inversion table: row length mismatch");
    auto& row = t.rows_[n - 1];
    row.resize(entries);
    for (auto& v : row) {
      const auto bytes = read_le<std::uint32_t>(in);
      buf.resize(bytes);
      in.read(reinterpret_cast<char*>(buf.data()), bytes);
      if (!in) throw std::runtime_error("inversion table: truncated input");
      mpz_import(v.get_mpz_t(), bytes, -1, 1, -1, 0, buf.data());
    }
  }
  t.rebuild_prefixes();
  return t;
}

std::vector<BigInt> mahonian_polynomial(int n) {
  if (n < 1) throw std::invalid_argument("mahonian_polynomial: n must be at least 1");
  std::vector<BigInt> poly{BigInt(1)};
  for (int i = 2; i <= n; ++i) {
    std::vector<BigInt> next(poly.size() + i - 1);
    for (std::size_t a = 0; a < poly.size(); ++a)
      for (int b = 0; b < i; ++b) next[a + b] += poly[a];
    poly = std::move(next);
  }
  return poly;
}

}  // namespace permgraph
