#include "permgraph/random.hpp"

#include <stdexcept>
#include <vector>

namespace permgraph {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
  unsigned __int128 prod = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(prod);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      prod = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<std::uint64_t>(prod >> 64);
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

mpz_class uniform_below(const mpz_class& bound, Rng& rng) {
  if (sgn(bound) <= 0) throw std::invalid_argument("uniform_below: bound must be positive");
  if (bound.fits_ulong_p()) return mpz_class(static_cast<unsigned long>(rng.below(bound.get_ui())));
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  const unsigned top_bits = static_cast<unsigned>(bits - 64 * (words - 1));
  const std::uint64_t top_mask = top_bits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << top_bits) - 1);
  std::vector<std::uint64_t> buf(words);
  mpz_class out;
  for (;;) {
    for (auto& w : buf) w = rng();
    buf.back() &= top_mask;
    mpz_import(out.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
    if (out < bound) return out;
  }
}

bool uniform_less_than(std::uint64_t digit_u, const mpz_class& num, const mpz_class& den, Rng& rng) {
  if (sgn(num) <= 0) return false;
  if (num >= den) return true;
  mpz_class rem = num;
  mpz_class digit;
  for (;;) {
    rem <<= 64;
    mpz_fdiv_qr(digit.get_mpz_t(), rem.get_mpz_t(), rem.get_mpz_t(), den.get_mpz_t());
    const std::uint64_t d = digit.get_ui();
    if (digit_u < d) return true;
    if (digit_u > d) return false;
    if (sgn(rem) == 0) return false;
    digit_u = rng();
  }
}

bool bernoulli(const mpz_class& num, const mpz_class& den, Rng& rng) {
  if (sgn(num) <= 0) return false;
  if (num >= den) return true;
  return uniform_less_than(rng(), num, den, rng);
}

bool bernoulli(const mpq_class& p, Rng& rng) { return bernoulli(p.get_num(), p.get_den(), rng); }

}  // namespace permgraph
