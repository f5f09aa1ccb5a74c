#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "linext/matgen.hpp"

namespace linext {

namespace {

// One fixed primitive polynomial per field degree; frozen in
// docs/FORMATS.md so BCH matrices regenerate identically everywhere.
// Bit i is the coefficient of x^i.
constexpr uint32_t kPrimitivePoly[17] = {
    0, 0,
    0x7,      // x^2 + x + 1
    0xB,      // x^3 + x + 1
    0x13,     // x^4 + x + 1
    0x25,     // x^5 + x^2 + 1
    0x43,     // x^6 + x + 1
    0x83,     // x^7 + x + 1
    0x171,    // x^8 + x^6 + x^5 + x^4 + 1
    0x211,    // x^9 + x^4 + 1
    0x409,    // x^10 + x^3 + 1
    0x805,    // x^11 + x^2 + 1
    0x1099,   // x^12 + x^7 + x^4 + x^3 + 1
    0x201B,   // x^13 + x^4 + x^3 + x + 1
    0x5803,   // x^14 + x^12 + x^11 + x + 1
    0x8003,   // x^15 + x + 1
    0x1002D,  // x^16 + x^5 + x^3 + x^2 + 1
};

struct Gf2m {
  unsigned kappa;
  uint32_t n;  // 2^kappa - 1
  std::vector<uint32_t> alpha_to;  // alpha_to[i] = alpha^i, i in [0, n)
  std::vector<int32_t> index_of;   // inverse, index_of[0] = -1

  explicit Gf2m(unsigned k) : kappa(k), n((1u << k) - 1) {
    const uint32_t poly = kPrimitivePoly[k];
    alpha_to.assign(n, 0);
    index_of.assign(n + 1, -1);
    uint32_t x = 1;
    for (uint32_t i = 0; i < n; ++i) {
      alpha_to[i] = x;
      if (index_of[x] != -1)
        throw std::logic_error("primitive polynomial table entry is not primitive");
      index_of[x] = static_cast<int32_t>(i);
      x <<= 1;
      if (x >> k) x ^= poly;
    }
    if (x != 1)
      throw std::logic_error("primitive polynomial table entry is not primitive");
  }

  uint32_t mul(uint32_t a, uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    return alpha_to[(static_cast<uint32_t>(index_of[a]) +
                     static_cast<uint32_t>(index_of[b])) % n];
  }
};

// Minimal polynomial of alpha^s: product of (x + alpha^j) over the
// cyclotomic coset of s. Coefficients land in GF(2).
std::vector<uint8_t> minimal_polynomial(const Gf2m& field, uint32_t s) {
  std::set<uint32_t> coset;
  uint32_t c = s % field.n;
  while (!coset.count(c)) {
    coset.insert(c);
    c = (c * 2) % field.n;
  }
  std::vector<uint32_t> poly{1};  // in GF(2^kappa), low degree first
  for (uint32_t j : coset) {
    const uint32_t a = field.alpha_to[j];
    std::vector<uint32_t> next(poly.size() + 1, 0);
    for (size_t d = 0; d < poly.size(); ++d) {
      next[d + 1] ^= poly[d];
      next[d] ^= field.mul(poly[d], a);
    }
    poly = std::move(next);
  }
  std::vector<uint8_t> out(poly.size());
  for (size_t d = 0; d < poly.size(); ++d) {
    if (poly[d] > 1)
      throw std::logic_error("minimal polynomial has a coefficient outside GF(2)");
    out[d] = static_cast<uint8_t>(poly[d]);
  }
  return out;
}

std::vector<uint8_t> poly_mul_gf2(const std::vector<uint8_t>& a,
                                  const std::vector<uint8_t>& b) {
  std::vector<uint8_t> out(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i])
      for (size_t j = 0; j < b.size(); ++j) out[i + j] ^= b[j];
  return out;
}

}  // namespace

uint32_t primitive_polynomial(unsigned kappa) {
  if (kappa < 2 || kappa > 16)
    throw std::invalid_argument("kappa must be in [2, 16], got " +
                                std::to_string(kappa));
  return kPrimitivePoly[kappa];
}

BchCode bch_code(unsigned kappa, unsigned t) {
  primitive_polynomial(kappa);  // range check
  if (t < 1) throw std::invalid_argument("t must be at least 1");

  const Gf2m field(kappa);
  const uint32_t n = field.n;

  // lcm of minimal polynomials of alpha^1 .. alpha^2t = product over
  // distinct cyclotomic cosets
  std::set<uint32_t> seen_representatives;
  std::vector<uint8_t> g{1};
  for (uint32_t s = 1; s <= 2 * t; ++s) {
    uint32_t rep = s % n;
    uint32_t c = rep;
    do {
      c = (c * 2) % n;
      rep = std::min(rep, c);
    } while (c != s % n);
    if (!seen_representatives.insert(rep).second) continue;
    g = poly_mul_gf2(g, minimal_polynomial(field, s));
    if (g.size() - 1 >= n)
      throw std::invalid_argument(
          "code has zero dimension: deg(g) >= n for kappa=" +
          std::to_string(kappa) + ", t=" + std::to_string(t));
  }

  BchCode code;
  code.kappa = kappa;
  code.t = t;
  code.n = n;
  code.m = n - (g.size() - 1);
  code.generator = std::move(g);
  return code;
}

std::string BchCode::generator_string() const {
  std::string s(generator.size(), '0');
  for (size_t i = 0; i < generator.size(); ++i)
    if (generator[i]) s[generator.size() - 1 - i] = '1';
  return s;
}

TransformMatrix bch_generator(unsigned kappa, unsigned t) {
  const BchCode code = bch_code(kappa, t);

  TransformMatrix out;
  out.kind = MatrixKind::bch;
  out.bch = BchParams{kappa, t};
  out.matrix = BitMatrix(code.n, code.m);
  // column j = coefficients of x^j * g(x)
  for (size_t j = 0; j < code.m; ++j)
    for (size_t d = 0; d < code.generator.size(); ++d)
      if (code.generator[d]) out.matrix.set(j + d, j, true);
  return out;
}

}  // namespace linext
