#include <doctest.h>

#include <set>
#include <string>

#include "linext/gf2.hpp"
#include "linext/rng.hpp"

using namespace linext;

namespace {

BitMatrix random_matrix(size_t rows, size_t cols, SplitMix64& rng) {
  BitMatrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c)
      if (rng.next() & 1) m.set(r, c, true);
  return m;
}

BitVec random_vec(size_t len, SplitMix64& rng) {
  BitVec v(len);
  for (size_t i = 0; i < len; ++i)
    if (rng.next() & 1) v.set(i, true);
  return v;
}

// independent oracle: y_j = parity of x AND column j, bit by bit
BitVec matvec_oracle(const BitVec& x, const BitMatrix& m) {
  BitVec y(m.cols());
  for (size_t j = 0; j < m.cols(); ++j) {
    bool bit = false;
    for (size_t i = 0; i < m.rows(); ++i) bit ^= x.get(i) && m.get(i, j);
    y.set(j, bit);
  }
  return y;
}

// rank via the size of the row span: 2^rank distinct subset XORs
size_t rank_oracle(const BitMatrix& m) {
  std::set<std::string> span;
  const size_t rows = m.rows();
  REQUIRE(rows <= 16);
  for (uint64_t subset = 0; subset < (uint64_t{1} << rows); ++subset) {
    BitVec acc(m.cols());
    for (size_t r = 0; r < rows; ++r)
      if ((subset >> r) & 1) acc ^= m.row(r);
    span.insert(acc.to_string());
  }
  size_t rank = 0;
  while ((size_t{1} << rank) < span.size()) ++rank;
  CHECK((size_t{1} << rank) == span.size());
  return rank;
}

}  // namespace

TEST_CASE("matvec identity returns the input") {
  const BitVec x = BitVec::from_string("1011");
  CHECK(matvec(x, BitMatrix::identity(4)).to_string() == "1011");
}

TEST_CASE("matvec all-ones columns compute parity") {
  const BitVec x = BitVec::from_string("1111");
  const BitMatrix m = BitMatrix::from_rows({"11", "11", "11", "11"});
  CHECK(matvec(x, m).to_string() == "00");
}

TEST_CASE("matvec small hand instance") {
  const BitVec x = BitVec::from_string("101");
  const BitMatrix m = BitMatrix::from_rows({"11", "01", "10"});
  CHECK(matvec(x, m).to_string() == "01");
  CHECK(matvec(x, m) == matvec_oracle(x, m));
}

TEST_CASE("matvec rejects length mismatch") {
  const BitVec x = BitVec::from_string("101");
  CHECK_THROWS_WITH_AS(matvec(x, BitMatrix::identity(4)),
                       doctest::Contains("expected length 4"),
                       std::invalid_argument);
}

TEST_CASE("matvec agrees with the per-column parity oracle") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 1 + rng.next_below(80);
    const size_t m = 1 + rng.next_below(70);
    const BitMatrix mat = random_matrix(n, m, rng);
    const BitVec x = random_vec(n, rng);
    CHECK(matvec(x, mat) == matvec_oracle(x, mat));
  }
}

TEST_CASE("matvec is linear") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 1 + rng.next_below(64);
    const size_t m = 1 + rng.next_below(64);
    const BitMatrix mat = random_matrix(n, m, rng);
    const BitVec x = random_vec(n, rng);
    const BitVec y = random_vec(n, rng);
    CHECK(matvec(x ^ y, mat) == (matvec(x, mat) ^ matvec(y, mat)));
  }
}

TEST_CASE("matmul identity and parity cases") {
  SplitMix64 rng(3);
  const BitMatrix m = random_matrix(3, 2, rng);
  CHECK(matmul(BitMatrix::identity(3), m) == m);

  const BitMatrix a = BitMatrix::from_rows({"11"});
  const BitMatrix col = BitMatrix::from_rows({"1", "1"});
  CHECK(matmul(a, col).get(0, 0) == false);
}

TEST_CASE("matmul equals row-by-row matvec") {
  SplitMix64 rng(11);
  const BitMatrix a = random_matrix(6, 8, rng);
  const BitMatrix m = random_matrix(8, 5, rng);
  const BitMatrix prod = matmul(a, m);
  for (size_t r = 0; r < 6; ++r) CHECK(prod.row(r) == matvec(a.row(r), m));
  CHECK_THROWS_AS(matmul(m, a), std::invalid_argument);
}

TEST_CASE("matmul is associative") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t d1 = 1 + rng.next_below(10);
    const size_t d2 = 1 + rng.next_below(10);
    const size_t d3 = 1 + rng.next_below(10);
    const size_t d4 = 1 + rng.next_below(10);
    const BitMatrix a = random_matrix(d1, d2, rng);
    const BitMatrix b = random_matrix(d2, d3, rng);
    const BitMatrix c = random_matrix(d3, d4, rng);
    CHECK(matmul(matmul(a, b), c) == matmul(a, matmul(b, c)));
  }
}

TEST_CASE("rank basics") {
  CHECK(rank(BitMatrix::identity(4)) == 4);
  CHECK(rank(BitMatrix::from_rows({"11", "11"})) == 1);
}

TEST_CASE("rank agrees with the span oracle") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const BitMatrix m = random_matrix(10, 10, rng);
    CHECK(rank(m) == rank_oracle(m));
  }
}

TEST_CASE("rank is invariant under transpose") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t rows = 1 + rng.next_below(32);
    const size_t cols = 1 + rng.next_below(32);
    const BitMatrix m = random_matrix(rows, cols, rng);
    CHECK(rank(m) == rank(m.transposed()));
  }
}

TEST_CASE("bitvec padding stays zero") {
  SplitMix64 rng(23);
  BitVec v = random_vec(70, rng);
  BitVec w = random_vec(70, rng);
  v ^= w;
  v.set(69, true);
  v.flip(68);
  CHECK((v.words()[1] >> 6) == 0);
  CHECK(BitVec::from_string(v.to_string()) == v);
}

TEST_CASE("transpose round trip") {
  SplitMix64 rng(29);
  const BitMatrix m = random_matrix(23, 41, rng);
  CHECK(m.transposed().transposed() == m);
}
