#include "linext/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace linext {

namespace {

void check_same_length(size_t a, size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(a) + ", got " + std::to_string(b));
  }
}

}  // namespace

BitVec BitVec::from_string(std::string_view bits) {
  BitVec v(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      v.set(i, true);
    else if (bits[i] != '0')
      throw std::invalid_argument("BitVec::from_string: expected '0'/'1'");
  }
  return v;
}

void BitVec::clear() { std::fill(words_.begin(), words_.end(), 0); }

size_t BitVec::popcount() const {
  size_t total = 0;
  for (uint64_t w : words_) total += static_cast<size_t>(std::popcount(w));
  return total;
}

bool BitVec::any() const {
  for (uint64_t w : words_)
    if (w) return true;
  return false;
}

BitVec& BitVec::operator^=(const BitVec& other) {
  check_same_length(len_, other.len_, "BitVec::operator^=");
  for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

std::string BitVec::to_string() const {
  std::string s(len_, '0');
  for (size_t i = 0; i < len_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

BitMatrix::BitMatrix(size_t rows, size_t cols)
    : rows_(rows), cols_(cols), stride_(BitVec::word_count(cols)) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("BitMatrix: dimensions must be at least 1x1");
  words_.assign(rows_ * stride_, 0);
}

BitMatrix BitMatrix::identity(size_t n) {
  BitMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::string>& rows) {
  if (rows.empty()) throw std::invalid_argument("BitMatrix::from_rows: no rows");
  BitMatrix m(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols())
      throw std::invalid_argument("BitMatrix::from_rows: ragged rows");
    for (size_t c = 0; c < m.cols(); ++c) {
      if (rows[r][c] == '1')
        m.set(r, c, true);
      else if (rows[r][c] != '0')
        throw std::invalid_argument("BitMatrix::from_rows: expected '0'/'1'");
    }
  }
  return m;
}

BitVec BitMatrix::row(size_t r) const {
  BitVec v(cols_);
  auto src = row_words(r);
  std::copy(src.begin(), src.end(), v.mutable_words().begin());
  return v;
}

void BitMatrix::xor_row_into(size_t r, BitVec& acc) const {
  check_same_length(cols_, acc.size(), "BitMatrix::xor_row_into");
  auto src = row_words(r);
  auto dst = acc.mutable_words();
  for (size_t i = 0; i < stride_; ++i) dst[i] ^= src[i];
}

size_t BitMatrix::row_popcount(size_t r) const {
  size_t total = 0;
  for (uint64_t w : row_words(r)) total += static_cast<size_t>(std::popcount(w));
  return total;
}

BitMatrix BitMatrix::transposed() const {
  BitMatrix t(cols_, rows_);
  for (size_t r = 0; r < rows_; ++r) {
    auto src = row_words(r);
    for (size_t wi = 0; wi < stride_; ++wi) {
      uint64_t w = src[wi];
      while (w) {
        const int b = std::countr_zero(w);
        w &= w - 1;
        t.set(wi * 64 + static_cast<size_t>(b), r, true);
      }
    }
  }
  return t;
}

size_t BitMatrix::popcount() const {
  size_t total = 0;
  for (uint64_t w : words_) total += static_cast<size_t>(std::popcount(w));
  return total;
}

BitVec matvec(const BitVec& x, const BitMatrix& m) {
  check_same_length(m.rows(), x.size(), "matvec");
  BitVec y(m.cols());
  auto xw = x.words();
  for (size_t wi = 0; wi < xw.size(); ++wi) {
    uint64_t w = xw[wi];
    while (w) {
      const int b = std::countr_zero(w);
      w &= w - 1;
      m.xor_row_into(wi * 64 + static_cast<size_t>(b), y);
    }
  }
  return y;
}

BitMatrix matmul(const BitMatrix& a, const BitMatrix& m) {
  if (a.cols() != m.rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(m.rows()) + ")");
  }
  BitMatrix out(a.rows(), m.cols());
  for (size_t r = 0; r < a.rows(); ++r) {
    BitVec y = matvec(a.row(r), m);
    auto src = y.words();
    auto dst = out.mutable_row_words(r);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

size_t rank(const BitMatrix& b) {
  std::vector<BitVec> rows;
  rows.reserve(b.rows());
  for (size_t r = 0; r < b.rows(); ++r) rows.push_back(b.row(r));

  size_t rk = 0;
  for (size_t c = 0; c < b.cols() && rk < rows.size(); ++c) {
    size_t pivot = rk;
    while (pivot < rows.size() && !rows[pivot].get(c)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rk], rows[pivot]);
    for (size_t r = 0; r < rows.size(); ++r)
      if (r != rk && rows[r].get(c)) rows[r] ^= rows[rk];
    ++rk;
  }
  return rk;
}

}  // namespace linext
