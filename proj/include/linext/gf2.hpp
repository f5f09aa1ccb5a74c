#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace linext {

/// Packed GF(2) row vector. Bit i lives in word i/64 at position i%64;
/// padding bits past size() are kept zero.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(size_t len) : len_(len), words_(word_count(len), 0) {}

  /// Parse "1011": character j becomes bit j.
  static BitVec from_string(std::string_view bits);

  size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }

  bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  void set(size_t i, bool v) {
    const uint64_t mask = uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  void flip(size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

  void clear();
  size_t popcount() const;
  bool any() const;

  BitVec& operator^=(const BitVec& other);
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  bool operator==(const BitVec&) const = default;

  std::span<const uint64_t> words() const { return words_; }
  std::span<uint64_t> mutable_words() { return words_; }
  std::string to_string() const;

  static size_t word_count(size_t bits) { return (bits + 63) / 64; }

 private:
  size_t len_ = 0;
  std::vector<uint64_t> words_;
};

/// Packed GF(2) matrix, row-major, each row padded to a word boundary.
/// Immutable by convention once built: generators construct, everything
/// downstream only reads.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(size_t rows, size_t cols);

  static BitMatrix identity(size_t n);
  /// One string per row, e.g. {"11", "01", "10"}.
  static BitMatrix from_rows(const std::vector<std::string>& rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  bool get(size_t r, size_t c) const {
    return (words_[r * stride_ + (c >> 6)] >> (c & 63)) & 1;
  }

  void set(size_t r, size_t c, bool v) {
    const uint64_t mask = uint64_t{1} << (c & 63);
    if (v)
      words_[r * stride_ + (c >> 6)] |= mask;
    else
      words_[r * stride_ + (c >> 6)] &= ~mask;
  }

  BitVec row(size_t r) const;
  /// acc ^= row r. acc.size() must equal cols().
  void xor_row_into(size_t r, BitVec& acc) const;
  size_t row_popcount(size_t r) const;

  BitMatrix transposed() const;
  size_t popcount() const;

  std::span<const uint64_t> row_words(size_t r) const {
    return {words_.data() + r * stride_, stride_};
  }
  std::span<uint64_t> mutable_row_words(size_t r) {
    return {words_.data() + r * stride_, stride_};
  }
  size_t stride() const { return stride_; }

  bool operator==(const BitMatrix&) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  size_t stride_ = 0;  // words per row
  std::vector<uint64_t> words_;
};

/// y = x M over GF(2): bit j of y is the parity of x AND column j.
/// Requires x.size() == M.rows().
BitVec matvec(const BitVec& x, const BitMatrix& m);

/// GF(2) product of a (k x n) by (n x m) matrix.
BitMatrix matmul(const BitMatrix& a, const BitMatrix& m);

/// GF(2) rank by Gaussian elimination on a copy; the input is untouched.
size_t rank(const BitMatrix& b);

}  // namespace linext
