#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "linext/gf2.hpp"
#include "linext/matgen.hpp"

namespace linext {

/// Y = X M for one n-bit block.
inline BitVec extract_block(const TransformMatrix& t, const BitVec& x) {
  return matvec(x, t.matrix);
}

enum class StreamMode { accumulate, block };

/// Per-bit streaming extraction. Input bit j (0-based) XORs row (j mod n)
/// of the matrix into the m-bit accumulator V when the bit is one.
///
/// accumulate: V never resets; once more than n bits have arrived, output
/// bits are emitted so that after n + L inputs exactly floor(L*m/n) have
/// been produced, each one read cyclically from V.
///
/// block: after every full block of n inputs, all m bits of V are emitted
/// and V resets, reproducing extract_block exactly.
class StreamExtractor {
 public:
  StreamExtractor(const TransformMatrix& t, StreamMode mode);

  template <class Sink>
  void push(bool bit, Sink&& sink) {
    const size_t row = static_cast<size_t>(bits_in_ % n_);
    if (bit) xor_row(row);
    ++bits_in_;
    if (mode_ == StreamMode::accumulate) {
      if (bits_in_ > n_) {
        const uint64_t due = (bits_in_ - n_) * m_ / n_;
        while (bits_out_ < due) {
          sink(v_.get(static_cast<size_t>(bits_out_ % m_)));
          ++bits_out_;
        }
      }
    } else if (bits_in_ % n_ == 0) {
      for (size_t j = 0; j < m_; ++j) sink(v_.get(j));
      bits_out_ += m_;
      v_.clear();
    }
  }

  uint64_t bits_in() const { return bits_in_; }
  uint64_t bits_out() const { return bits_out_; }
  const BitVec& accumulator() const { return v_; }

 private:
  void xor_row(size_t row) {
    if (use_support_) {
      for (uint32_t c : row_support_[row]) v_.flip(c);
    } else {
      matrix_->xor_row_into(row, v_);
    }
  }

  const BitMatrix* matrix_;
  StreamMode mode_;
  uint64_t n_;
  uint64_t m_;
  BitVec v_;
  uint64_t bits_in_ = 0;
  uint64_t bits_out_ = 0;
  // column-index lists per row, cheaper than word XORs once the mean row
  // weight drops below the word count of a row
  bool use_support_ = false;
  std::vector<std::vector<uint32_t>> row_support_;
};

struct ThroughputReport {
  uint64_t input_bits = 0;
  uint64_t output_bits = 0;
  double seconds = 0.0;
  std::optional<double> input_bits_per_sec;
  std::optional<double> output_bits_per_sec;
};

/// Times accumulate-mode extraction of input_len pseudorandom bits.
ThroughputReport stream_throughput_bench(const TransformMatrix& t,
                                         uint64_t input_len, uint64_t seed);

}  // namespace linext
