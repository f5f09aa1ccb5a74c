#include "linext/extract.hpp"

#include <chrono>

#include "linext/rng.hpp"

namespace linext {

StreamExtractor::StreamExtractor(const TransformMatrix& t, StreamMode mode)
    : matrix_(&t.matrix),
      mode_(mode),
      n_(t.n()),
      m_(t.m()),
      v_(t.m()) {
  const size_t words_per_row = matrix_->stride();
  const double mean_row_weight =
      static_cast<double>(matrix_->popcount()) / static_cast<double>(n_);
  use_support_ = mean_row_weight < static_cast<double>(words_per_row);
  if (use_support_) {
    row_support_.resize(n_);
    for (size_t r = 0; r < n_; ++r) {
      auto& support = row_support_[r];
      support.reserve(matrix_->row_popcount(r));
      for (size_t c = 0; c < m_; ++c)
        if (matrix_->get(r, c)) support.push_back(static_cast<uint32_t>(c));
    }
  }
}

ThroughputReport stream_throughput_bench(const TransformMatrix& t,
                                         uint64_t input_len, uint64_t seed) {
  ThroughputReport report;
  report.input_bits = input_len;
  if (input_len == 0) return report;

  StreamExtractor stream(t, StreamMode::accumulate);
  uint64_t out_bits = 0;
  uint64_t parity = 0;  // folded so the output loop cannot be elided
  auto sink = [&](bool bit) {
    ++out_bits;
    parity ^= bit;
  };

  SplitMix64 rng(seed);
  const auto start = std::chrono::steady_clock::now();
  uint64_t word = 0;
  for (uint64_t i = 0; i < input_len; ++i) {
    if ((i & 63) == 0) word = rng.next();
    stream.push((word >> (i & 63)) & 1, sink);
  }
  const auto stop = std::chrono::steady_clock::now();

  report.output_bits = out_bits;
  report.seconds = std::chrono::duration<double>(stop - start).count();
  if (report.seconds > 0.0) {
    report.input_bits_per_sec = static_cast<double>(input_len) / report.seconds;
    report.output_bits_per_sec = static_cast<double>(out_bits) / report.seconds;
  }
  (void)parity;
  return report;
}

}  // namespace linext
