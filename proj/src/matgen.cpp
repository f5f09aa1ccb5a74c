#include "linext/matgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "linext/errors.hpp"
#include "linext/rng.hpp"

namespace linext {

namespace {

void check_dims(size_t n, size_t m) {
  if (n < 1 || m < 1)
    throw std::invalid_argument("matrix dimensions must be at least 1");
  if (m > n)
    throw std::invalid_argument("m = " + std::to_string(m) + " exceeds n = " +
                                std::to_string(n) +
                                "; extraction cannot expand");
}

}  // namespace

std::string to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::uniform: return "uniform";
    case MatrixKind::sparse: return "sparse";
    case MatrixKind::fixed_column_weight: return "fixed-column-weight";
    case MatrixKind::bch: return "bch";
  }
  return "unknown";
}

MatrixKind matrix_kind_from_string(const std::string& name) {
  if (name == "uniform") return MatrixKind::uniform;
  if (name == "sparse") return MatrixKind::sparse;
  if (name == "fixed-column-weight") return MatrixKind::fixed_column_weight;
  if (name == "bch") return MatrixKind::bch;
  throw std::invalid_argument("unknown matrix kind: " + name);
}

double default_density(size_t n) {
  if (n < 2) return 0.5;
  const double lg = std::log2(static_cast<double>(n));
  return std::min(0.5, lg * lg / static_cast<double>(n));
}

TransformMatrix gen_uniform(size_t n, size_t m, uint64_t seed) {
  check_dims(n, m);
  TransformMatrix t;
  t.kind = MatrixKind::uniform;
  t.seed = seed;
  t.density = 0.5;
  t.matrix = BitMatrix(n, m);

  SplitMix64 rng(seed);
  const size_t stride = t.matrix.stride();
  const size_t tail_bits = m % 64;
  const uint64_t tail_mask = tail_bits ? (~uint64_t{0} >> (64 - tail_bits)) : ~uint64_t{0};
  for (size_t r = 0; r < n; ++r) {
    auto row = t.matrix.mutable_row_words(r);
    for (size_t w = 0; w < stride; ++w) row[w] = rng.next();
    row[stride - 1] &= tail_mask;
  }
  return t;
}

TransformMatrix gen_sparse(size_t n, size_t m, double p, uint64_t seed) {
  check_dims(n, m);
  if (!(p > 0.0) || p > 0.5)
    throw std::invalid_argument("sparse density p must satisfy 0 < p <= 1/2, got " +
                                std::to_string(p));
  TransformMatrix t;
  t.kind = MatrixKind::sparse;
  t.seed = seed;
  t.density = p;
  t.matrix = BitMatrix(n, m);

  SplitMix64 rng(seed);
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < m; ++c)
      if (rng.next_bernoulli(p)) t.matrix.set(r, c, true);
  return t;
}

TransformMatrix gen_fixed_column_weight(size_t n, size_t m, unsigned k,
                                        uint64_t seed) {
  check_dims(n, m);
  if (k < 1 || k > n)
    throw std::invalid_argument("column weight k must satisfy 1 <= k <= n, got " +
                                std::to_string(k));
  TransformMatrix t;
  t.kind = MatrixKind::fixed_column_weight;
  t.seed = seed;
  t.density = static_cast<double>(k) / static_cast<double>(n);
  t.column_weight = k;
  t.matrix = BitMatrix(n, m);

  SplitMix64 rng(seed);
  std::vector<uint32_t> positions(n);
  for (size_t c = 0; c < m; ++c) {
    std::iota(positions.begin(), positions.end(), 0u);
    // partial Fisher-Yates: the first k entries are a uniform k-subset
    for (unsigned i = 0; i < k; ++i) {
      const uint64_t j = i + rng.next_below(n - i);
      std::swap(positions[i], positions[j]);
      t.matrix.set(positions[i], c, true);
    }
  }
  return t;
}

WeightDistribution weight_distribution(const TransformMatrix& t,
                                       size_t exact_limit,
                                       uint64_t sample_count, uint64_t seed) {
  const size_t n = t.n();
  const size_t m = t.m();
  WeightDistribution dist;
  dist.n = n;
  dist.m = m;
  dist.counts.assign(n + 1, 0);

  // rows of the transpose = columns of the stored matrix, so a Gray-code
  // step updates the image with one row XOR
  const BitMatrix cols = t.matrix.transposed();
  BitVec image(n);

  if (m <= exact_limit) {
    dist.mode = WeightDistribution::Mode::exact;
    dist.counts[0] = 1;  // u = 0
    const uint64_t total = uint64_t{1} << m;
    uint64_t gray = 0;
    for (uint64_t idx = 1; idx < total; ++idx) {
      const uint64_t next_gray = idx ^ (idx >> 1);
      const int flipped = std::countr_zero(gray ^ next_gray);
      gray = next_gray;
      cols.xor_row_into(static_cast<size_t>(flipped), image);
      ++dist.counts[image.popcount()];
    }
    return dist;
  }

  dist.mode = WeightDistribution::Mode::sampled;
  dist.sample_count = sample_count;
  SplitMix64 rng(seed);
  BitVec u(m);
  const size_t tail_bits = m % 64;
  const uint64_t tail_mask = tail_bits ? (~uint64_t{0} >> (64 - tail_bits)) : ~uint64_t{0};
  for (uint64_t s = 0; s < sample_count; ++s) {
    do {
      auto words = u.mutable_words();
      for (size_t w = 0; w < words.size(); ++w) words[w] = rng.next();
      words[words.size() - 1] &= tail_mask;
    } while (!u.any());
    image.clear();
    for (size_t c = 0; c < m; ++c)
      if (u.get(c)) cols.xor_row_into(c, image);
    ++dist.counts[image.popcount()];
  }
  return dist;
}

void write_wdist_csv(const WeightDistribution& dist, std::ostream& out) {
  // log-domain binomial reference: expected count if image weights were
  // exactly Binomial(n, 1/2) over the enumerated/sampled u
  const double n = static_cast<double>(dist.n);
  const double total = dist.mode == WeightDistribution::Mode::exact
                           ? std::exp2(static_cast<double>(dist.m))
                           : static_cast<double>(dist.sample_count);
  out << "weight,count,binomial_reference,relative_deviation\n";
  for (size_t i = 0; i <= dist.n; ++i) {
    const double lchoose = std::lgamma(n + 1) - std::lgamma(static_cast<double>(i) + 1) -
                           std::lgamma(n - static_cast<double>(i) + 1);
    const double reference = total * std::exp(lchoose - n * std::log(2.0));
    const double count = static_cast<double>(dist.counts[i]);
    out << i << ',' << dist.counts[i] << ',' << reference << ',';
    if (reference > 0)
      out << (count - reference) / reference;
    else
      out << 0;
    out << '\n';
  }
}

namespace {

constexpr char kMagic[4] = {'L', 'X', 'M', '1'};
constexpr uint8_t kFormatVersion = 1;

void put_u32(uint8_t* p, uint32_t v) {
  p[0] = static_cast<uint8_t>(v);
  p[1] = static_cast<uint8_t>(v >> 8);
  p[2] = static_cast<uint8_t>(v >> 16);
  p[3] = static_cast<uint8_t>(v >> 24);
}

void put_u64(uint8_t* p, uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}

uint32_t get_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void save_matrix(const TransformMatrix& t, const std::filesystem::path& path) {
  const size_t n = t.n();
  const size_t m = t.m();
  if (n > 0xFFFFFFFFull || m > 0xFFFFFFFFull)
    throw FormatError("matrix too large for file format");

  uint16_t kind_field = 0;
  if (t.kind == MatrixKind::fixed_column_weight) {
    if (t.column_weight > 0xFFFF)
      throw FormatError("column weight exceeds format limit 65535");
    kind_field = static_cast<uint16_t>(t.column_weight);
  } else if (t.kind == MatrixKind::bch) {
    if (!t.bch || t.bch->kappa > 0xFF || t.bch->t > 0xFF)
      throw FormatError("bch parameters exceed format limits");
    kind_field = static_cast<uint16_t>(t.bch->kappa | (t.bch->t << 8));
  }

  uint8_t header[32] = {};
  std::memcpy(header, kMagic, 4);
  header[4] = kFormatVersion;
  header[5] = static_cast<uint8_t>(t.kind);
  header[6] = static_cast<uint8_t>(kind_field);
  header[7] = static_cast<uint8_t>(kind_field >> 8);
  put_u32(header + 8, static_cast<uint32_t>(n));
  put_u32(header + 12, static_cast<uint32_t>(m));
  put_u64(header + 16, t.seed);
  uint64_t density_bits = 0;
  static_assert(sizeof(double) == 8);
  std::memcpy(&density_bits, &t.density, 8);
  put_u64(header + 24, density_bits);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(header), sizeof(header));

  const size_t row_bytes = (m + 7) / 8;
  std::vector<uint8_t> buf(row_bytes);
  for (size_t r = 0; r < n; ++r) {
    std::fill(buf.begin(), buf.end(), 0);
    auto words = t.matrix.row_words(r);
    for (size_t b = 0; b < row_bytes; ++b)
      buf[b] = static_cast<uint8_t>(words[b / 8] >> (8 * (b % 8)));
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(row_bytes));
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

TransformMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  uint8_t header[32];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (in.gcount() != sizeof(header)) throw FormatError("truncated header: " + path.string());
  if (std::memcmp(header, kMagic, 4) != 0)
    throw FormatError("bad magic in " + path.string());
  if (header[4] != kFormatVersion)
    throw FormatError("unsupported format version " + std::to_string(header[4]));
  if (header[5] > static_cast<uint8_t>(MatrixKind::bch))
    throw FormatError("unknown matrix kind tag " + std::to_string(header[5]));

  TransformMatrix t;
  t.kind = static_cast<MatrixKind>(header[5]);
  const uint16_t kind_field =
      static_cast<uint16_t>(header[6] | (static_cast<uint16_t>(header[7]) << 8));
  const uint32_t n = get_u32(header + 8);
  const uint32_t m = get_u32(header + 12);
  if (n < 1 || m < 1) throw FormatError("invalid dimensions in " + path.string());
  t.seed = get_u64(header + 16);
  const uint64_t density_bits = get_u64(header + 24);
  std::memcpy(&t.density, &density_bits, 8);

  if (t.kind == MatrixKind::fixed_column_weight) {
    t.column_weight = kind_field;
  } else if (t.kind == MatrixKind::bch) {
    t.bch = BchParams{static_cast<unsigned>(kind_field & 0xFF),
                      static_cast<unsigned>(kind_field >> 8)};
  }

  t.matrix = BitMatrix(n, m);
  const size_t row_bytes = (m + 7) / 8;
  std::vector<uint8_t> buf(row_bytes);
  const size_t tail_bits = m % 8;
  const uint8_t tail_mask =
      tail_bits ? static_cast<uint8_t>(0xFF << tail_bits) : 0;
  for (size_t r = 0; r < n; ++r) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(row_bytes));
    if (static_cast<size_t>(in.gcount()) != row_bytes)
      throw FormatError("truncated row data: " + path.string());
    if (tail_mask && (buf[row_bytes - 1] & tail_mask))
      throw FormatError("nonzero padding bits in " + path.string());
    auto words = t.matrix.mutable_row_words(r);
    for (size_t b = 0; b < row_bytes; ++b)
      words[b / 8] |= static_cast<uint64_t>(buf[b]) << (8 * (b % 8));
  }
  if (in.get() != std::ifstream::traits_type::eof())
    throw FormatError("trailing bytes after matrix data: " + path.string());
  return t;
}

}  // namespace linext
