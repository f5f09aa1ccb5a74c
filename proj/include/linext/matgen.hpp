#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "linext/gf2.hpp"

namespace linext {

enum class MatrixKind : uint8_t {
  uniform = 0,
  sparse = 1,
  fixed_column_weight = 2,
  bch = 3,
};

std::string to_string(MatrixKind kind);
MatrixKind matrix_kind_from_string(const std::string& name);

struct BchParams {
  unsigned kappa = 0;  // field degree, n = 2^kappa - 1
  unsigned t = 0;      // designed error count, distance 2t+1
};

/// An n x m transformation matrix plus the parameters that regenerate it.
struct TransformMatrix {
  BitMatrix matrix;
  MatrixKind kind = MatrixKind::uniform;
  uint64_t seed = 0;           // generation seed (0 and unused for bch)
  double density = 0.0;        // nominal per-entry probability of a one
  unsigned column_weight = 0;  // fixed_column_weight only
  std::optional<BchParams> bch;

  size_t n() const { return matrix.rows(); }
  size_t m() const { return matrix.cols(); }
};

/// Default sparse density min(1/2, (log2 n)^2 / n). The asymptotic regime
/// only requires growth faster than log(n)/n; the squared log is the
/// smallest simple exponent strictly inside it.
double default_density(size_t n);

/// Each entry Bernoulli(1/2), drawn word-at-a-time row-major from
/// splitmix64(seed). Requires 1 <= m <= n.
TransformMatrix gen_uniform(size_t n, size_t m, uint64_t seed);

/// Each entry Bernoulli(p), drawn entry-at-a-time row-major. Requires
/// 0 < p <= 1/2 and 1 <= m <= n.
TransformMatrix gen_sparse(size_t n, size_t m, double p, uint64_t seed);

/// Exactly k ones per column, positions drawn without replacement,
/// columns processed left to right. Requires 1 <= k <= n, 1 <= m <= n.
TransformMatrix gen_fixed_column_weight(size_t n, size_t m, unsigned k,
                                        uint64_t seed);

/// Primitive BCH code over GF(2^kappa), designed distance 2t+1. The stored
/// n x m matrix has column j equal to the coefficients of x^j * g(x), i.e.
/// it is the transpose of the code's cyclic generator matrix, so block
/// extraction computes X G^T directly.
TransformMatrix bch_generator(unsigned kappa, unsigned t);

/// Code parameters and generator polynomial without building the matrix.
struct BchCode {
  unsigned kappa = 0;
  unsigned t = 0;
  size_t n = 0;
  size_t m = 0;
  std::vector<uint8_t> generator;  // coefficient of x^i at index i
  size_t degree() const { return generator.size() - 1; }
  std::string generator_string() const;  // highest degree first
};
BchCode bch_code(unsigned kappa, unsigned t);

/// The fixed primitive polynomial for GF(2^kappa), bit i = coeff of x^i.
uint32_t primitive_polynomial(unsigned kappa);

struct WeightDistribution {
  enum class Mode { exact, sampled };
  size_t n = 0;
  size_t m = 0;
  Mode mode = Mode::exact;
  uint64_t sample_count = 0;            // draws when sampled
  std::vector<uint64_t> counts;         // index = weight, size n+1
};

/// Weights of M u^T over input combinations u. If m <= exact_limit all 2^m
/// combinations are enumerated (u = 0 included); otherwise sample_count
/// uniform nonzero u are drawn from splitmix64(seed).
WeightDistribution weight_distribution(const TransformMatrix& t,
                                       size_t exact_limit = 24,
                                       uint64_t sample_count = 1u << 20,
                                       uint64_t seed = 1);

/// CSV with columns weight,count,binomial_reference,relative_deviation.
void write_wdist_csv(const WeightDistribution& dist, std::ostream& out);

/// Binary matrix format (32-byte header + packed rows), see docs/FORMATS.md.
void save_matrix(const TransformMatrix& t, const std::filesystem::path& path);
TransformMatrix load_matrix(const std::filesystem::path& path);

}  // namespace linext
