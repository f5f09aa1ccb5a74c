#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "linext/gf2.hpp"

namespace linext {

/// n independent bits, bit i one with probability biases[i].
struct Independent {
  std::vector<double> biases;
};

/// Independent bits with every probability inside [1/2 - e/2, 1/2 + e/2].
/// When no biases are materialized the adversarial worst case (all
/// probabilities at 1/2 + e/2) is used for sampling and exact analysis.
struct BoundedBias {
  size_t n = 0;
  double e = 0.0;
  std::optional<std::vector<double>> biases;
};

/// Order-1 Markov bits: both conditional one-probabilities lie inside
/// [1/2 - epsilon/2, 1/2 + epsilon/2].
struct Markov1 {
  size_t n = 0;
  double epsilon = 0.0;
  double p_one_after_zero = 0.5;
  double p_one_after_one = 0.5;
  double p_init = 0.5;
};

/// Bits under fixed_mask are frozen to fixed_values; the rest are
/// unbiased and independent.
struct ObliviousBitFixing {
  BitVec fixed_mask;
  BitVec fixed_values;
};

/// X = Z A with Z uniform on {0,1}^k; A is k x n and embeds an identity
/// (k of its columns are a permutation of I_k).
struct NonObliviousBitFixing {
  BitMatrix a;
};

/// X = Z A with A full-rank k x n and Z an inner source of length k.
struct LinearSubspace {
  std::variant<Independent, Markov1> inner;
  BitMatrix a;
};

/// Validated tagged union over the source models. Construction checks all
/// model invariants; sampling never fails afterwards.
class SourceSpec {
 public:
  using Model = std::variant<Independent, BoundedBias, Markov1,
                             ObliviousBitFixing, NonObliviousBitFixing,
                             LinearSubspace>;

  explicit SourceSpec(Model model);

  const Model& model() const { return model_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&model_);
  }

  /// Output length n of sampled vectors.
  size_t bit_length() const;
  std::string model_name() const;

 private:
  Model model_;
};

/// One draw, deterministic per (spec, seed). Draw orders are frozen in
/// docs/FORMATS.md.
BitVec sample(const SourceSpec& spec, uint64_t seed);

/// Worst-case min-entropy in bits. Markov1 (alone or as a subspace inner)
/// is unsupported and throws.
double min_entropy(const SourceSpec& spec);

/// Effective XOR-bias constant 2*epsilon / (1 + epsilon^2) of an order-1
/// Markov source viewed as a hidden Markov source.
double effective_e_markov1(double epsilon);

/// NonObliviousBitFixing spec whose matrix places identity columns at k
/// seeded random positions and fills the rest with fair bits.
SourceSpec make_bitfixing(size_t k, size_t n, uint64_t seed);

/// Per-bit one-probabilities when the source is independent-representable
/// (Independent, BoundedBias, ObliviousBitFixing); nullopt otherwise.
std::optional<std::vector<double>> independent_biases(const SourceSpec& spec);

nlohmann::json source_to_json(const SourceSpec& spec);
SourceSpec source_from_json(const nlohmann::json& j);
SourceSpec load_source_spec(const std::filesystem::path& path);
void save_source_spec(const SourceSpec& spec, const std::filesystem::path& path);

}  // namespace linext
