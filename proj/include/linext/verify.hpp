#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "linext/gf2.hpp"
#include "linext/matgen.hpp"
#include "linext/sources.hpp"

namespace linext {

/// Exact probability vector over {0,1}^m, indexed by the packed value of y.
struct Distribution {
  size_t m = 0;
  std::vector<double> probs;
};

inline constexpr size_t kMaxExactM = 26;       // 2^m doubles for the transform
inline constexpr size_t kMaxBruteforceN = 20;  // full input enumeration
inline constexpr size_t kMaxMonteCarloM = 20;  // 2^m histogram

/// Statistical distance of dist to the uniform distribution on {0,1}^m.
double rho(const Distribution& dist);

/// In-place unnormalized Walsh-Hadamard transform; size must be a power
/// of two. Applying it twice multiplies by the size.
void walsh_hadamard_inplace(std::span<double> data);

/// Exact output distribution of Y = X M for independent input bits with
/// the given one-probabilities: every Fourier coefficient is the signed
/// bias product over the support of M u^T, inverted by a fast transform.
Distribution exact_distribution_independent(const BitMatrix& m,
                                            std::span<const double> biases);
Distribution exact_distribution_independent(const TransformMatrix& t,
                                            std::span<const double> biases);

/// Exact distribution for any model with an exact route: independent-
/// representable sources go through the matrix directly, bit-fixing and
/// subspace sources through B = A M. Markov chains have no exact route.
Distribution exact_distribution(const TransformMatrix& t, const SourceSpec& spec);

/// Ground-truth oracle: accumulates P[Y = y] by enumerating every input
/// (or every seed vector Z), then measures the distance.
Distribution bruteforce_distribution(const TransformMatrix& t,
                                     const SourceSpec& spec);
double rho_bruteforce(const TransformMatrix& t, const SourceSpec& spec);

/// Sum of |P[X M u^T = 1] - 1/2| over u != 0, exact for independent bits.
/// Upper-bounds rho of the exact distribution.
double fourier_bound(const BitMatrix& m, std::span<const double> biases);
double fourier_bound(const TransformMatrix& t, std::span<const double> biases);

/// rho for a bit-fixing/subspace source with unbiased Z through the rank
/// of B = A M: Y is uniform on a 2^rank subset, so rho = 1 - 2^(rank - m).
double bitfixing_rho(const BitMatrix& a, const TransformMatrix& t);

struct McEstimate {
  double rho_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  uint64_t samples = 0;
  bool undersampled = false;  // fewer than 100 * 2^m samples
};

/// Plug-in total-variation estimate from sampled extractions with a
/// percentile-bootstrap confidence interval. The plug-in estimator is
/// positively biased for small true rho; the exact paths, not this one,
/// carry the verification weight.
McEstimate mc_rho(const TransformMatrix& t, const SourceSpec& spec,
                  uint64_t n_samples, uint64_t seed, int bootstrap_rounds = 200);

struct BoundValue {
  bool applicable = false;
  double log2_value = 0.0;  // may be -infinity when the bound is exactly 0
};

/// Log2-domain values of the closed-form upper bounds that apply to a
/// (source, matrix) pair.
struct BoundReport {
  BoundValue uniform_expectation;  // m - Hmin - 1
  BoundValue fourier;              // exact coefficient sum
  BoundValue bch;                  // m - n - 1 + n log2(1+e)
  BoundValue hmm_uniform;          // m - n - 1 - log2(e)/2 + n log2(1+sqrt e)
  BoundValue bitfixing_prob;       // m - k, bound on P[rho != 0]
};

struct BoundContext {
  std::optional<double> hmin;
  std::optional<double> e;  // bias band (independent) or effective HMM bound
  bool hmm = false;         // e came from a hidden Markov reduction
  std::optional<uint64_t> n;
  std::optional<uint64_t> m;
  std::optional<uint64_t> k;
  const TransformMatrix* matrix = nullptr;  // with biases, enables fourier
  std::optional<std::vector<double>> biases;
};

BoundReport bound_report(const BoundContext& ctx);
BoundContext make_bound_context(const SourceSpec& spec, const TransformMatrix* t);

nlohmann::json bound_report_to_json(const BoundReport& report);

}  // namespace linext
