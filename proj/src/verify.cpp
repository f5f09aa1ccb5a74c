#include "linext/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "linext/errors.hpp"
#include "linext/extract.hpp"
#include "linext/rng.hpp"

namespace linext {

namespace {

constexpr double kNegativeClamp = -1e-12;
constexpr double kSumTolerance = 1e-9;

void check_exact_m(size_t m) {
  if (m > kMaxExactM)
    throw CapacityError("exact path limited to m <= " + std::to_string(kMaxExactM) +
                        ", got m = " + std::to_string(m));
}

// Per-byte products of the signed biases s_i = 1 - 2 p_i, so the Fourier
// coefficient of an image vector costs one multiply per byte.
struct BiasProductTables {
  size_t bytes_per_row;
  std::vector<double> table;  // [byte_index][byte_value]

  BiasProductTables(std::span<const double> biases, size_t n)
      : bytes_per_row((n + 7) / 8), table(bytes_per_row * 256, 1.0) {
    for (size_t bi = 0; bi < bytes_per_row; ++bi) {
      double* t = table.data() + bi * 256;
      for (size_t v = 1; v < 256; ++v) {
        const int bit = std::countr_zero(static_cast<unsigned>(v));
        const size_t i = bi * 8 + static_cast<size_t>(bit);
        const double s = i < n ? 1.0 - 2.0 * biases[i] : 1.0;
        t[v] = t[v & (v - 1)] * s;
      }
    }
  }

  double product(const BitVec& image) const {
    double prod = 1.0;
    auto words = image.words();
    for (size_t bi = 0; bi < bytes_per_row; ++bi) {
      const uint8_t byte = static_cast<uint8_t>(words[bi / 8] >> (8 * (bi % 8)));
      prod *= table[bi * 256 + byte];
    }
    return prod;
  }
};

// Calls visit(u, F(u)) for every u in {0,1}^m, where F(u) is the signed
// bias product over the support of M u^T. Gray-code order keeps the image
// update to a single row XOR.
template <class Visit>
void scan_fourier_coefficients(const BitMatrix& m, std::span<const double> biases,
                               Visit&& visit) {
  if (biases.size() != m.rows())
    throw std::invalid_argument("bias vector length " + std::to_string(biases.size()) +
                                " does not match matrix rows " +
                                std::to_string(m.rows()));
  check_exact_m(m.cols());

  const BiasProductTables tables(biases, m.rows());
  const BitMatrix cols = m.transposed();
  BitVec image(m.rows());

  visit(uint64_t{0}, 1.0);
  const uint64_t total = uint64_t{1} << m.cols();
  uint64_t gray = 0;
  for (uint64_t idx = 1; idx < total; ++idx) {
    const uint64_t next_gray = idx ^ (idx >> 1);
    const int flipped = std::countr_zero(gray ^ next_gray);
    gray = next_gray;
    cols.xor_row_into(static_cast<size_t>(flipped), image);
    visit(gray, tables.product(image));
  }
}

uint64_t low_word(const BitVec& v) { return v.words().empty() ? 0 : v.words()[0]; }

void add_independent_paths(const BitMatrix& m, std::span<const double> biases,
                           std::vector<double>& probs) {
  // full enumeration of inputs; probability recomputed per input, image
  // maintained by Gray steps
  const size_t n = m.rows();
  BitVec x(n);
  BitVec y(m.cols());
  const uint64_t total = uint64_t{1} << n;
  uint64_t gray = 0;
  for (uint64_t idx = 0; idx < total; ++idx) {
    if (idx > 0) {
      const uint64_t next_gray = idx ^ (idx >> 1);
      const int flipped = std::countr_zero(gray ^ next_gray);
      gray = next_gray;
      x.flip(static_cast<size_t>(flipped));
      m.xor_row_into(static_cast<size_t>(flipped), y);
    }
    double p = 1.0;
    for (size_t i = 0; i < n; ++i) p *= x.get(i) ? biases[i] : 1.0 - biases[i];
    probs[low_word(y)] += p;
  }
}

void add_markov_paths(const BitMatrix& m, const Markov1& source,
                      std::vector<double>& probs) {
  const size_t n = source.n;
  BitVec x(n);
  BitVec y(m.cols());
  const uint64_t total = uint64_t{1} << n;
  uint64_t gray = 0;
  for (uint64_t idx = 0; idx < total; ++idx) {
    if (idx > 0) {
      const uint64_t next_gray = idx ^ (idx >> 1);
      const int flipped = std::countr_zero(gray ^ next_gray);
      gray = next_gray;
      x.flip(static_cast<size_t>(flipped));
      m.xor_row_into(static_cast<size_t>(flipped), y);
    }
    double p = x.get(0) ? source.p_init : 1.0 - source.p_init;
    for (size_t i = 1; i < n; ++i) {
      const double p_one =
          x.get(i - 1) ? source.p_one_after_one : source.p_one_after_zero;
      p *= x.get(i) ? p_one : 1.0 - p_one;
    }
    probs[low_word(y)] += p;
  }
}

void check_bruteforce_len(size_t n, const char* what) {
  if (n > kMaxBruteforceN)
    throw CapacityError(std::string(what) + " enumeration limited to " +
                        std::to_string(kMaxBruteforceN) + " bits, got " +
                        std::to_string(n));
}

}  // namespace

double rho(const Distribution& dist) {
  const double uniform = std::exp2(-static_cast<double>(dist.m));
  double sum = 0.0;
  for (double p : dist.probs) sum += std::fabs(p - uniform);
  return 0.5 * sum;
}

void walsh_hadamard_inplace(std::span<double> data) {
  const size_t size = data.size();
  if (size == 0 || (size & (size - 1)) != 0)
    throw std::invalid_argument("transform size must be a power of two");
  for (size_t half = 1; half < size; half <<= 1) {
    for (size_t block = 0; block < size; block += 2 * half) {
      for (size_t i = block; i < block + half; ++i) {
        const double a = data[i];
        const double b = data[i + half];
        data[i] = a + b;
        data[i + half] = a - b;
      }
    }
  }
}

Distribution exact_distribution_independent(const BitMatrix& m,
                                            std::span<const double> biases) {
  Distribution dist;
  dist.m = m.cols();
  dist.probs.assign(uint64_t{1} << dist.m, 0.0);
  scan_fourier_coefficients(
      m, biases, [&](uint64_t u, double coeff) { dist.probs[u] = coeff; });

  walsh_hadamard_inplace(dist.probs);
  const double scale = std::exp2(-static_cast<double>(dist.m));
  double sum = 0.0;
  for (double& p : dist.probs) {
    p *= scale;
    if (p < 0.0) {
      if (p < kNegativeClamp)
        throw std::logic_error("transform produced probability " + std::to_string(p));
      p = 0.0;
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kSumTolerance)
    throw std::logic_error("distribution does not sum to 1 within tolerance");
  return dist;
}

Distribution exact_distribution_independent(const TransformMatrix& t,
                                            std::span<const double> biases) {
  return exact_distribution_independent(t.matrix, biases);
}

Distribution exact_distribution(const TransformMatrix& t, const SourceSpec& spec) {
  if (auto biases = independent_biases(spec)) {
    if (biases->size() != t.n())
      throw std::invalid_argument("source length does not match matrix rows");
    return exact_distribution_independent(t.matrix, *biases);
  }
  if (const auto* bf = spec.get_if<NonObliviousBitFixing>()) {
    const BitMatrix b = matmul(bf->a, t.matrix);
    const std::vector<double> unbiased(b.rows(), 0.5);
    return exact_distribution_independent(b, unbiased);
  }
  if (const auto* sub = spec.get_if<LinearSubspace>()) {
    if (const auto* inner = std::get_if<Independent>(&sub->inner)) {
      const BitMatrix b = matmul(sub->a, t.matrix);
      return exact_distribution_independent(b, inner->biases);
    }
    throw std::invalid_argument(
        "no exact route for markov1 subspace inners; use the oracle or mc path");
  }
  throw std::invalid_argument("no exact route for markov1 sources; use the oracle or mc path");
}

Distribution bruteforce_distribution(const TransformMatrix& t,
                                     const SourceSpec& spec) {
  if (spec.bit_length() != t.n())
    throw std::invalid_argument("source length does not match matrix rows");
  check_exact_m(t.m());

  Distribution dist;
  dist.m = t.m();
  dist.probs.assign(uint64_t{1} << dist.m, 0.0);

  if (auto biases = independent_biases(spec)) {
    check_bruteforce_len(t.n(), "independent");
    add_independent_paths(t.matrix, *biases, dist.probs);
    return dist;
  }
  if (const auto* markov = spec.get_if<Markov1>()) {
    check_bruteforce_len(markov->n, "markov1");
    add_markov_paths(t.matrix, *markov, dist.probs);
    return dist;
  }
  if (const auto* bf = spec.get_if<NonObliviousBitFixing>()) {
    check_bruteforce_len(bf->a.rows(), "bit-fixing seed");
    const BitMatrix b = matmul(bf->a, t.matrix);
    const std::vector<double> unbiased(b.rows(), 0.5);
    add_independent_paths(b, unbiased, dist.probs);
    return dist;
  }
  const auto* sub = spec.get_if<LinearSubspace>();
  check_bruteforce_len(sub->a.rows(), "subspace seed");
  const BitMatrix b = matmul(sub->a, t.matrix);
  if (const auto* inner = std::get_if<Independent>(&sub->inner)) {
    add_independent_paths(b, inner->biases, dist.probs);
  } else {
    add_markov_paths(b, std::get<Markov1>(sub->inner), dist.probs);
  }
  return dist;
}

double rho_bruteforce(const TransformMatrix& t, const SourceSpec& spec) {
  return rho(bruteforce_distribution(t, spec));
}

double fourier_bound(const BitMatrix& m, std::span<const double> biases) {
  double sum = 0.0;
  scan_fourier_coefficients(m, biases, [&](uint64_t u, double coeff) {
    if (u != 0) sum += std::fabs(coeff);
  });
  return 0.5 * sum;
}

double fourier_bound(const TransformMatrix& t, std::span<const double> biases) {
  return fourier_bound(t.matrix, biases);
}

double bitfixing_rho(const BitMatrix& a, const TransformMatrix& t) {
  if (a.cols() != t.n())
    throw std::invalid_argument("A columns (" + std::to_string(a.cols()) +
                                ") do not match matrix rows (" +
                                std::to_string(t.n()) + ")");
  const size_t r = rank(matmul(a, t.matrix));
  return 1.0 - std::exp2(static_cast<double>(r) - static_cast<double>(t.m()));
}

McEstimate mc_rho(const TransformMatrix& t, const SourceSpec& spec,
                  uint64_t n_samples, uint64_t seed, int bootstrap_rounds) {
  const size_t m = t.m();
  if (m > kMaxMonteCarloM)
    throw CapacityError("mc path limited to m <= " + std::to_string(kMaxMonteCarloM) +
                        ", got m = " + std::to_string(m));
  if (n_samples == 0) throw std::invalid_argument("mc_rho needs at least one sample");
  if (spec.bit_length() != t.n())
    throw std::invalid_argument("source length does not match matrix rows");

  const size_t cells = size_t{1} << m;
  std::vector<uint64_t> counts(cells, 0);
  for (uint64_t i = 0; i < n_samples; ++i) {
    const BitVec x = sample(spec, SplitMix64::at(seed, i));
    const BitVec y = extract_block(t, x);
    ++counts[low_word(y)];
  }

  const double inv_n = 1.0 / static_cast<double>(n_samples);
  const double uniform = std::exp2(-static_cast<double>(m));
  auto plugin_rho = [&](const std::vector<uint64_t>& c) {
    double sum = 0.0;
    for (uint64_t v : c)
      sum += std::fabs(static_cast<double>(v) * inv_n - uniform);
    return 0.5 * sum;
  };

  McEstimate est;
  est.samples = n_samples;
  est.rho_hat = plugin_rho(counts);
  est.undersampled = n_samples < 100 * static_cast<uint64_t>(cells);

  // percentile bootstrap: resample the histogram as a multinomial via
  // sequential conditional binomials
  std::vector<double> resampled(static_cast<size_t>(bootstrap_rounds));
  SplitMix64 rng(SplitMix64::mix64(seed ^ 0xB00757D4Bull));
  std::vector<uint64_t> re(cells);
  for (int b = 0; b < bootstrap_rounds; ++b) {
    uint64_t remaining = n_samples;
    double remaining_p = 1.0;
    for (size_t c = 0; c < cells; ++c) {
      const double cell_p = static_cast<double>(counts[c]) * inv_n;
      if (remaining == 0 || remaining_p <= 0.0) {
        re[c] = 0;
        continue;
      }
      const double p = std::clamp(cell_p / remaining_p, 0.0, 1.0);
      std::binomial_distribution<uint64_t> binom(remaining, p);
      re[c] = c + 1 == cells ? remaining : binom(rng);
      remaining -= re[c];
      remaining_p -= cell_p;
    }
    resampled[static_cast<size_t>(b)] = plugin_rho(re);
  }
  std::sort(resampled.begin(), resampled.end());
  const size_t lo = static_cast<size_t>(0.025 * (bootstrap_rounds - 1));
  const size_t hi = static_cast<size_t>(std::ceil(0.975 * (bootstrap_rounds - 1)));
  est.ci_low = resampled[lo];
  est.ci_high = resampled[hi];
  return est;
}

BoundReport bound_report(const BoundContext& ctx) {
  BoundReport report;
  const auto dbl = [](uint64_t v) { return static_cast<double>(v); };

  if (ctx.m && ctx.hmin) {
    report.uniform_expectation.applicable = true;
    report.uniform_expectation.log2_value = dbl(*ctx.m) - *ctx.hmin - 1.0;
  }
  if (ctx.matrix && ctx.biases && ctx.matrix->m() <= kMaxExactM) {
    report.fourier.applicable = true;
    report.fourier.log2_value = std::log2(fourier_bound(*ctx.matrix, *ctx.biases));
  }
  if (ctx.n && ctx.m && ctx.e && !ctx.hmm) {
    report.bch.applicable = true;
    report.bch.log2_value =
        dbl(*ctx.m) - dbl(*ctx.n) - 1.0 + dbl(*ctx.n) * std::log2(1.0 + *ctx.e);
  }
  if (ctx.n && ctx.m && ctx.e && ctx.hmm && *ctx.e > 0.0) {
    report.hmm_uniform.applicable = true;
    report.hmm_uniform.log2_value = dbl(*ctx.m) - dbl(*ctx.n) - 1.0 -
                                    0.5 * std::log2(*ctx.e) +
                                    dbl(*ctx.n) * std::log2(1.0 + std::sqrt(*ctx.e));
  }
  if (ctx.m && ctx.k) {
    report.bitfixing_prob.applicable = true;
    report.bitfixing_prob.log2_value = dbl(*ctx.m) - dbl(*ctx.k);
  }
  return report;
}

BoundContext make_bound_context(const SourceSpec& spec, const TransformMatrix* t) {
  BoundContext ctx;
  ctx.n = spec.bit_length();
  if (t) {
    ctx.m = t->m();
    ctx.matrix = t;
  }
  ctx.biases = independent_biases(spec);

  if (spec.get_if<Independent>() || spec.get_if<ObliviousBitFixing>()) {
    ctx.hmin = min_entropy(spec);
  } else if (const auto* bb = spec.get_if<BoundedBias>()) {
    ctx.hmin = min_entropy(spec);
    ctx.e = bb->e;
  } else if (const auto* markov = spec.get_if<Markov1>()) {
    ctx.e = effective_e_markov1(markov->epsilon);
    ctx.hmm = true;
  } else if (const auto* bf = spec.get_if<NonObliviousBitFixing>()) {
    ctx.k = bf->a.rows();
  } else if (const auto* sub = spec.get_if<LinearSubspace>()) {
    const size_t k = sub->a.rows();
    if (const auto* inner = std::get_if<Independent>(&sub->inner)) {
      ctx.hmin = min_entropy(spec);
      const bool unbiased = std::all_of(inner->biases.begin(), inner->biases.end(),
                                        [](double p) { return p == 0.5; });
      if (unbiased) ctx.k = k;
    } else {
      // hidden Markov inner: the uniform-matrix bound applies with the
      // seed length in place of the source length
      ctx.n = k;
      ctx.e = effective_e_markov1(std::get<Markov1>(sub->inner).epsilon);
      ctx.hmm = true;
    }
  }

  if (const auto* ob = spec.get_if<ObliviousBitFixing>())
    ctx.k = ob->fixed_mask.size() - ob->fixed_mask.popcount();
  return ctx;
}

nlohmann::json bound_report_to_json(const BoundReport& report) {
  nlohmann::json j;
  const auto emit = [&](const char* name, const BoundValue& v) {
    nlohmann::json entry;
    entry["applicable"] = v.applicable;
    if (v.applicable) {
      if (std::isinf(v.log2_value))
        entry["log2"] = "-inf";
      else
        entry["log2"] = v.log2_value;
      entry["value"] = std::exp2(v.log2_value);  // display only, may underflow
    }
    j[name] = entry;
  };
  emit("uniform_expectation", report.uniform_expectation);
  emit("fourier", report.fourier);
  emit("bch", report.bch);
  emit("hmm_uniform", report.hmm_uniform);
  emit("bitfixing_prob", report.bitfixing_prob);
  return j;
}

}  // namespace linext
