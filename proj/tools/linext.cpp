#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "linext/errors.hpp"
#include "linext/extract.hpp"
#include "linext/matgen.hpp"
#include "linext/rng.hpp"
#include "linext/sources.hpp"
#include "linext/verify.hpp"

namespace {

using nlohmann::json;

// All randomness is explicitly seeded; the documented default keeps
// unseeded pipelines reproducible.
constexpr uint64_t kDefaultSeed = 1;

constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitInvalidInput = 4;

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw linext::FormatError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw linext::FormatError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw linext::FormatError("write failed: " + path);
}

// Packed-bit convention everywhere: bit i of the stream is bit (i % 8) of
// byte (i / 8), final byte zero-padded.
bool get_bit(const std::vector<uint8_t>& bytes, uint64_t i) {
  return (bytes[i >> 3] >> (i & 7)) & 1;
}

void append_bit(std::vector<uint8_t>& bytes, uint64_t i, bool bit) {
  if ((i >> 3) >= bytes.size()) bytes.push_back(0);
  if (bit) bytes[i >> 3] |= static_cast<uint8_t>(1u << (i & 7));
}

struct GenmatArgs {
  std::string kind;
  uint64_t n = 0;
  uint64_t m = 0;
  double density = -1.0;
  unsigned col_weight = 0;
  unsigned kappa = 0;
  unsigned t = 0;
  uint64_t seed = kDefaultSeed;
  std::string out;
  std::string wdist_out;
  unsigned wdist_exact_limit = 24;
};

int run_genmat(const GenmatArgs& a) {
  linext::TransformMatrix matrix;
  const linext::MatrixKind kind = linext::matrix_kind_from_string(a.kind);
  switch (kind) {
    case linext::MatrixKind::uniform:
      matrix = linext::gen_uniform(a.n, a.m, a.seed);
      break;
    case linext::MatrixKind::sparse: {
      const double p = a.density >= 0.0 ? a.density : linext::default_density(a.n);
      matrix = linext::gen_sparse(a.n, a.m, p, a.seed);
      break;
    }
    case linext::MatrixKind::fixed_column_weight:
      matrix = linext::gen_fixed_column_weight(a.n, a.m, a.col_weight, a.seed);
      break;
    case linext::MatrixKind::bch:
      matrix = linext::bch_generator(a.kappa, a.t);
      break;
  }
  linext::save_matrix(matrix, a.out);

  if (!a.wdist_out.empty()) {
    const auto dist = linext::weight_distribution(matrix, a.wdist_exact_limit,
                                                  1u << 20, a.seed);
    std::ofstream out(a.wdist_out, std::ios::trunc);
    if (!out) throw linext::FormatError("cannot open " + a.wdist_out);
    linext::write_wdist_csv(dist, out);
  }

  json summary;
  summary["kind"] = linext::to_string(matrix.kind);
  summary["n"] = matrix.n();
  summary["m"] = matrix.m();
  summary["density"] = matrix.density;
  if (matrix.kind != linext::MatrixKind::bch) summary["seed"] = matrix.seed;
  if (matrix.kind == linext::MatrixKind::fixed_column_weight)
    summary["column_weight"] = matrix.column_weight;
  if (matrix.bch) {
    summary["kappa"] = matrix.bch->kappa;
    summary["t"] = matrix.bch->t;
  }
  summary["ones"] = matrix.matrix.popcount();
  summary["path"] = a.out;
  std::cout << summary.dump(2) << '\n';
  std::cerr << "wrote " << matrix.n() << "x" << matrix.m() << " "
            << linext::to_string(matrix.kind) << " matrix to " << a.out << '\n';
  return 0;
}

struct SourceGenArgs {
  std::string spec_path;
  uint64_t len = 0;
  uint64_t seed = kDefaultSeed;
  std::string out;
};

int run_source_gen(const SourceGenArgs& a) {
  const linext::SourceSpec spec = linext::load_source_spec(a.spec_path);
  const uint64_t n = spec.bit_length();
  std::vector<uint8_t> bytes((a.len + 7) / 8, 0);
  uint64_t written = 0;
  for (uint64_t draw = 0; written < a.len; ++draw) {
    // draw i uses the i-th output of the master stream as its seed
    const linext::BitVec x = linext::sample(spec, linext::SplitMix64::at(a.seed, draw));
    for (uint64_t i = 0; i < n && written < a.len; ++i, ++written)
      if (x.get(i)) bytes[written >> 3] |= static_cast<uint8_t>(1u << (written & 7));
  }
  write_file(a.out, bytes);
  std::cerr << "wrote " << a.len << " bits (" << bytes.size() << " bytes) from "
            << spec.model_name() << " source to " << a.out << '\n';
  return 0;
}

struct ExtractArgs {
  std::string matrix_path;
  std::string in_path;
  std::string out_path;
  std::string stream = "block";
  uint64_t in_bits = 0;  // 0 = whole file
};

int run_extract(const ExtractArgs& a) {
  const linext::TransformMatrix matrix = linext::load_matrix(a.matrix_path);
  const std::vector<uint8_t> input = read_file(a.in_path);
  const uint64_t available = static_cast<uint64_t>(input.size()) * 8;
  uint64_t in_bits = a.in_bits == 0 ? available : a.in_bits;
  if (in_bits > available)
    throw linext::FormatError("--in-bits exceeds input file size (" +
                              std::to_string(available) + " bits)");

  const linext::StreamMode mode = a.stream == "accumulate"
                                      ? linext::StreamMode::accumulate
                                      : linext::StreamMode::block;
  linext::StreamExtractor stream(matrix, mode);
  std::vector<uint8_t> output;
  uint64_t out_bits = 0;
  auto sink = [&](bool bit) { append_bit(output, out_bits++, bit); };
  for (uint64_t i = 0; i < in_bits; ++i) stream.push(get_bit(input, i), sink);

  write_file(a.out_path, output);
  std::cerr << "extracted " << out_bits << " bits from " << in_bits << " (mode "
            << a.stream << ", rate " << matrix.m() << "/" << matrix.n() << ")\n";
  return 0;
}

struct VerifyArgs {
  std::string mode;
  std::string matrix_path;
  std::string spec_path;
  uint64_t samples = 1u << 20;
  uint64_t seed = kDefaultSeed;
};

int run_verify(const VerifyArgs& a) {
  const linext::TransformMatrix matrix = linext::load_matrix(a.matrix_path);
  const linext::SourceSpec spec = linext::load_source_spec(a.spec_path);

  json out;
  out["mode"] = a.mode;
  out["model"] = spec.model_name();
  out["n"] = matrix.n();
  out["m"] = matrix.m();

  const auto start = std::chrono::steady_clock::now();
  if (a.mode == "exact") {
    out["rho"] = linext::rho(linext::exact_distribution(matrix, spec));
  } else if (a.mode == "oracle") {
    out["rho"] = linext::rho_bruteforce(matrix, spec);
  } else if (a.mode == "mc") {
    const auto est = linext::mc_rho(matrix, spec, a.samples, a.seed);
    out["rho"] = est.rho_hat;
    out["ci_low"] = est.ci_low;
    out["ci_high"] = est.ci_high;
    out["samples"] = est.samples;
    if (est.undersampled) {
      out["undersampled"] = true;
      std::cerr << "warning: fewer than 100 * 2^m samples; the plug-in "
                   "estimate is strongly biased\n";
    }
  } else if (a.mode == "bitfixing") {
    const linext::BitMatrix* a_matrix = nullptr;
    if (const auto* bf = spec.get_if<linext::NonObliviousBitFixing>())
      a_matrix = &bf->a;
    else if (const auto* sub = spec.get_if<linext::LinearSubspace>())
      a_matrix = &sub->a;
    else
      throw std::invalid_argument(
          "bitfixing mode needs a non_oblivious_bit_fixing or linear_subspace spec");
    out["rho"] = linext::bitfixing_rho(*a_matrix, matrix);
    out["rank_am"] = linext::rank(linext::matmul(*a_matrix, matrix.matrix));
  }
  const auto stop = std::chrono::steady_clock::now();

  out["bounds"] =
      linext::bound_report_to_json(linext::bound_report(linext::make_bound_context(spec, &matrix)));
  out["runtime_ms"] =
      std::chrono::duration<double, std::milli>(stop - start).count();
  std::cout << out.dump(2) << '\n';
  std::cerr << "rho (" << a.mode << ") = " << out["rho"].dump() << '\n';
  return 0;
}

struct BoundArgs {
  std::string spec_path;
  std::string matrix_path;
  std::string model;
  double hmin = -1.0;
  double e = -1.0;
  int64_t k = -1;
  uint64_t n = 0;
  uint64_t m = 0;
};

int run_bound(const BoundArgs& a) {
  linext::BoundContext ctx;
  std::optional<linext::TransformMatrix> matrix;
  std::optional<linext::SourceSpec> spec;

  if (!a.matrix_path.empty()) matrix = linext::load_matrix(a.matrix_path);
  if (!a.spec_path.empty()) spec = linext::load_source_spec(a.spec_path);

  if (spec) {
    ctx = linext::make_bound_context(*spec, matrix ? &*matrix : nullptr);
  } else {
    if (matrix) {
      ctx.matrix = &*matrix;
      ctx.n = matrix->n();
      ctx.m = matrix->m();
    }
    ctx.hmm = a.model == "markov1";
  }
  // explicit flags override whatever the source spec implied
  if (a.hmin >= 0.0) ctx.hmin = a.hmin;
  if (a.e >= 0.0) ctx.e = a.e;
  if (a.k >= 0) ctx.k = static_cast<uint64_t>(a.k);
  if (a.n > 0) ctx.n = a.n;
  if (a.m > 0) ctx.m = a.m;

  const auto report = linext::bound_report(ctx);
  json out = linext::bound_report_to_json(report);
  if (report.uniform_expectation.applicable)
    out["uniform_expectation_log2"] = report.uniform_expectation.log2_value;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_bch_info(unsigned kappa, unsigned t) {
  const linext::BchCode code = linext::bch_code(kappa, t);
  json out;
  out["kappa"] = code.kappa;
  out["t"] = code.t;
  out["n"] = code.n;
  out["m"] = code.m;
  out["designed_distance"] = 2 * code.t + 1;
  out["g"] = code.generator_string();  // highest degree first
  out["deg_g"] = code.degree();
  std::cout << out.dump(2) << '\n';
  return 0;
}

struct BenchArgs {
  std::string matrix_path;
  uint64_t bits = 10'000'000;
  uint64_t seed = kDefaultSeed;
};

int run_bench(const BenchArgs& a) {
  const linext::TransformMatrix matrix = linext::load_matrix(a.matrix_path);
  const auto report = linext::stream_throughput_bench(matrix, a.bits, a.seed);
  json out;
  out["input_bits"] = report.input_bits;
  out["output_bits"] = report.output_bits;
  out["seconds"] = report.seconds;
  if (report.input_bits_per_sec) {
    out["input_bits_per_sec"] = *report.input_bits_per_sec;
    out["output_bits_per_sec"] = *report.output_bits_per_sec;
  } else {
    out["input_bits_per_sec"] = nullptr;
    out["output_bits_per_sec"] = nullptr;
  }
  std::cout << out.dump(2) << '\n';
  if (report.input_bits_per_sec)
    std::cerr << "throughput: " << *report.input_bits_per_sec / 1e6
              << " Mbit/s in, " << *report.output_bits_per_sec / 1e6
              << " Mbit/s out\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GF(2) linear-transformation randomness extraction toolkit"};
  app.require_subcommand(1);

  GenmatArgs genmat;
  auto* genmat_cmd = app.add_subcommand("genmat", "generate a transformation matrix");
  genmat_cmd->add_option("--kind", genmat.kind, "uniform|sparse|fixed-column-weight|bch")
      ->required();
  genmat_cmd->add_option("--n", genmat.n, "input length");
  genmat_cmd->add_option("--m", genmat.m, "output length");
  genmat_cmd->add_option("--density,-p", genmat.density,
                         "per-entry one probability (sparse; defaults to (log2 n)^2/n)");
  genmat_cmd->add_option("--col-weight", genmat.col_weight, "ones per column");
  genmat_cmd->add_option("--kappa", genmat.kappa, "BCH field degree");
  genmat_cmd->add_option("--t", genmat.t, "BCH designed error count");
  genmat_cmd->add_option("--seed", genmat.seed, "generation seed");
  genmat_cmd->add_option("--out", genmat.out, "output matrix file")->required();
  genmat_cmd->add_option("--wdist-out", genmat.wdist_out, "also write .wdist CSV");
  genmat_cmd->add_option("--wdist-exact-limit", genmat.wdist_exact_limit,
                         "enumerate exactly up to this m");

  SourceGenArgs source_gen;
  auto* source_cmd = app.add_subcommand("source", "source-model operations");
  source_cmd->require_subcommand(1);
  auto* source_gen_cmd = source_cmd->add_subcommand("gen", "sample bits from a source spec");
  source_gen_cmd->add_option("--spec", source_gen.spec_path, "source spec JSON")->required();
  source_gen_cmd->add_option("--len", source_gen.len, "bits to emit")->required();
  source_gen_cmd->add_option("--seed", source_gen.seed, "sampling seed");
  source_gen_cmd->add_option("--out", source_gen.out, "packed bit output")->required();

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "apply a matrix to packed bits");
  extract_cmd->add_option("--matrix", extract.matrix_path, "matrix file")->required();
  extract_cmd->add_option("--in", extract.in_path, "packed input bits")->required();
  extract_cmd->add_option("--out", extract.out_path, "packed output bits")->required();
  extract_cmd->add_option("--stream", extract.stream, "accumulate|block (default block)")
      ->check(CLI::IsMember({"accumulate", "block"}));
  extract_cmd->add_option("--in-bits", extract.in_bits,
                          "process only this many input bits");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "measure rho for (source, matrix)");
  verify_cmd->add_option("mode", verify.mode, "exact|oracle|mc|bitfixing")
      ->required()
      ->check(CLI::IsMember({"exact", "oracle", "mc", "bitfixing"}));
  verify_cmd->add_option("--matrix", verify.matrix_path, "matrix file")->required();
  verify_cmd->add_option("--spec", verify.spec_path, "source spec JSON")->required();
  verify_cmd->add_option("--samples", verify.samples, "Monte Carlo sample count");
  verify_cmd->add_option("--seed", verify.seed, "Monte Carlo seed");

  BoundArgs bound;
  auto* bound_cmd = app.add_subcommand("bound", "closed-form bound report");
  bound_cmd->add_option("--spec", bound.spec_path, "source spec JSON");
  bound_cmd->add_option("--matrix", bound.matrix_path, "matrix file");
  bound_cmd->add_option("--model", bound.model, "model name when no spec is given");
  bound_cmd->add_option("--hmin", bound.hmin, "min-entropy in bits");
  bound_cmd->add_option("--e", bound.e, "bias band e");
  bound_cmd->add_option("--k", bound.k, "independent unbiased bit count");
  bound_cmd->add_option("--n", bound.n, "input length");
  bound_cmd->add_option("--m", bound.m, "output length");

  unsigned bch_kappa = 0, bch_t = 0;
  auto* bch_cmd = app.add_subcommand("bch", "BCH code queries");
  bch_cmd->require_subcommand(1);
  auto* bch_info_cmd = bch_cmd->add_subcommand("info", "code parameters and generator");
  bch_info_cmd->add_option("--kappa", bch_kappa, "field degree")->required();
  bch_info_cmd->add_option("--t", bch_t, "designed error count")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "streaming throughput benchmark");
  bench_cmd->add_option("--matrix", bench.matrix_path, "matrix file")->required();
  bench_cmd->add_option("--bits", bench.bits, "input bits to process");
  bench_cmd->add_option("--seed", bench.seed, "input stream seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*genmat_cmd) return run_genmat(genmat);
    if (*source_gen_cmd) return run_source_gen(source_gen);
    if (*extract_cmd) return run_extract(extract);
    if (*verify_cmd) return run_verify(verify);
    if (*bound_cmd) return run_bound(bound);
    if (*bch_info_cmd) return run_bch_info(bch_kappa, bch_t);
    if (*bench_cmd) return run_bench(bench);
  } catch (const linext::CapacityError& e) {
    std::cerr << "error: capacity: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const linext::FormatError& e) {
    std::cerr << "error: invalid-input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid-input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
