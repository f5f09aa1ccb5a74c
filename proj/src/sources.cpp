#include "linext/sources.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "linext/errors.hpp"
#include "linext/rng.hpp"

namespace linext {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " +
                                std::to_string(p));
}

void check_band(double p, double half_width, const char* what) {
  if (!(p >= 0.5 - half_width && p <= 0.5 + half_width))
    throw std::invalid_argument(std::string(what) + " = " + std::to_string(p) +
                                " outside [1/2 - " + std::to_string(half_width) +
                                ", 1/2 + " + std::to_string(half_width) + "]");
}

bool embeds_identity(const BitMatrix& a) {
  const size_t k = a.rows();
  std::vector<bool> found(k, false);
  for (size_t c = 0; c < a.cols(); ++c) {
    size_t ones = 0;
    size_t row = 0;
    for (size_t r = 0; r < k; ++r) {
      if (a.get(r, c)) {
        ++ones;
        row = r;
      }
    }
    if (ones == 1) found[row] = true;
  }
  for (bool f : found)
    if (!f) return false;
  return true;
}

void validate(const SourceSpec::Model& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Independent>) {
          if (m.biases.empty())
            throw std::invalid_argument("independent source needs at least one bit");
          for (double p : m.biases) check_probability(p, "bias");
        } else if constexpr (std::is_same_v<T, BoundedBias>) {
          if (m.n < 1) throw std::invalid_argument("bounded-bias source needs n >= 1");
          if (!(m.e >= 0.0 && m.e < 1.0))
            throw std::invalid_argument("bounded-bias e must lie in [0, 1)");
          if (m.biases) {
            if (m.biases->size() != m.n)
              throw std::invalid_argument("materialized biases must have length n");
            for (double p : *m.biases) check_band(p, m.e / 2, "materialized bias");
          }
        } else if constexpr (std::is_same_v<T, Markov1>) {
          if (m.n < 1) throw std::invalid_argument("markov1 source needs n >= 1");
          if (!(m.epsilon >= 0.0 && m.epsilon < 1.0))
            throw std::invalid_argument("markov1 epsilon must lie in [0, 1)");
          check_band(m.p_one_after_zero, m.epsilon / 2, "P[1 | prev=0]");
          check_band(m.p_one_after_one, m.epsilon / 2, "P[1 | prev=1]");
          check_probability(m.p_init, "initial probability");
        } else if constexpr (std::is_same_v<T, ObliviousBitFixing>) {
          if (m.fixed_mask.size() < 1)
            throw std::invalid_argument("bit-fixing source needs n >= 1");
          if (m.fixed_mask.size() != m.fixed_values.size())
            throw std::invalid_argument("fixed_mask and fixed_values lengths differ");
          for (size_t i = 0; i < m.fixed_mask.size(); ++i)
            if (m.fixed_values.get(i) && !m.fixed_mask.get(i))
              throw std::invalid_argument(
                  "fixed_values sets bit " + std::to_string(i) + " outside fixed_mask");
        } else if constexpr (std::is_same_v<T, NonObliviousBitFixing>) {
          if (m.a.rows() > m.a.cols())
            throw std::invalid_argument("bit-fixing matrix A must be k x n with k <= n");
          if (!embeds_identity(m.a))
            throw std::invalid_argument(
                "bit-fixing matrix A must contain k columns forming an identity");
        } else if constexpr (std::is_same_v<T, LinearSubspace>) {
          const size_t k = m.a.rows();
          if (k > m.a.cols())
            throw std::invalid_argument("subspace matrix A must be k x n with k <= n");
          const size_t inner_len = std::visit(
              [](const auto& inner) -> size_t {
                using I = std::decay_t<decltype(inner)>;
                if constexpr (std::is_same_v<I, Independent>)
                  return inner.biases.size();
                else
                  return inner.n;
              },
              m.inner);
          if (inner_len != k)
            throw std::invalid_argument("subspace inner source length must equal rows of A");
          validate(SourceSpec::Model(std::visit(
              [](const auto& inner) { return SourceSpec::Model(inner); }, m.inner)));
          if (rank(m.a) != k)
            throw std::invalid_argument("subspace matrix A must have full rank k");
        }
      },
      model);
}

std::vector<double> worst_case_biases(const BoundedBias& b) {
  if (b.biases) return *b.biases;
  return std::vector<double>(b.n, 0.5 + b.e / 2);
}

BitVec sample_independent(const std::vector<double>& biases, SplitMix64& rng) {
  BitVec x(biases.size());
  for (size_t i = 0; i < biases.size(); ++i)
    if (rng.next_bernoulli(biases[i])) x.set(i, true);
  return x;
}

BitVec sample_markov1(const Markov1& m, SplitMix64& rng) {
  BitVec x(m.n);
  bool prev = rng.next_bernoulli(m.p_init);
  x.set(0, prev);
  for (size_t i = 1; i < m.n; ++i) {
    prev = rng.next_bernoulli(prev ? m.p_one_after_one : m.p_one_after_zero);
    x.set(i, prev);
  }
  return x;
}

double independent_min_entropy(const std::vector<double>& biases) {
  double h = 0.0;
  for (double p : biases) h -= std::log2(std::max(p, 1.0 - p));
  return h;
}

}  // namespace

SourceSpec::SourceSpec(Model model) : model_(std::move(model)) { validate(model_); }

size_t SourceSpec::bit_length() const {
  return std::visit(
      [](const auto& m) -> size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Independent>)
          return m.biases.size();
        else if constexpr (std::is_same_v<T, BoundedBias>)
          return m.n;
        else if constexpr (std::is_same_v<T, Markov1>)
          return m.n;
        else if constexpr (std::is_same_v<T, ObliviousBitFixing>)
          return m.fixed_mask.size();
        else
          return m.a.cols();
      },
      model_);
}

std::string SourceSpec::model_name() const {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Independent>) return "independent";
        if constexpr (std::is_same_v<T, BoundedBias>) return "bounded_bias";
        if constexpr (std::is_same_v<T, Markov1>) return "markov1";
        if constexpr (std::is_same_v<T, ObliviousBitFixing>)
          return "oblivious_bit_fixing";
        if constexpr (std::is_same_v<T, NonObliviousBitFixing>)
          return "non_oblivious_bit_fixing";
        if constexpr (std::is_same_v<T, LinearSubspace>) return "linear_subspace";
      },
      model_);
}

BitVec sample(const SourceSpec& spec, uint64_t seed) {
  SplitMix64 rng(seed);
  return std::visit(
      [&](const auto& m) -> BitVec {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Independent>) {
          return sample_independent(m.biases, rng);
        } else if constexpr (std::is_same_v<T, BoundedBias>) {
          return sample_independent(worst_case_biases(m), rng);
        } else if constexpr (std::is_same_v<T, Markov1>) {
          return sample_markov1(m, rng);
        } else if constexpr (std::is_same_v<T, ObliviousBitFixing>) {
          BitVec x(m.fixed_mask.size());
          for (size_t i = 0; i < x.size(); ++i) {
            if (m.fixed_mask.get(i))
              x.set(i, m.fixed_values.get(i));
            else
              x.set(i, rng.next_bernoulli(0.5));
          }
          return x;
        } else if constexpr (std::is_same_v<T, NonObliviousBitFixing>) {
          BitVec z(m.a.rows());
          for (size_t i = 0; i < z.size(); ++i) z.set(i, rng.next_bernoulli(0.5));
          return matvec(z, m.a);
        } else if constexpr (std::is_same_v<T, LinearSubspace>) {
          BitVec z = std::visit(
              [&](const auto& inner) -> BitVec {
                using I = std::decay_t<decltype(inner)>;
                if constexpr (std::is_same_v<I, Independent>)
                  return sample_independent(inner.biases, rng);
                else
                  return sample_markov1(inner, rng);
              },
              m.inner);
          return matvec(z, m.a);
        }
      },
      spec.model());
}

double min_entropy(const SourceSpec& spec) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Independent>) {
          return independent_min_entropy(m.biases);
        } else if constexpr (std::is_same_v<T, BoundedBias>) {
          if (m.biases) return independent_min_entropy(*m.biases);
          return static_cast<double>(m.n) * std::log2(2.0 / (1.0 + m.e));
        } else if constexpr (std::is_same_v<T, Markov1>) {
          throw std::invalid_argument(
              "min-entropy is not supported for markov1 sources");
          return 0.0;
        } else if constexpr (std::is_same_v<T, ObliviousBitFixing>) {
          return static_cast<double>(m.fixed_mask.size() - m.fixed_mask.popcount());
        } else if constexpr (std::is_same_v<T, NonObliviousBitFixing>) {
          return static_cast<double>(m.a.rows());
        } else if constexpr (std::is_same_v<T, LinearSubspace>) {
          if (const auto* inner = std::get_if<Independent>(&m.inner))
            return independent_min_entropy(inner->biases);
          throw std::invalid_argument(
              "min-entropy is not supported for markov1 subspace inners");
          return 0.0;
        }
      },
      spec.model());
}

double effective_e_markov1(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie in [0, 1), got " +
                                std::to_string(epsilon));
  return 2.0 * epsilon / (1.0 + epsilon * epsilon);
}

SourceSpec make_bitfixing(size_t k, size_t n, uint64_t seed) {
  if (k < 1 || k > n)
    throw std::invalid_argument("make_bitfixing requires 1 <= k <= n");
  SplitMix64 rng(seed);

  std::vector<uint32_t> positions(n);
  for (size_t i = 0; i < n; ++i) positions[i] = static_cast<uint32_t>(i);
  for (size_t i = 0; i < k; ++i) {
    const uint64_t j = i + rng.next_below(n - i);
    std::swap(positions[i], positions[j]);
  }

  BitMatrix a(k, n);
  std::vector<bool> is_identity_col(n, false);
  for (size_t j = 0; j < k; ++j) {
    a.set(j, positions[j], true);
    is_identity_col[positions[j]] = true;
  }
  for (size_t r = 0; r < k; ++r)
    for (size_t c = 0; c < n; ++c)
      if (!is_identity_col[c] && rng.next_bernoulli(0.5)) a.set(r, c, true);

  return SourceSpec(NonObliviousBitFixing{std::move(a)});
}

std::optional<std::vector<double>> independent_biases(const SourceSpec& spec) {
  if (const auto* ind = spec.get_if<Independent>()) return ind->biases;
  if (const auto* bb = spec.get_if<BoundedBias>()) return worst_case_biases(*bb);
  if (const auto* ob = spec.get_if<ObliviousBitFixing>()) {
    std::vector<double> biases(ob->fixed_mask.size(), 0.5);
    for (size_t i = 0; i < biases.size(); ++i)
      if (ob->fixed_mask.get(i)) biases[i] = ob->fixed_values.get(i) ? 1.0 : 0.0;
    return biases;
  }
  return std::nullopt;
}

namespace {

std::vector<std::string> matrix_rows(const BitMatrix& a) {
  std::vector<std::string> rows;
  rows.reserve(a.rows());
  for (size_t r = 0; r < a.rows(); ++r) rows.push_back(a.row(r).to_string());
  return rows;
}

BitMatrix matrix_from_json_rows(const nlohmann::json& rows) {
  std::vector<std::string> strs;
  for (const auto& r : rows) strs.push_back(r.get<std::string>());
  return BitMatrix::from_rows(strs);
}

nlohmann::json inner_to_json(const std::variant<Independent, Markov1>& inner);

}  // namespace

nlohmann::json source_to_json(const SourceSpec& spec) {
  nlohmann::json j;
  j["model"] = spec.model_name();
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Independent>) {
          j["biases"] = m.biases;
        } else if constexpr (std::is_same_v<T, BoundedBias>) {
          j["n"] = m.n;
          j["e"] = m.e;
          if (m.biases) j["biases"] = *m.biases;
        } else if constexpr (std::is_same_v<T, Markov1>) {
          j["n"] = m.n;
          j["epsilon"] = m.epsilon;
          j["p_one_after_zero"] = m.p_one_after_zero;
          j["p_one_after_one"] = m.p_one_after_one;
          j["p_init"] = m.p_init;
        } else if constexpr (std::is_same_v<T, ObliviousBitFixing>) {
          j["fixed_mask"] = m.fixed_mask.to_string();
          j["fixed_values"] = m.fixed_values.to_string();
        } else if constexpr (std::is_same_v<T, NonObliviousBitFixing>) {
          j["rows"] = matrix_rows(m.a);
        } else if constexpr (std::is_same_v<T, LinearSubspace>) {
          j["inner"] = inner_to_json(m.inner);
          j["rows"] = matrix_rows(m.a);
        }
      },
      spec.model());
  return j;
}

namespace {

nlohmann::json inner_to_json(const std::variant<Independent, Markov1>& inner) {
  return std::visit(
      [](const auto& m) { return source_to_json(SourceSpec(m)); }, inner);
}

Independent independent_from_json(const nlohmann::json& j) {
  return Independent{j.at("biases").get<std::vector<double>>()};
}

Markov1 markov1_from_json(const nlohmann::json& j) {
  Markov1 m;
  m.n = j.at("n").get<size_t>();
  m.epsilon = j.at("epsilon").get<double>();
  m.p_one_after_zero = j.at("p_one_after_zero").get<double>();
  m.p_one_after_one = j.at("p_one_after_one").get<double>();
  m.p_init = j.value("p_init", 0.5);
  return m;
}

}  // namespace

SourceSpec source_from_json(const nlohmann::json& j) {
  try {
    const std::string model = j.at("model").get<std::string>();
    if (model == "independent") return SourceSpec(independent_from_json(j));
    if (model == "bounded_bias") {
      BoundedBias b;
      b.n = j.at("n").get<size_t>();
      b.e = j.at("e").get<double>();
      if (j.contains("biases")) b.biases = j["biases"].get<std::vector<double>>();
      return SourceSpec(std::move(b));
    }
    if (model == "markov1") return SourceSpec(markov1_from_json(j));
    if (model == "oblivious_bit_fixing") {
      ObliviousBitFixing o;
      o.fixed_mask = BitVec::from_string(j.at("fixed_mask").get<std::string>());
      o.fixed_values = BitVec::from_string(j.at("fixed_values").get<std::string>());
      return SourceSpec(std::move(o));
    }
    if (model == "non_oblivious_bit_fixing") {
      return SourceSpec(NonObliviousBitFixing{matrix_from_json_rows(j.at("rows"))});
    }
    if (model == "linear_subspace") {
      LinearSubspace s{Independent{}, matrix_from_json_rows(j.at("rows"))};
      const auto& inner = j.at("inner");
      const std::string inner_model = inner.at("model").get<std::string>();
      if (inner_model == "independent")
        s.inner = independent_from_json(inner);
      else if (inner_model == "markov1")
        s.inner = markov1_from_json(inner);
      else
        throw FormatError("subspace inner model must be independent or markov1");
      return SourceSpec(std::move(s));
    }
    throw FormatError("unknown source model: " + model);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid source spec: ") + e.what());
  }
}

SourceSpec load_source_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return source_from_json(j);
}

void save_source_spec(const SourceSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << source_to_json(spec).dump(2) << '\n';
}

}  // namespace linext
