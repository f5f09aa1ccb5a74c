#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "linext/gf2.hpp"
#include "linext/matgen.hpp"
#include "linext/sources.hpp"

using namespace linext;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "linext_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(LINEXT_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

}  // namespace

TEST_CASE("cli: bch info reports the code parameters") {
  const CliResult r = run_cli("bch info --kappa 4 --t 2");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["n"] == 15);
  CHECK(j["m"] == 7);
  CHECK(j["g"] == "111010001");
}

TEST_CASE("cli: bound from explicit parameters") {
  const CliResult r = run_cli("bound --hmin 226.16 --m 180 --n 512 --model independent");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["uniform_expectation_log2"].get<double>() ==
        doctest::Approx(-47.16).epsilon(1e-6));
}

TEST_CASE("cli: identity extraction round trips a block") {
  const fs::path dir = work_dir();
  TransformMatrix id;
  id.matrix = BitMatrix::identity(4);
  id.density = 0.5;
  save_matrix(id, dir / "id4.bin");

  std::ofstream(dir / "x.bin", std::ios::binary) << static_cast<char>(0x0D);
  const CliResult r =
      run_cli("extract --matrix " + (dir / "id4.bin").string() + " --in " +
              (dir / "x.bin").string() + " --out " + (dir / "y.bin").string() +
              " --in-bits 4");
  REQUIRE(r.exit_code == 0);
  const std::string y = slurp(dir / "y.bin");
  REQUIRE(y.size() == 1);
  CHECK(static_cast<uint8_t>(y[0]) == 0x0D);
}

TEST_CASE("cli: exit codes distinguish usage, capacity and invalid input") {
  CHECK(run_cli("genmat --bogus-flag").exit_code == 2);
  CHECK(run_cli("nosuchcommand").exit_code == 2);

  const fs::path dir = work_dir();
  const CliResult bad_density =
      run_cli("genmat --kind sparse --n 8 --m 4 -p 0.6 --out " +
              (dir / "never.bin").string());
  CHECK(bad_density.exit_code == 4);
  CHECK(bad_density.err.find("error: invalid-input:") != std::string::npos);

  // capacity guard: exact verification with m past the transform limit
  save_matrix(gen_uniform(30, 27, 1), dir / "wide.bin");
  save_source_spec(SourceSpec(Independent{std::vector<double>(30, 0.4)}),
                   dir / "wide_spec.json");
  const CliResult capacity =
      run_cli("verify exact --matrix " + (dir / "wide.bin").string() +
              " --spec " + (dir / "wide_spec.json").string());
  CHECK(capacity.exit_code == 3);
  CHECK(capacity.err.find("error: capacity:") != std::string::npos);

  std::ofstream(dir / "garbage.bin", std::ios::binary) << "not a matrix";
  const CliResult garbage =
      run_cli("verify exact --matrix " + (dir / "garbage.bin").string() +
              " --spec " + (dir / "wide_spec.json").string());
  CHECK(garbage.exit_code == 4);
}

TEST_CASE("cli: verify reports rho and bounds as json") {
  const fs::path dir = work_dir();
  const CliResult gen = run_cli(
      "genmat --kind uniform --n 10 --m 4 --seed 5 --out " +
      (dir / "m10.bin").string());
  REQUIRE(gen.exit_code == 0);

  std::vector<double> biases;
  for (int i = 0; i < 10; ++i) biases.push_back(0.35 + 0.03 * i);
  save_source_spec(SourceSpec(Independent{biases}), dir / "ind.json");

  for (const std::string mode : {"exact", "oracle"}) {
    const CliResult r = run_cli("verify " + mode + " --matrix " +
                                (dir / "m10.bin").string() + " --spec " +
                                (dir / "ind.json").string());
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["mode"] == mode);
    CHECK(j["rho"].get<double>() >= 0.0);
    CHECK(j["rho"].get<double>() <= 1.0);
    CHECK(j["bounds"]["uniform_expectation"]["applicable"] == true);
    CHECK(j.contains("runtime_ms"));
  }

  const CliResult mc = run_cli("verify mc --samples 2000 --seed 9 --matrix " +
                               (dir / "m10.bin").string() + " --spec " +
                               (dir / "ind.json").string());
  REQUIRE(mc.exit_code == 0);
  const json j = json::parse(mc.out);
  CHECK(j["samples"] == 2000);
  CHECK(j["ci_low"].get<double>() <= j["ci_high"].get<double>());
}

TEST_CASE("cli: bitfixing verification consumes a spec file") {
  const fs::path dir = work_dir();
  save_source_spec(make_bitfixing(8, 16, 3), dir / "bf.json");
  REQUIRE(run_cli("genmat --kind sparse --n 16 --m 6 -p 0.5 --seed 4 --out " +
                  (dir / "m16.bin").string())
              .exit_code == 0);
  const CliResult r =
      run_cli("verify bitfixing --matrix " + (dir / "m16.bin").string() +
              " --spec " + (dir / "bf.json").string());
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  const double rho = j["rho"].get<double>();
  const int rank_am = j["rank_am"].get<int>();
  CHECK(rho == doctest::Approx(1.0 - std::exp2(rank_am - 6)).epsilon(1e-12));
  CHECK(j["bounds"]["bitfixing_prob"]["log2"].get<double>() == -2.0);
}

TEST_CASE("cli: genmat can emit a weight distribution csv") {
  const fs::path dir = work_dir();
  const CliResult r = run_cli(
      "genmat --kind bch --kappa 4 --t 2 --out " + (dir / "bch.bin").string() +
      " --wdist-out " + (dir / "bch.wdist").string());
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(dir / "bch.wdist");
  CHECK(csv.rfind("weight,count,binomial_reference,relative_deviation", 0) == 0);
  // designed distance 5: weights 1..4 are empty
  CHECK(csv.find("\n1,0,") != std::string::npos);
  CHECK(csv.find("\n4,0,") != std::string::npos);
}

TEST_CASE("cli: a full pipeline is byte-for-byte reproducible") {
  const fs::path dir = work_dir();
  std::vector<double> biases;
  for (int i = 0; i < 16; ++i) biases.push_back(0.4 + 0.01 * i);
  save_source_spec(SourceSpec(Independent{biases}), dir / "pipe_spec.json");

  auto run_pipeline = [&](const std::string& tag) {
    const std::string m = (dir / ("m_" + tag + ".bin")).string();
    const std::string raw = (dir / ("raw_" + tag + ".bin")).string();
    const std::string y = (dir / ("y_" + tag + ".bin")).string();
    REQUIRE(run_cli("genmat --kind sparse --n 16 --m 8 --seed 7 --out " + m)
                .exit_code == 0);
    REQUIRE(run_cli("source gen --spec " + (dir / "pipe_spec.json").string() +
                    " --len 1600 --seed 3 --out " + raw)
                .exit_code == 0);
    REQUIRE(run_cli("extract --matrix " + m + " --in " + raw + " --out " + y)
                .exit_code == 0);
    const CliResult verify =
        run_cli("verify mc --samples 20000 --seed 11 --matrix " + m +
                " --spec " + (dir / "pipe_spec.json").string());
    REQUIRE(verify.exit_code == 0);
    json report = json::parse(verify.out);
    report.erase("runtime_ms");  // the one field allowed to differ
    return std::tuple{slurp(m), slurp(raw), slurp(y), report.dump()};
  };

  CHECK(run_pipeline("a") == run_pipeline("b"));
}

TEST_CASE("cli: source gen concatenates seeded draws") {
  const fs::path dir = work_dir();
  save_source_spec(SourceSpec(Independent{{1.0, 0.0, 1.0}}), dir / "pat.json");
  REQUIRE(run_cli("source gen --spec " + (dir / "pat.json").string() +
                  " --len 9 --seed 1 --out " + (dir / "pat.bin").string())
              .exit_code == 0);
  const std::string bits = slurp(dir / "pat.bin");
  REQUIRE(bits.size() == 2);
  // pattern 101 repeated three times = 101101101, packed lsb-first
  CHECK(static_cast<uint8_t>(bits[0]) == 0b01101101);
  CHECK(static_cast<uint8_t>(bits[1]) == 0b00000001);
}
