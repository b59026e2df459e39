// End-to-end checks of the command-line interface: exit-code contract,
// error paths, and cross-kernel reproducibility of output files.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flagein/kernels.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = FLAGEIN_CLI_PATH;

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "flagein_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("solve --n 2") == 2);              // missing required flags
  CHECK(run("frobnicate") == 2);               // unknown subcommand
  CHECK(run("table --in x --format yaml") == 2);
  CHECK(run("--kernel avx9 ke --n 2") == 2);
}

TEST_CASE("solve, classify, and table run end to end") {
  const auto dir = work_dir();
  const auto sol = dir / "n2.csv";
  const auto cls = dir / "n2_classes.csv";
  CHECK(run("solve --n 2 --trials 500 --seed 5 --out '" + sol.string() + "'") == 0);
  CHECK(run("verify --in '" + sol.string() + "'") == 0);
  CHECK(run("classify --in '" + sol.string() + "' --out '" + cls.string() + "'") == 0);
  CHECK(run("table --in '" + cls.string() + "' --format markdown") == 0);
  CHECK(run("table --in '" + cls.string() + "' --format csv") == 0);
  CHECK(run("ke --n 3") == 0);
}

TEST_CASE("verify fails on a perturbed row") {
  const auto dir = work_dir();
  const auto sol = dir / "n2_perturbed.csv";
  REQUIRE(run("solve --n 2 --trials 500 --seed 5 --out '" + sol.string() + "'") == 0);
  std::string text = slurp(sol);
  // λ_13 of the bi-invariant row: 1.00000,1.00000,1.00000 -> 1.01000
  const auto at = text.find("1.00000,1.00000,1.00000");
  REQUIRE(at != std::string::npos);
  text.replace(at, 23, "1.00000,1.01000,1.00000");
  std::ofstream(sol, std::ios::binary) << text;
  CHECK(run("verify --in '" + sol.string() + "'") == 1);
}

TEST_CASE("classify fails when the KE class is missing") {
  const auto dir = work_dir();
  const auto sol = dir / "biinv_only.csv";
  std::ofstream out(sol, std::ios::binary);
  out << "# flagein-solutions v1\n# n=2 trials=1 seed=0\n";
  out << "l_1_2,l_1_3,l_2_3,scalar_curvature,volume_factor,h_invariant,"
         "einstein_constant,residual_norm\n";
  out << "1.00000,1.00000,1.00000,2.50000000,1.00000000,2.50000000,"
         "0.41666667,1.00000000e-13\n";
  out.close();
  CHECK(run("classify --in '" + sol.string() + "'") == 1);
}

TEST_CASE("missing input files exit nonzero") {
  CHECK(run("verify --in /nonexistent/file.csv") == 1);
  CHECK(run("table --in /nonexistent/classes.csv") == 1);
}

TEST_CASE("scalar and AVX2 kernels produce byte-identical solution files") {
  if (flagein::avx2_kernels() == nullptr) {
    MESSAGE("AVX2 unavailable; cross-kernel file check skipped");
    return;
  }
  const auto dir = work_dir();
  const auto a = dir / "n3_scalar.csv";
  const auto b = dir / "n3_avx2.csv";
  REQUIRE(run("--kernel scalar solve --n 3 --trials 3000 --seed 13 --out '" +
              a.string() + "'") == 0);
  REQUIRE(run("--kernel avx2 solve --n 3 --trials 3000 --seed 13 --out '" +
              b.string() + "'") == 0);
  const std::string sa = slurp(a), sb = slurp(b);
  REQUIRE(!sa.empty());
  CHECK(sa == sb);
}
