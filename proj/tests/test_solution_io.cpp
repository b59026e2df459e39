#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flagein/curvature.hpp"
#include "flagein/solution_io.hpp"

using namespace flagein;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "flagein_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SolutionFile sample_file() {
  SolutionFile file;
  file.meta.n = 4;
  file.meta.trials = 1000;
  file.meta.seed = 7;
  file.records.push_back(
      make_record(4, std::vector<double>(9, 1.0), 3.2e-13));  // bi-invariant
  file.records.push_back(
      make_record(4, std::vector<double>{1, 2, 3, 2, 3, 4, 1, 2, 1}, 1.1e-12));
  return file;
}

}  // namespace

TEST_CASE("solution CSV write/read round trip is byte-identical") {
  const auto dir = temp_dir();
  const auto path = dir / "roundtrip.csv";
  const SolutionFile file = sample_file();
  write_solutions(file, path, SolutionFormat::Csv);
  const std::string first = slurp(path);

  const SolutionFile back = read_solutions(path);
  REQUIRE(back.records.size() == file.records.size());
  CHECK(back.meta.n == 4);
  CHECK(back.meta.trials == 1000);
  CHECK(back.meta.seed == 7);
  CHECK(back.records[0].lambda == file.records[0].lambda);
  REQUIRE(back.records[0].einstein_constant.has_value());

  const auto path2 = dir / "roundtrip2.csv";
  write_solutions(back, path2, SolutionFormat::Csv);
  CHECK(slurp(path2) == first);
}

TEST_CASE("solution JSON write/read round trip is byte-identical") {
  const auto dir = temp_dir();
  const auto path = dir / "roundtrip.json";
  const SolutionFile file = sample_file();
  write_solutions(file, path, SolutionFormat::Json);
  const std::string first = slurp(path);
  const SolutionFile back = read_solutions(path);
  REQUIRE(back.records.size() == file.records.size());
  CHECK(back.records[1].lambda == file.records[1].lambda);
  const auto path2 = dir / "roundtrip2.json";
  write_solutions(back, path2, SolutionFormat::Json);
  CHECK(slurp(path2) == first);
}

TEST_CASE("bi-invariant n=4 row prints the reference digits") {
  const auto dir = temp_dir();
  const auto path = dir / "biinv.csv";
  SolutionFile file;
  file.meta.n = 4;
  file.records.push_back(make_record(4, std::vector<double>(9, 1.0), 3.2e-13));
  write_solutions(file, path, SolutionFormat::Csv);
  const std::string text = slurp(path);
  CHECK(text.find("7.00000000,1.00000000,7.00000000,0.35000000,") != std::string::npos);
  CHECK(text.find("1.00000,1.00000") != std::string::npos);
  CHECK(text.find("\r") == std::string::npos);  // LF only
}

TEST_CASE("empty record list produces a header-only file") {
  const auto dir = temp_dir();
  const auto path = dir / "empty.csv";
  SolutionFile file;
  file.meta.n = 2;
  write_solutions(file, path, SolutionFormat::Csv);
  const auto back = read_solutions(path);
  CHECK(back.records.empty());
  CHECK(back.meta.n == 2);
}

TEST_CASE("malformed input is rejected with the line number") {
  const auto dir = temp_dir();
  SUBCASE("non-positive lambda") {
    const auto path = dir / "badlambda.csv";
    std::ofstream out(path);
    out << "# flagein-solutions v1\n# n=2 trials=1 seed=0\n";
    out << "l_1_2,l_1_3,l_2_3,scalar_curvature,volume_factor,h_invariant,"
           "einstein_constant,residual_norm\n";
    out << "1.00000,-2.00000,1.00000,2.0,1.0,2.0,0.33,1e-12\n";
    out.close();
    CHECK_THROWS_WITH_AS(read_solutions(path),
                         doctest::Contains(":4"), ParseError);
  }
  SUBCASE("wrong column count names the line") {
    const auto path = dir / "badcols.csv";
    std::ofstream out(path);
    out << "# n=2 trials=1 seed=0\n";
    out << "l_1_2,l_1_3,l_2_3,scalar_curvature,volume_factor,h_invariant,"
           "einstein_constant,residual_norm\n";
    out << "1.00000,2.00000,1.00000,2.0,1.0\n";
    out.close();
    CHECK_THROWS_WITH_AS(read_solutions(path), doctest::Contains(":3"), ParseError);
  }
  SUBCASE("decimal commas get a conversion hint") {
    const auto path = dir / "commas.csv";
    std::ofstream out(path);
    out << "# n=2 trials=1 seed=0\n";
    out << "l_1_2,l_1_3,l_2_3,scalar_curvature,volume_factor,h_invariant,"
           "einstein_constant,residual_norm\n";
    out << "1,00000,2,00000,1,00000,2,0,1,0,2,0,0,33,1\n";
    out.close();
    CHECK_THROWS_WITH_AS(read_solutions(path),
                         doctest::Contains("decimal commas"), ParseError);
  }
}

TEST_CASE("su5 fixture loads with the reference rows intact") {
  const fs::path fixture = fs::path(FLAGEIN_SOURCE_DIR) / "data" / "su5_table.csv";
  const auto rows = read_su5_fixture(fixture);
  REQUIRE(rows.size() == 396);

  // Bi-invariant row present
  bool biinv = false;
  // Integer KE row (1,2,3,2,3,4,1,2,1) present with the printed S/V/H
  bool ke = false;
  for (const auto& row : rows) {
    if (row.lambda == std::vector<double>(10, 1.0)) {
      biinv = true;
      CHECK(row.scalar_curvature == 7.0);
      CHECK(row.volume_factor == 1.0);
      CHECK(row.h_invariant == 7.0);
    }
    if (row.lambda == std::vector<double>{1, 1, 2, 3, 2, 3, 4, 1, 2, 1}) {
      ke = true;
      CHECK(row.scalar_curvature == 4.0);
      CHECK(row.volume_factor == doctest::Approx(1.76172959).epsilon(1e-9));
      CHECK(row.h_invariant == doctest::Approx(7.046918359).epsilon(1e-9));
    }
  }
  CHECK(biinv);
  CHECK(ke);

  // Every transcribed row satisfies the Einstein condition to the
  // rounding-limited tolerance, and the printed S/V/H match recomputation.
  for (const auto& row : rows) {
    const auto summary = curvature_summary(Metric{4, row.lambda});
    CHECK(summary.max_ricci_deviation < kFileEinsteinTolerance);
    CHECK(std::abs(summary.scalar_curvature - row.scalar_curvature) < 1e-5);
    CHECK(std::abs(summary.volume_factor - row.volume_factor) < 1e-5);
    CHECK(std::abs(summary.h_invariant - row.h_invariant) < 1e-5);
  }
}

TEST_CASE("class file round trip and table rendering") {
  const auto dir = temp_dir();
  std::vector<ClassBlock> blocks(2);
  blocks[0].class_id = 1;
  blocks[0].class_h = 2.5;
  blocks[0].members.push_back(make_record(2, std::vector<double>{1.0, 1.0}, 1e-13));
  blocks[1].class_id = 2;
  blocks[1].class_h = 2.519842;
  blocks[1].is_kaehler_einstein = true;
  blocks[1].members.push_back(make_record(2, std::vector<double>{2.0, 1.0}, 1e-13));
  blocks[1].members.push_back(make_record(2, std::vector<double>{0.5, 0.5}, 1e-13));

  const auto path = dir / "classes.csv";
  write_classes(blocks, 2, path);
  const auto [n, back] = read_classes(path);
  CHECK(n == 2);
  REQUIRE(back.size() == 2);
  CHECK(back[0].members.size() == 1);
  CHECK(back[1].members.size() == 2);
  CHECK(back[1].is_kaehler_einstein);
  CHECK(back[1].members[0].lambda == blocks[1].members[0].lambda);

  const std::string md = render_table(back, n, TableFormat::Markdown);
  CHECK(md.find("## Class 1") != std::string::npos);
  CHECK(md.find("Kähler–Einstein") != std::string::npos);
  // one table row per member: members preserved through rendering
  std::size_t row_count = 0, at = 0;
  while ((at = md.find("\n| 1.00000 ", at)) != std::string::npos) {
    ++row_count;
    at += 1;
  }
  CHECK(row_count == 3);

  const std::string csv = render_table(back, n, TableFormat::Csv);
  CHECK(csv.find("class_id,") == 0);

  const std::string empty_md = render_table({}, 2, TableFormat::Markdown);
  CHECK(!empty_md.empty());
}
