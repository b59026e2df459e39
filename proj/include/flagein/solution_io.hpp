#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flagein/classify.hpp"
#include "flagein/metric.hpp"

namespace flagein {

/// File-level Einstein check tolerance: rows carry λ rounded to 5
/// decimals, which limits the achievable Ricci deviation to ~1e-5..1e-4
/// depending on scale; 5e-4 accepts that while rejecting genuine
/// perturbations.
inline constexpr double kFileEinsteinTolerance = 5e-4;

/// Malformed input file; the message names the path and line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver-configuration echo stored in solution file headers.
struct SolveMeta {
  int version = 1;
  int n = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double box_max = 10.0;
  double residual_tolerance = 1e-10;
  double positivity_threshold = 1e-4;
  int rounding_decimals = 5;
};

/// A converged, normalized metric plus derived quantities. lambda holds
/// all N coefficients in lexicographic root order with lambda[0] = λ_12 = 1;
/// the derived quantities are evaluated on exactly these (rounded) values,
/// residual_norm is the converged pre-rounding max|F|.
struct SolutionRecord {
  std::vector<double> lambda;
  double scalar_curvature = 0.0;
  double volume_factor = 0.0;
  double h_invariant = 0.0;
  std::optional<double> einstein_constant;
  double residual_norm = 0.0;
};

struct SolutionFile {
  SolveMeta meta;
  std::vector<SolutionRecord> records;
};

enum class SolutionFormat { Csv, Json };

/// Builds the record for a deduped solution x (λ for roots 2..N, λ_12 = 1
/// implied): derived quantities from the full λ vector, Einstein constant
/// set to mean Ricci (the underlying trial converged).
SolutionRecord make_record(int n, std::span<const double> x, double residual_norm);

/// CSV: '#'-prefixed header echo, column names l_1_2.., λ at 5 decimals,
/// derived quantities at 9 significant digits, UTF-8, LF. JSON mirrors the
/// same data. write → read → write is byte-identical.
void write_solutions(const SolutionFile& file, const std::filesystem::path& path,
                     SolutionFormat format);

/// Exact inverse of write_solutions on its own output (format sniffed).
/// Throws ParseError naming the offending line on malformed rows, wrong
/// column counts, or non-positive λ; decimal-comma input gets a
/// conversion hint.
SolutionFile read_solutions(const std::filesystem::path& path);

/// One row of the SU(5)/T^4 reference table: full λ vector (λ_12 = 1
/// prepended) plus the printed S, V^{1/d}, H.
struct FixtureRow {
  std::vector<double> lambda;
  double scalar_curvature = 0.0;
  double volume_factor = 0.0;
  double h_invariant = 0.0;
};

/// Loads the transcribed reference table (396 rows, dot decimals).
std::vector<FixtureRow> read_su5_fixture(const std::filesystem::path& path);

/// One isometry class with its member records, ready for rendering.
struct ClassBlock {
  int class_id = 0;
  bool is_kaehler_einstein = false;
  double class_h = 0.0;
  std::vector<SolutionRecord> members;
};

std::vector<ClassBlock> make_class_blocks(const std::vector<IsometryClass>& classes,
                                          const std::vector<SolutionRecord>& records);

void write_classes(const std::vector<ClassBlock>& blocks, int n,
                   const std::filesystem::path& path);

/// Returns (n, blocks).
std::pair<int, std::vector<ClassBlock>> read_classes(const std::filesystem::path& path);

enum class TableFormat { Markdown, Csv };

/// One block per class (members' λ vectors with S, V^{1/d}, H per member),
/// classes sorted by H ascending.
std::string render_table(const std::vector<ClassBlock>& blocks, int n,
                         TableFormat format);

}  // namespace flagein
