#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "flagein/metric.hpp"

namespace flagein {

/// Permutation of {1..n+1}: sigma[k-1] is the image of k.
using Permutation = std::vector<int>;

/// Raised when grouping detects an internal inconsistency (H spread
/// inside a class, or Kähler–Einstein metrics matching zero or several
/// classes) — a sign of tolerance misconfiguration or missing solutions.
class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Isometry class of solutions under the S_{n+1} index action combined
/// with uniform rescaling.
struct IsometryClass {
  std::vector<double> canonical;   // full N-vector, λ_12-normalized, orbit-minimal
  std::vector<int> members;        // indices into the grouped solution list
  double h_value = 0.0;            // shared scale invariant H of the members
  double s_value = 0.0;            // scalar curvature of the canonical representative
  bool is_kaehler_einstein = false;
  std::optional<Permutation> kaehler_permutation;
  bool shares_h_value = false;     // equal H with a distinct class (flagged, not merged)
};

/// Index action on metrics: result μ_ij = λ_{sort(σ⁻¹(i), σ⁻¹(j))}.
/// Throws std::invalid_argument when sigma is not a permutation of
/// {1..n+1}.
Metric apply_permutation(const Metric& metric, const Permutation& sigma);

/// Orbit-canonical representative of a solution x (λ_12 = 1 implied):
/// over all (n+1)! permutations, apply the index action, rescale so
/// λ_12 = 1, round to 4 decimals, and keep the lexicographically
/// smallest full N-vector.
std::vector<double> canonical_form(std::span<const double> x, int n);

/// Partition deduped solutions into isometry classes by canonical form
/// (per-coordinate tolerance 1e-3). Classes come back sorted by H then
/// canonical vector, with equal-H distinct classes flagged.
/// Throws ClassificationError when H spreads more than 1e-6 in a class.
std::vector<IsometryClass> group_classes(const std::vector<std::vector<double>>& solutions,
                                         int n);

/// The (n+1)!/2 Kähler–Einstein metrics: λ_ij = |w(i) − w(j)| over
/// permutations w, rescaled to the λ_12 = 1 gauge and deduplicated.
/// Sorted lexicographically.
std::vector<Metric> kaehler_einstein_metrics(int n);

/// Marks the single class containing the Kähler–Einstein metrics and
/// stores a generating permutation as witness.
/// Throws ClassificationError when no class or several classes match.
void match_kaehler(std::vector<IsometryClass>& classes, int n);

}  // namespace flagein
