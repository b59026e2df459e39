#pragma once

#include <optional>
#include <vector>

#include "flagein/root_system.hpp"

namespace flagein {

/// An SU(n+1)-invariant metric on SU(n+1)/T^n: one positive coefficient
/// λ_ij per positive root, relative to the negative Cartan–Killing form.
/// Coefficients are stored in lexicographic root order; the symmetric
/// extension λ_ji = λ_ij is implied.
struct Metric {
  int n = 0;
  std::vector<double> lambda;

  Metric() = default;
  Metric(int rank, std::vector<double> values) : n(rank), lambda(std::move(values)) {}

  /// Symmetric coefficient lookup by 1-based indices, i != j.
  double value(int i, int j) const;

  /// Throws std::invalid_argument on size mismatch, std::domain_error on
  /// a non-positive or non-finite coefficient.
  void validate() const;
};

/// Everything derived from the Ricci components of one metric.
struct CurvatureSummary {
  std::vector<double> ricci;               // r_ij in lexicographic root order
  double scalar_curvature = 0.0;           // S = 2 Σ r_ij
  double volume_factor = 0.0;              // V^{1/d} = (Π λ_ij²)^{1/d}
  double h_invariant = 0.0;                // H = V^{1/d} · S
  std::optional<double> einstein_constant; // mean(r) when Ricci is constant
  double max_ricci_deviation = 0.0;        // max |r_p − mean(r)|
};

}  // namespace flagein
