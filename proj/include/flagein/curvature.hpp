#pragma once

#include <span>
#include <vector>

#include "flagein/eval_plan.hpp"
#include "flagein/kernels.hpp"
#include "flagein/metric.hpp"

namespace flagein {

/// A metric counts as Einstein when max |r_p − mean(r)| falls below this,
/// in the λ_12 = 1 gauge. The solver converges to ~1e-10 residuals, so
/// 1e-8 leaves margin.
inline constexpr double kEinsteinTolerance = 1e-8;

/// Ricci component r_ij of an invariant metric:
///   r_ij = 1/(2λ_ij) + (1/(4(n+1))) Σ_{k≠i,j} [ λ_ij/(λ_ik λ_kj)
///          − λ_ik/(λ_ij λ_kj) − λ_jk/(λ_ij λ_ik) ].
/// Accepts the pair in either order (λ is symmetric).
/// Throws std::domain_error when the metric has a non-positive entry.
double ricci_component(const Metric& metric, RootPair root);

/// All Ricci-derived quantities in one pass. einstein_constant is present
/// iff max_ricci_deviation < einstein_tolerance.
CurvatureSummary curvature_summary(const Metric& metric,
                                   double einstein_tolerance = kEinsteinTolerance);

/// Residual of the Einstein system in the λ_12 = 1 gauge: x supplies λ
/// for roots 2..N in lexicographic order and F_p = r_p − r_{p+1}.
/// F = 0 iff the metric is Einstein. Length of x must be N−1.
std::vector<double> residual_system(std::span<const double> x, int n);

/// Exact analytic Jacobian ∂F_p/∂x_q of residual_system, row-major
/// (N−1)×(N−1).
std::vector<double> residual_jacobian(std::span<const double> x, int n);

/// Allocation-free residual/Jacobian evaluation for the solver hot path.
/// Not thread-safe; use one instance per worker. Callers must pass
/// strictly positive x (the solver keeps iterates >= its positivity floor).
class ResidualEvaluator {
 public:
  ResidualEvaluator(int n, const KernelOps& ops);
  explicit ResidualEvaluator(int n) : ResidualEvaluator(n, active_kernels()) {}

  int unknowns() const { return plan_.N - 1; }
  int root_count() const { return plan_.N; }

  /// f must hold N−1 doubles.
  void residual(const double* x, double* f);

  /// jac must hold (N−1)² doubles, row-major.
  void jacobian(const double* x, double* jac);

 private:
  const EvalPlan& plan_;
  const KernelOps& ops_;
  std::vector<double> lambda_, inv_, ricci_, deriv_;
};

}  // namespace flagein
