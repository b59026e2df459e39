#pragma once

#include <string_view>

#include "flagein/eval_plan.hpp"

namespace flagein {

/// Batch evaluation kernels for the curvature arithmetic. Each ISA
/// variant implements the same operation tree so that results are
/// bit-identical across variants (the build disables FP contraction).
///
/// Contracts (no validation; callers guarantee λ > 0 and buffer sizes):
///   ricci:            lambda[N] -> ricci_out[N], inv[N] scratch
///   ricci_derivative: lambda[N] -> deriv_out[N*N] row-major
///                     (entry p*N + u is ∂r_p/∂λ_u), inv[N] scratch
struct KernelOps {
  const char* name;
  void (*ricci)(const EvalPlan& plan, const double* lambda, double* inv,
                double* ricci_out);
  void (*ricci_derivative)(const EvalPlan& plan, const double* lambda,
                           double* inv, double* deriv_out);
};

/// Portable reference kernels.
const KernelOps& scalar_kernels();

/// AVX2 kernels, or nullptr when not compiled in or not supported by the
/// running CPU.
const KernelOps* avx2_kernels();

/// True when the CPU (and OS) support AVX2.
bool cpu_has_avx2();

/// Process-wide kernel selection. Defaults to the best supported variant.
const KernelOps& active_kernels();

/// Select kernels by name: "auto", "scalar", or "avx2".
/// Returns false (and leaves the selection unchanged) when the name is
/// unknown or the variant is unavailable.
bool select_kernels(std::string_view name);

}  // namespace flagein
