#pragma once

#include <cstdint>
#include <vector>

namespace flagein {

/// Precomputed index tables that turn the Ricci-component sum into flat
/// array arithmetic. For root p = (i, j) and step t (one per k outside
/// {i, j}), idx_a holds the flat index of the root {i, k} and idx_b the
/// flat index of {k, j}. Both tables are step-major (entry t*N + p) so a
/// SIMD lane block of four consecutive roots loads contiguous indices.
struct EvalPlan {
  int n = 0;        // torus rank
  int m = 0;        // n + 1
  int N = 0;        // number of positive roots
  int steps = 0;    // n - 1 summands per root
  double coeff = 0; // 1 / (4(n+1))
  std::vector<std::int32_t> idx_a;
  std::vector<std::int32_t> idx_b;

  static EvalPlan build(int n);
};

/// Cached per-rank plan; safe to call concurrently.
const EvalPlan& shared_eval_plan(int n);

}  // namespace flagein
