#pragma once

// Per-root scalar evaluation shared by the scalar kernels and the SIMD
// remainder lanes. The SIMD kernels replicate this operation tree
// verbatim per lane; keep any change mirrored there or bit-equivalence
// breaks.

#include "flagein/eval_plan.hpp"

namespace flagein::detail {

inline double ricci_root(const EvalPlan& plan, const double* lam, const double* inv,
                         int p) {
  const int N = plan.N;
  const double lp = lam[p];
  const double rlp = inv[p];
  double acc = 0.0;
  for (int t = 0; t < plan.steps; ++t) {
    const int ia = plan.idx_a[static_cast<std::size_t>(t) * N + p];
    const int ib = plan.idx_b[static_cast<std::size_t>(t) * N + p];
    const double a = lam[ia], b = lam[ib];
    const double ra = inv[ia], rb = inv[ib];
    acc = acc + (lp * (ra * rb) - a * (rlp * rb) - b * (rlp * ra));
  }
  return 0.5 * rlp + plan.coeff * acc;
}

inline void ricci_derivative_root(const EvalPlan& plan, const double* lam,
                                  const double* inv, int p, double* row) {
  const int N = plan.N;
  const double lp = lam[p];
  const double rlp = inv[p];
  const double rlp2 = rlp * rlp;
  double acc = 0.0;
  for (int t = 0; t < plan.steps; ++t) {
    const int ia = plan.idx_a[static_cast<std::size_t>(t) * N + p];
    const int ib = plan.idx_b[static_cast<std::size_t>(t) * N + p];
    const double a = lam[ia], b = lam[ib];
    const double ra = inv[ia], rb = inv[ib];
    const double ra2 = ra * ra;
    const double rb2 = rb * rb;
    acc = acc + ((ra * rb + a * (rlp2 * rb)) + b * (rlp2 * ra));
    row[ia] = plan.coeff * (b * (rlp * ra2) - lp * (ra2 * rb) - rlp * rb);
    row[ib] = plan.coeff * (a * (rlp * rb2) - lp * (ra * rb2) - rlp * ra);
  }
  row[p] = plan.coeff * acc - 0.5 * rlp2;
}

}  // namespace flagein::detail
