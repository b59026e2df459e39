#include <cstring>

#include "flagein/kernels.hpp"
#include "kernels_detail.hpp"

namespace flagein {

namespace {

void ricci_scalar(const EvalPlan& plan, const double* lambda, double* inv,
                  double* ricci_out) {
  const int N = plan.N;
  for (int p = 0; p < N; ++p) inv[p] = 1.0 / lambda[p];
  for (int p = 0; p < N; ++p) {
    ricci_out[p] = detail::ricci_root(plan, lambda, inv, p);
  }
}

void ricci_derivative_scalar(const EvalPlan& plan, const double* lambda, double* inv,
                             double* deriv_out) {
  const int N = plan.N;
  for (int p = 0; p < N; ++p) inv[p] = 1.0 / lambda[p];
  std::memset(deriv_out, 0, sizeof(double) * static_cast<std::size_t>(N) * N);
  for (int p = 0; p < N; ++p) {
    detail::ricci_derivative_root(plan, lambda, inv, p, deriv_out + static_cast<std::size_t>(p) * N);
  }
}

}  // namespace

const KernelOps& scalar_kernels() {
  static const KernelOps ops{"scalar", &ricci_scalar, &ricci_derivative_scalar};
  return ops;
}

}  // namespace flagein
