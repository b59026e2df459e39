#include "flagein/curvature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flagein {

namespace {

void check_positive(std::span<const double> x) {
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error("metric coefficients must be positive and finite");
    }
  }
}

}  // namespace

double ricci_component(const Metric& metric, RootPair root) {
  metric.validate();
  const int m = metric.n + 1;
  int i = root.i, j = root.j;
  if (i > j) std::swap(i, j);  // the formula is i<->j symmetric via λ symmetry
  if (i < 1 || j > m || i == j) {
    throw std::out_of_range("(" + std::to_string(root.i) + "," + std::to_string(root.j) +
                            ") is not a root for n=" + std::to_string(metric.n));
  }
  const double lij = metric.value(i, j);
  double sum = 0.0;
  for (int k = 1; k <= m; ++k) {
    if (k == i || k == j) continue;
    const double lik = metric.value(i, k);
    const double lkj = metric.value(k, j);
    sum += lij / (lik * lkj) - lik / (lij * lkj) - lkj / (lij * lik);
  }
  return 1.0 / (2.0 * lij) + sum / (4.0 * m);
}

CurvatureSummary curvature_summary(const Metric& metric, double einstein_tolerance) {
  metric.validate();
  const FlagManifold manifold(metric.n);
  const int N = manifold.root_count();
  const int d = manifold.dimension();

  CurvatureSummary out;
  out.ricci.resize(N);
  for (int p = 0; p < N; ++p) {
    out.ricci[p] = ricci_component(metric, manifold.root_at(p));
  }

  double ricci_sum = 0.0;
  for (double r : out.ricci) ricci_sum += r;
  out.scalar_curvature = 2.0 * ricci_sum;

  double volume = 1.0;
  for (double l : metric.lambda) volume *= l * l;
  out.volume_factor = std::pow(volume, 1.0 / d);

  out.h_invariant = out.volume_factor * out.scalar_curvature;

  const double mean = ricci_sum / N;
  double dev = 0.0;
  for (double r : out.ricci) dev = std::max(dev, std::abs(r - mean));
  out.max_ricci_deviation = dev;
  if (dev < einstein_tolerance) out.einstein_constant = mean;
  return out;
}

std::vector<double> residual_system(std::span<const double> x, int n) {
  ResidualEvaluator eval(n);
  if (static_cast<int>(x.size()) != eval.unknowns()) {
    throw std::invalid_argument("residual_system: expected " +
                                std::to_string(eval.unknowns()) + " unknowns, got " +
                                std::to_string(x.size()));
  }
  check_positive(x);
  std::vector<double> f(eval.unknowns());
  eval.residual(x.data(), f.data());
  return f;
}

std::vector<double> residual_jacobian(std::span<const double> x, int n) {
  ResidualEvaluator eval(n);
  const int K = eval.unknowns();
  if (static_cast<int>(x.size()) != K) {
    throw std::invalid_argument("residual_jacobian: expected " + std::to_string(K) +
                                " unknowns, got " + std::to_string(x.size()));
  }
  check_positive(x);
  std::vector<double> jac(static_cast<std::size_t>(K) * K);
  eval.jacobian(x.data(), jac.data());
  return jac;
}

ResidualEvaluator::ResidualEvaluator(int n, const KernelOps& ops)
    : plan_(shared_eval_plan(n)),
      ops_(ops),
      lambda_(plan_.N),
      inv_(plan_.N),
      ricci_(plan_.N),
      deriv_(static_cast<std::size_t>(plan_.N) * plan_.N) {
  lambda_[0] = 1.0;  // λ_12 pinned by the gauge
}

void ResidualEvaluator::residual(const double* x, double* f) {
  const int N = plan_.N;
  for (int q = 1; q < N; ++q) lambda_[q] = x[q - 1];
  ops_.ricci(plan_, lambda_.data(), inv_.data(), ricci_.data());
  for (int p = 0; p + 1 < N; ++p) f[p] = ricci_[p] - ricci_[p + 1];
}

void ResidualEvaluator::jacobian(const double* x, double* jac) {
  const int N = plan_.N;
  const int K = N - 1;
  for (int q = 1; q < N; ++q) lambda_[q] = x[q - 1];
  ops_.ricci_derivative(plan_, lambda_.data(), inv_.data(), deriv_.data());
  for (int p = 0; p < K; ++p) {
    const double* row_p = deriv_.data() + static_cast<std::size_t>(p) * N;
    const double* row_next = row_p + N;
    double* out_row = jac + static_cast<std::size_t>(p) * K;
    for (int q = 0; q < K; ++q) {
      out_row[q] = row_p[q + 1] - row_next[q + 1];
    }
  }
}

}  // namespace flagein
