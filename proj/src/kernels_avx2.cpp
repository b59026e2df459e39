// AVX2 variants of the curvature kernels: four roots per lane block, the
// same per-lane operation tree as kernels_detail.hpp, scalar tail via the
// shared per-root routines. Compiled with -mavx2 in this TU only; callers
// must gate on cpu_has_avx2().

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

#include "flagein/kernels.hpp"
#include "kernels_detail.hpp"

namespace flagein {

namespace {

void compute_reciprocals(const double* lambda, double* inv, int N) {
  const __m256d one = _mm256_set1_pd(1.0);
  int p = 0;
  for (; p + 4 <= N; p += 4) {
    _mm256_storeu_pd(inv + p, _mm256_div_pd(one, _mm256_loadu_pd(lambda + p)));
  }
  for (; p < N; ++p) inv[p] = 1.0 / lambda[p];
}

void ricci_avx2(const EvalPlan& plan, const double* lambda, double* inv,
                double* ricci_out) {
  const int N = plan.N;
  compute_reciprocals(lambda, inv, N);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d coeff = _mm256_set1_pd(plan.coeff);
  int p = 0;
  for (; p + 4 <= N; p += 4) {
    const __m256d lp = _mm256_loadu_pd(lambda + p);
    const __m256d rlp = _mm256_loadu_pd(inv + p);
    __m256d acc = _mm256_setzero_pd();
    for (int t = 0; t < plan.steps; ++t) {
      const auto* ia = plan.idx_a.data() + static_cast<std::size_t>(t) * N + p;
      const auto* ib = plan.idx_b.data() + static_cast<std::size_t>(t) * N + p;
      const __m128i via = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ia));
      const __m128i vib = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ib));
      const __m256d a = _mm256_i32gather_pd(lambda, via, 8);
      const __m256d ra = _mm256_i32gather_pd(inv, via, 8);
      const __m256d b = _mm256_i32gather_pd(lambda, vib, 8);
      const __m256d rb = _mm256_i32gather_pd(inv, vib, 8);
      const __m256d t1 = _mm256_mul_pd(lp, _mm256_mul_pd(ra, rb));
      const __m256d t2 = _mm256_mul_pd(a, _mm256_mul_pd(rlp, rb));
      const __m256d t3 = _mm256_mul_pd(b, _mm256_mul_pd(rlp, ra));
      acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_sub_pd(t1, t2), t3));
    }
    _mm256_storeu_pd(ricci_out + p, _mm256_add_pd(_mm256_mul_pd(half, rlp),
                                                  _mm256_mul_pd(coeff, acc)));
  }
  for (; p < N; ++p) ricci_out[p] = detail::ricci_root(plan, lambda, inv, p);
}

void ricci_derivative_avx2(const EvalPlan& plan, const double* lambda, double* inv,
                           double* deriv_out) {
  const int N = plan.N;
  compute_reciprocals(lambda, inv, N);
  std::memset(deriv_out, 0, sizeof(double) * static_cast<std::size_t>(N) * N);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d coeff = _mm256_set1_pd(plan.coeff);
  int p = 0;
  for (; p + 4 <= N; p += 4) {
    const __m256d lp = _mm256_loadu_pd(lambda + p);
    const __m256d rlp = _mm256_loadu_pd(inv + p);
    const __m256d rlp2 = _mm256_mul_pd(rlp, rlp);
    __m256d acc = _mm256_setzero_pd();
    for (int t = 0; t < plan.steps; ++t) {
      const auto* ia = plan.idx_a.data() + static_cast<std::size_t>(t) * N + p;
      const auto* ib = plan.idx_b.data() + static_cast<std::size_t>(t) * N + p;
      const __m128i via = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ia));
      const __m128i vib = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ib));
      const __m256d a = _mm256_i32gather_pd(lambda, via, 8);
      const __m256d ra = _mm256_i32gather_pd(inv, via, 8);
      const __m256d b = _mm256_i32gather_pd(lambda, vib, 8);
      const __m256d rb = _mm256_i32gather_pd(inv, vib, 8);
      const __m256d ra2 = _mm256_mul_pd(ra, ra);
      const __m256d rb2 = _mm256_mul_pd(rb, rb);
      acc = _mm256_add_pd(
          acc, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ra, rb),
                                           _mm256_mul_pd(a, _mm256_mul_pd(rlp2, rb))),
                             _mm256_mul_pd(b, _mm256_mul_pd(rlp2, ra))));
      const __m256d da = _mm256_mul_pd(
          coeff, _mm256_sub_pd(_mm256_sub_pd(_mm256_mul_pd(b, _mm256_mul_pd(rlp, ra2)),
                                             _mm256_mul_pd(lp, _mm256_mul_pd(ra2, rb))),
                               _mm256_mul_pd(rlp, rb)));
      const __m256d db = _mm256_mul_pd(
          coeff, _mm256_sub_pd(_mm256_sub_pd(_mm256_mul_pd(a, _mm256_mul_pd(rlp, rb2)),
                                             _mm256_mul_pd(lp, _mm256_mul_pd(ra, rb2))),
                               _mm256_mul_pd(rlp, ra)));
      alignas(32) double sa[4], sb[4];
      _mm256_store_pd(sa, da);
      _mm256_store_pd(sb, db);
      for (int l = 0; l < 4; ++l) {
        deriv_out[static_cast<std::size_t>(p + l) * N + ia[l]] = sa[l];
        deriv_out[static_cast<std::size_t>(p + l) * N + ib[l]] = sb[l];
      }
    }
    const __m256d diag = _mm256_sub_pd(_mm256_mul_pd(coeff, acc),
                                       _mm256_mul_pd(half, rlp2));
    alignas(32) double sd[4];
    _mm256_store_pd(sd, diag);
    for (int l = 0; l < 4; ++l) {
      deriv_out[static_cast<std::size_t>(p + l) * N + (p + l)] = sd[l];
    }
  }
  for (; p < N; ++p) {
    detail::ricci_derivative_root(plan, lambda, inv, p,
                                  deriv_out + static_cast<std::size_t>(p) * N);
  }
}

}  // namespace

namespace detail {

const KernelOps& avx2_kernel_table() {
  static const KernelOps ops{"avx2", &ricci_avx2, &ricci_derivative_avx2};
  return ops;
}

}  // namespace detail

}  // namespace flagein

#endif  // x86_64
