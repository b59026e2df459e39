#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "flagein/classify.hpp"
#include "flagein/curvature.hpp"

using namespace flagein;

namespace {

Metric uniform_metric(int n, double value) {
  const auto roots = positive_roots(n);
  return Metric{n, std::vector<double>(roots.size(), value)};
}

Metric random_metric(int n, std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Metric m = uniform_metric(n, 1.0);
  for (double& v : m.lambda) v = dist(rng);
  return m;
}

// Central-difference oracle for the residual Jacobian.
std::vector<double> fd_jacobian(const std::vector<double>& x, int n, double step) {
  const int K = static_cast<int>(x.size());
  std::vector<double> jac(static_cast<std::size_t>(K) * K);
  for (int q = 0; q < K; ++q) {
    auto xp = x, xm = x;
    xp[q] += step;
    xm[q] -= step;
    const auto fp = residual_system(xp, n);
    const auto fm = residual_system(xm, n);
    for (int p = 0; p < K; ++p) {
      jac[static_cast<std::size_t>(p) * K + q] = (fp[p] - fm[p]) / (2.0 * step);
    }
  }
  return jac;
}

void check_jacobian_against_fd(const std::vector<double>& x, int n) {
  const auto analytic = residual_jacobian(x, n);
  const auto fd = fd_jacobian(x, n, 1e-6);
  for (std::size_t e = 0; e < analytic.size(); ++e) {
    const double scale = std::max({std::abs(analytic[e]), std::abs(fd[e]), 1.0});
    CHECK(std::abs(analytic[e] - fd[e]) / scale < 1e-6);
  }
}

}  // namespace

TEST_CASE("ricci component spot values") {
  // n=2, bi-invariant: 1/2 + (1/12)(1-1-1) = 5/12
  CHECK(ricci_component(uniform_metric(2, 1.0), {1, 2}) ==
        doctest::Approx(5.0 / 12).epsilon(1e-14));

  // n=2 Kähler–Einstein point (1,2,1): every component is 1/3
  const Metric ke2{2, {1.0, 2.0, 1.0}};
  for (const auto& root : positive_roots(2)) {
    CHECK(ricci_component(ke2, root) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  }

  // n=4, bi-invariant: 1/2 + (1/20)(3 * -1) = 7/20
  for (const auto& root : positive_roots(4)) {
    CHECK(ricci_component(uniform_metric(4, 1.0), root) ==
          doctest::Approx(7.0 / 20).epsilon(1e-14));
  }
}

TEST_CASE("ricci component rejects bad input") {
  Metric bad{2, {1.0, -2.0, 1.0}};
  CHECK_THROWS_AS(ricci_component(bad, {1, 2}), std::domain_error);
  Metric zero{2, {1.0, 0.0, 1.0}};
  CHECK_THROWS_AS(ricci_component(zero, {1, 2}), std::domain_error);
  CHECK_THROWS_AS(ricci_component(uniform_metric(2, 1.0), {1, 4}), std::out_of_range);
}

TEST_CASE("ricci component is symmetric in i<->j") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Metric m = random_metric(3, rng);
    for (const auto& root : positive_roots(3)) {
      const double fwd = ricci_component(m, root);
      const double rev = ricci_component(m, {root.j, root.i});
      CHECK(fwd == rev);  // identical value, not merely close
    }
  }
}

TEST_CASE("curvature summary spot values") {
  SUBCASE("n=4 bi-invariant row: S=7, V^{1/d}=1, H=7") {
    const auto s = curvature_summary(uniform_metric(4, 1.0));
    CHECK(std::abs(s.scalar_curvature - 7.0) < 1e-12);
    CHECK(std::abs(s.volume_factor - 1.0) < 1e-12);
    CHECK(std::abs(s.h_invariant - 7.0) < 1e-12);
    REQUIRE(s.einstein_constant.has_value());
    CHECK(*s.einstein_constant == doctest::Approx(0.35).epsilon(1e-14));
  }

  SUBCASE("n=4 Kähler–Einstein block row") {
    const Metric ke{4, {1, 1, 2, 3, 2, 3, 4, 1, 2, 1}};
    const auto s = curvature_summary(ke);
    CHECK(std::abs(s.scalar_curvature - 4.0) < 1e-10);
    CHECK(std::abs(s.volume_factor - 1.76172959) < 1e-7);
    CHECK(std::abs(s.h_invariant - 7.046918359) < 1e-7);
    CHECK(s.einstein_constant.has_value());
  }

  SUBCASE("n=2 Kähler–Einstein point (1,2,1): S=2, V^{1/6}=4^{1/6}") {
    // r = 1/3 on all three summands, d = 6, prod(lambda^2) = 4
    const auto s = curvature_summary(Metric{2, {1.0, 2.0, 1.0}});
    CHECK(s.scalar_curvature == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(s.volume_factor == doctest::Approx(std::pow(4.0, 1.0 / 6)).epsilon(1e-13));
    CHECK(s.h_invariant == doctest::Approx(2.0 * std::pow(4.0, 1.0 / 6)).epsilon(1e-13));
  }

  SUBCASE("summary identities hold by construction") {
    std::mt19937_64 rng(11);
    for (int n : {2, 3, 4}) {
      const Metric m = random_metric(n, rng);
      const auto s = curvature_summary(m);
      double sum = 0.0;
      for (double r : s.ricci) sum += r;
      CHECK(s.scalar_curvature == 2.0 * sum);
      CHECK(s.h_invariant == s.volume_factor * s.scalar_curvature);
    }
  }
}

TEST_CASE("homothety scaling: ricci(c*lambda) = ricci(lambda)/c") {
  std::mt19937_64 rng(23);
  for (int n : {2, 3, 4}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Metric m = random_metric(n, rng);
      for (double c : {0.1, 2.0, 17.0}) {
        Metric scaled = m;
        for (double& v : scaled.lambda) v *= c;
        for (const auto& root : positive_roots(n)) {
          const double base = ricci_component(m, root);
          const double sc = ricci_component(scaled, root);
          CHECK(std::abs(sc - base / c) <= 1e-12 * std::abs(base / c));
        }
      }
    }
  }
}

TEST_CASE("H is invariant under homothety") {
  std::mt19937_64 rng(29);
  for (int n : {2, 3, 4}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Metric m = random_metric(n, rng);
      const double h = curvature_summary(m).h_invariant;
      for (double c : {0.1, 2.0, 17.0}) {
        Metric scaled = m;
        for (double& v : scaled.lambda) v *= c;
        const double hs = curvature_summary(scaled).h_invariant;
        CHECK(std::abs(hs - h) <= 1e-10 * std::abs(h));
      }
    }
  }
}

TEST_CASE("permutation equivariance of ricci components") {
  std::mt19937_64 rng(31);
  for (int n : {2, 3, 4}) {
    const int m_size = n + 1;
    Permutation sigma(m_size);
    for (int rep = 0; rep < 10; ++rep) {
      const Metric m = random_metric(n, rng);
      for (int s = 0; s < m_size; ++s) sigma[s] = s + 1;
      std::shuffle(sigma.begin(), sigma.end(), rng);
      const Metric permuted = apply_permutation(m, sigma);
      for (const auto& root : positive_roots(n)) {
        int pi = sigma[root.i - 1], pj = sigma[root.j - 1];
        if (pi > pj) std::swap(pi, pj);
        const double lhs = ricci_component(permuted, {pi, pj});
        const double rhs = ricci_component(m, root);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("residual system spot values") {
  SUBCASE("n=2 bi-invariant x=(1,1) solves the system") {
    const auto f = residual_system(std::vector<double>{1.0, 1.0}, 2);
    REQUIRE(f.size() == 2);
    CHECK(std::abs(f[0]) < 1e-15);
    CHECK(std::abs(f[1]) < 1e-15);
  }
  SUBCASE("n=2 Kähler–Einstein x=(2,1) solves the system") {
    const auto f = residual_system(std::vector<double>{2.0, 1.0}, 2);
    CHECK(std::abs(f[0]) < 1e-15);
    CHECK(std::abs(f[1]) < 1e-15);
  }
  SUBCASE("n=2 x=(2,2) is not Einstein") {
    const auto f = residual_system(std::vector<double>{2.0, 2.0}, 2);
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    CHECK(fmax > 1e-3);
  }
  SUBCASE("domain and shape errors") {
    CHECK_THROWS_AS(residual_system(std::vector<double>{1.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(residual_system(std::vector<double>{1.0, -1.0}, 2), std::domain_error);
  }
}

TEST_CASE("analytic Jacobian matches central finite differences") {
  check_jacobian_against_fd({1.0, 1.0}, 2);
  check_jacobian_against_fd({2.0, 1.0}, 2);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  for (int n : {2, 3, 4}) {
    const int K = n * (n + 1) / 2 - 1;
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> x(K);
      for (double& v : x) v = dist(rng);
      check_jacobian_against_fd(x, n);
    }
  }
}

TEST_CASE("Jacobian at the n=2 Kähler–Einstein solution is nonsingular") {
  const auto jac = residual_jacobian(std::vector<double>{2.0, 1.0}, 2);
  const double det = jac[0] * jac[3] - jac[1] * jac[2];
  CHECK(std::abs(det) > 1e-3);
}
