#include "flagein/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "flagein/curvature.hpp"
#include "flagein/solver.hpp"

namespace flagein {

namespace {

// Per-coordinate tolerance for matching canonical vectors: the solver
// rounds at 1e-5 and renormalization inflates that, while distinct
// classes differ from the second decimal on.
constexpr double kCanonicalTolerance = 1e-3 * (1.0 + 1e-9);
constexpr int kCanonicalDecimals = 4;
constexpr double kHSpreadTolerance = 1e-6;

void check_permutation(const Permutation& sigma, int m) {
  if (static_cast<int>(sigma.size()) != m) {
    throw std::invalid_argument("permutation must have length " + std::to_string(m));
  }
  std::vector<bool> seen(m, false);
  for (int v : sigma) {
    if (v < 1 || v > m || seen[v - 1]) {
      throw std::invalid_argument("not a permutation of {1.." + std::to_string(m) + "}");
    }
    seen[v - 1] = true;
  }
}

bool canonical_close(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > kCanonicalTolerance) return false;
  }
  return true;
}

}  // namespace

Metric apply_permutation(const Metric& metric, const Permutation& sigma) {
  metric.validate();
  const int m = metric.n + 1;
  check_permutation(sigma, m);
  Permutation inverse(m);
  for (int k = 1; k <= m; ++k) inverse[sigma[k - 1] - 1] = k;

  const FlagManifold manifold(metric.n);
  Metric out;
  out.n = metric.n;
  out.lambda.resize(manifold.root_count());
  for (int p = 0; p < manifold.root_count(); ++p) {
    const RootPair root = manifold.root_at(p);
    out.lambda[p] = metric.value(inverse[root.i - 1], inverse[root.j - 1]);
  }
  return out;
}

std::vector<double> canonical_form(std::span<const double> x, int n) {
  const FlagManifold manifold(n);
  const int N = manifold.root_count();
  const int m = n + 1;
  if (static_cast<int>(x.size()) != N - 1) {
    throw std::invalid_argument("canonical_form: expected " + std::to_string(N - 1) +
                                " coordinates, got " + std::to_string(x.size()));
  }
  std::vector<double> full(N);
  full[0] = 1.0;
  std::copy(x.begin(), x.end(), full.begin() + 1);

  // tau enumerates σ⁻¹ over the whole group, which covers the same orbit.
  Permutation tau(m);
  std::iota(tau.begin(), tau.end(), 1);
  std::vector<double> best;
  std::vector<double> candidate(N);
  do {
    for (int p = 0; p < N; ++p) {
      const RootPair root = manifold.root_at(p);
      candidate[p] = full[manifold.root_index(tau[root.i - 1], tau[root.j - 1])];
    }
    const double scale = candidate[0];
    for (double& v : candidate) {
      v = round_to_decimals(v / scale, kCanonicalDecimals);
    }
    if (best.empty() || candidate < best) best = candidate;
  } while (std::next_permutation(tau.begin(), tau.end()));
  return best;
}

std::vector<IsometryClass> group_classes(const std::vector<std::vector<double>>& solutions,
                                         int n) {
  const FlagManifold manifold(n);
  const int N = manifold.root_count();

  struct Item {
    int index;
    std::vector<double> canonical;
  };
  std::vector<Item> items;
  items.reserve(solutions.size());
  std::vector<double> h_by_index(solutions.size());
  for (int idx = 0; idx < static_cast<int>(solutions.size()); ++idx) {
    const auto& x = solutions[idx];
    Metric metric;
    metric.n = n;
    metric.lambda.resize(N);
    metric.lambda[0] = 1.0;
    std::copy(x.begin(), x.end(), metric.lambda.begin() + 1);
    h_by_index[idx] = curvature_summary(metric).h_invariant;
    items.push_back({idx, canonical_form(x, n)});
  }

  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.canonical != b.canonical) return a.canonical < b.canonical;
    return a.index < b.index;
  });

  std::vector<IsometryClass> classes;
  for (const Item& item : items) {
    if (classes.empty() || !canonical_close(classes.back().canonical, item.canonical)) {
      IsometryClass cls;
      cls.canonical = item.canonical;
      classes.push_back(std::move(cls));
    }
    classes.back().members.push_back(item.index);
  }

  for (auto& cls : classes) {
    std::sort(cls.members.begin(), cls.members.end());
    double h_min = 0.0, h_max = 0.0, h_sum = 0.0;
    bool first = true;
    for (int idx : cls.members) {
      const double h = h_by_index[idx];
      h_sum += h;
      h_min = first ? h : std::min(h_min, h);
      h_max = first ? h : std::max(h_max, h);
      first = false;
    }
    cls.h_value = h_sum / static_cast<double>(cls.members.size());
    if (h_max - h_min >= kHSpreadTolerance) {
      throw ClassificationError(
          "H spread " + std::to_string(h_max - h_min) + " inside a class of " +
          std::to_string(cls.members.size()) +
          " members exceeds 1e-6; canonical-form tolerance is misconfigured");
    }
    Metric canon_metric;
    canon_metric.n = n;
    canon_metric.lambda = cls.canonical;
    cls.s_value = curvature_summary(canon_metric).scalar_curvature;
  }

  std::sort(classes.begin(), classes.end(),
            [](const IsometryClass& a, const IsometryClass& b) {
              if (a.h_value != b.h_value) return a.h_value < b.h_value;
              return a.canonical < b.canonical;
            });

  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      if (std::abs(classes[i].h_value - classes[j].h_value) < kHSpreadTolerance) {
        classes[i].shares_h_value = true;
        classes[j].shares_h_value = true;
      }
    }
  }
  return classes;
}

std::vector<Metric> kaehler_einstein_metrics(int n) {
  const FlagManifold manifold(n);
  const int N = manifold.root_count();
  const int m = n + 1;

  std::set<std::vector<double>> seen;
  std::vector<Metric> out;
  Permutation w(m);
  std::iota(w.begin(), w.end(), 1);
  do {
    std::vector<double> lambda(N);
    for (int p = 0; p < N; ++p) {
      const RootPair root = manifold.root_at(p);
      lambda[p] = std::abs(static_cast<double>(w[root.i - 1] - w[root.j - 1]));
    }
    const double scale = lambda[0];
    for (double& v : lambda) v /= scale;
    if (seen.insert(lambda).second) {
      out.push_back(Metric{n, std::move(lambda)});
    }
  } while (std::next_permutation(w.begin(), w.end()));

  std::sort(out.begin(), out.end(),
            [](const Metric& a, const Metric& b) { return a.lambda < b.lambda; });
  return out;
}

void match_kaehler(std::vector<IsometryClass>& classes, int n) {
  const auto ke_metrics = kaehler_einstein_metrics(n);
  const auto ke_canonical = canonical_form(
      std::span<const double>(ke_metrics.front().lambda).subspan(1), n);

  int matched = -1;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    classes[c].is_kaehler_einstein = false;
    classes[c].kaehler_permutation.reset();
    if (classes[c].canonical.size() == ke_canonical.size() &&
        canonical_close(classes[c].canonical, ke_canonical)) {
      if (matched >= 0) {
        throw ClassificationError(
            "Kähler–Einstein metrics match several classes; tolerance failure");
      }
      matched = static_cast<int>(c);
    }
  }
  if (matched < 0) {
    throw ClassificationError(
        "Kähler–Einstein metrics match no class; the solver output is missing them");
  }
  classes[matched].is_kaehler_einstein = true;

  // Witness: a generator w whose normalized metric canonicalizes to the
  // class representative.
  const FlagManifold manifold(n);
  const int N = manifold.root_count();
  const int m = n + 1;
  Permutation w(m);
  std::iota(w.begin(), w.end(), 1);
  do {
    std::vector<double> lambda(N);
    for (int p = 0; p < N; ++p) {
      const RootPair root = manifold.root_at(p);
      lambda[p] = std::abs(static_cast<double>(w[root.i - 1] - w[root.j - 1]));
    }
    const double scale = lambda[0];
    std::vector<double> rounded(N);
    for (int p = 0; p < N; ++p) {
      rounded[p] = round_to_decimals(lambda[p] / scale, kCanonicalDecimals);
    }
    if (canonical_close(rounded, classes[matched].canonical)) {
      classes[matched].kaehler_permutation = w;
      return;
    }
  } while (std::next_permutation(w.begin(), w.end()));
  throw ClassificationError("no permutation witnesses the Kähler–Einstein class");
}

}  // namespace flagein
