#pragma once

#include <compare>
#include <vector>

namespace flagein {

/// Positive root α_ij = ε_i − ε_j of A_n, stored as its index pair.
/// Indices are 1-based with i < j throughout the external contract.
struct RootPair {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const RootPair&, const RootPair&) = default;
};

/// Combinatorial descriptor of the full flag manifold SU(n+1)/T^n:
/// the positive roots of A_n in lexicographic order, plus the derived
/// counts. The lexicographic root ordering is the contract for residual
/// indexing, CSV columns, and canonical forms.
class FlagManifold {
 public:
  /// Throws std::invalid_argument for n < 1.
  explicit FlagManifold(int n);

  int rank() const { return n_; }          // n (torus rank)
  int matrix_size() const { return m_; }   // n + 1
  int root_count() const { return N_; }    // n(n+1)/2 isotropy summands
  int dimension() const { return d_; }     // n(n+1) real dimension

  const std::vector<RootPair>& roots() const { return roots_; }
  RootPair root_at(int index) const { return roots_[index]; }

  /// Flat index of the root {i, j} (order of i, j irrelevant).
  /// Throws std::out_of_range for indices outside [1, n+1] or i == j.
  int root_index(int i, int j) const;

  /// True when 1 <= i < j <= n+1.
  bool is_positive_root(RootPair p) const;

 private:
  int n_, m_, N_, d_;
  std::vector<RootPair> roots_;
  std::vector<int> index_;  // (m+1)^2 lookup, -1 for invalid
};

/// All positive roots (i, j), 1 <= i < j <= n+1, lexicographically sorted.
/// Throws std::invalid_argument for n < 1.
std::vector<RootPair> positive_roots(int n);

/// Wang–Ziller bracket [a; b c] for A_n, symmetric in all three slots:
/// 1/(n+1) when {a, b, c} are the three edges of a triangle on some
/// index triple {i, j, k}, 0 otherwise.
/// Throws std::out_of_range when a pair is not a valid positive root.
double structure_constant(int n, RootPair a, RootPair b, RootPair c);

}  // namespace flagein
