#include "flagein/root_system.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace flagein {

namespace {

void check_rank(int n) {
  if (n < 1) {
    throw std::invalid_argument("invalid rank n=" + std::to_string(n) +
                                "; SU(n+1)/T^n needs n >= 1");
  }
}

}  // namespace

FlagManifold::FlagManifold(int n) : n_(n) {
  check_rank(n);
  m_ = n + 1;
  N_ = n * (n + 1) / 2;
  d_ = n * (n + 1);
  roots_.reserve(N_);
  index_.assign((m_ + 1) * (m_ + 1), -1);
  for (int i = 1; i <= m_; ++i) {
    for (int j = i + 1; j <= m_; ++j) {
      index_[i * (m_ + 1) + j] = static_cast<int>(roots_.size());
      index_[j * (m_ + 1) + i] = static_cast<int>(roots_.size());
      roots_.push_back({i, j});
    }
  }
}

int FlagManifold::root_index(int i, int j) const {
  if (i < 1 || j < 1 || i > m_ || j > m_ || i == j) {
    throw std::out_of_range("root (" + std::to_string(i) + "," + std::to_string(j) +
                            ") out of range for n=" + std::to_string(n_));
  }
  return index_[i * (m_ + 1) + j];
}

bool FlagManifold::is_positive_root(RootPair p) const {
  return p.i >= 1 && p.i < p.j && p.j <= m_;
}

std::vector<RootPair> positive_roots(int n) {
  return FlagManifold(n).roots();
}

double structure_constant(int n, RootPair a, RootPair b, RootPair c) {
  const FlagManifold manifold(n);
  for (RootPair p : {a, b, c}) {
    if (!manifold.is_positive_root(p)) {
      throw std::out_of_range("(" + std::to_string(p.i) + "," + std::to_string(p.j) +
                              ") is not a positive root for n=" + std::to_string(n));
    }
  }
  // Nonzero iff the three pairs are the edges of a triangle: all distinct,
  // three underlying indices, each index appearing exactly twice.
  if (a == b || a == c || b == c) return 0.0;
  std::array<int, 6> idx = {a.i, a.j, b.i, b.j, c.i, c.j};
  std::array<int, 3> verts{};
  int vert_count = 0;
  for (int v : idx) {
    bool seen = false;
    for (int u = 0; u < vert_count; ++u) {
      if (verts[u] == v) seen = true;
    }
    if (!seen) {
      if (vert_count == 3) return 0.0;
      verts[vert_count++] = v;
    }
  }
  if (vert_count != 3) return 0.0;
  return 1.0 / (n + 1);
}

}  // namespace flagein
