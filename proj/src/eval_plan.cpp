#include "flagein/eval_plan.hpp"

#include <map>
#include <mutex>

#include "flagein/root_system.hpp"

namespace flagein {

EvalPlan EvalPlan::build(int n) {
  const FlagManifold manifold(n);
  EvalPlan plan;
  plan.n = n;
  plan.m = n + 1;
  plan.N = manifold.root_count();
  plan.steps = n - 1;
  plan.coeff = 1.0 / (4.0 * (n + 1));
  plan.idx_a.assign(static_cast<std::size_t>(plan.steps) * plan.N, 0);
  plan.idx_b.assign(static_cast<std::size_t>(plan.steps) * plan.N, 0);
  for (int p = 0; p < plan.N; ++p) {
    const RootPair root = manifold.root_at(p);
    int t = 0;
    for (int k = 1; k <= plan.m; ++k) {
      if (k == root.i || k == root.j) continue;
      plan.idx_a[static_cast<std::size_t>(t) * plan.N + p] =
          manifold.root_index(root.i, k);
      plan.idx_b[static_cast<std::size_t>(t) * plan.N + p] =
          manifold.root_index(k, root.j);
      ++t;
    }
  }
  return plan;
}

const EvalPlan& shared_eval_plan(int n) {
  static std::mutex mutex;
  static std::map<int, EvalPlan> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, EvalPlan::build(n)).first;
  }
  return it->second;
}

}  // namespace flagein
