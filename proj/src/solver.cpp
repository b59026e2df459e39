#include "flagein/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace flagein {

namespace {

// Residuals have poles on the coordinate hyperplanes; steps are shortened
// so iterates stay above this floor.
constexpr double kCoordinateFloor = 1e-12;
constexpr double kMinLineSearchStep = 0x1p-30;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// SplitMix64 stream keyed by (seed, trial); a pure function of both, so
// draws are independent of scheduling.
struct TrialRng {
  std::uint64_t state;
  TrialRng(std::uint64_t seed, std::uint64_t trial)
      : state(mix64(seed ^ 0x2545F4914F6CDD1Dull) ^
              mix64((trial + 1) * 0x9E3779B97F4A7C15ull)) {}

  double next_unit() {  // uniform on (0, 1]
    state += 0x9E3779B97F4A7C15ull;
    return static_cast<double>((mix64(state) >> 11) + 1) * 0x1.0p-53;
  }
};

void sample_initial_into(const SolverConfig& config, std::int64_t trial,
                         std::span<double> out) {
  TrialRng rng(config.rng_seed, static_cast<std::uint64_t>(trial));
  for (double& v : out) v = config.box_max * rng.next_unit();
}

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct NewtonWorkspace {
  ResidualEvaluator eval;
  int K;
  Eigen::VectorXd x, f, x_trial, f_trial, delta, grad;
  RowMajorMatrix J;
  Eigen::MatrixXd JtJ, A;

  explicit NewtonWorkspace(int n)
      : eval(n), K(eval.unknowns()), x(K), f(K), x_trial(K), f_trial(K), delta(K),
        grad(K), J(K, K), JtJ(K, K), A(K, K) {}
};

// Largest step fraction in [0, 1] keeping every coordinate above the floor.
double positivity_cap(const Eigen::VectorXd& x, const Eigen::VectorXd& delta) {
  double alpha = 1.0;
  for (int i = 0; i < x.size(); ++i) {
    if (delta[i] < 0.0) {
      alpha = std::min(alpha, (x[i] - kCoordinateFloor) / (-delta[i]));
    }
  }
  return std::max(alpha, 0.0);
}

bool try_step(NewtonWorkspace& ws, double alpha, double fsq, double& trial_fsq) {
  ws.x_trial = ws.x + alpha * ws.delta;
  for (int i = 0; i < ws.K; ++i) {
    ws.x_trial[i] = std::max(ws.x_trial[i], kCoordinateFloor);
  }
  ws.eval.residual(ws.x_trial.data(), ws.f_trial.data());
  if (!ws.f_trial.allFinite()) return false;
  trial_fsq = ws.f_trial.squaredNorm();
  return trial_fsq < fsq;
}

// Extra Levenberg–Marquardt descent once converged. Symmetric roots (the
// bi-invariant point above all) have singular Jacobians, so an iterate can
// pass the residual tolerance while still ~1e-5 away from the root — right
// at the dedup grid. Pushing the residual toward 1e-13 pulls every trial
// well inside one grid cell; LM keeps working where a Newton step blows up.
void polish(NewtonWorkspace& ws, double& fmax) {
  double fsq = ws.f.squaredNorm();
  double mu = 0.0;
  for (int s = 0; s < 16 && fmax > 1e-13; ++s) {
    ws.eval.jacobian(ws.x.data(), ws.J.data());
    if (!ws.J.allFinite()) return;
    ws.JtJ.noalias() = ws.J.transpose() * ws.J;
    ws.grad.noalias() = ws.J.transpose() * ws.f;
    const double scale = ws.JtJ.diagonal().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale)) return;
    if (mu <= 0.0) mu = 1e-10 * scale;
    bool stepped = false;
    for (int attempt = 0; attempt < 8 && !stepped; ++attempt) {
      ws.A = ws.JtJ;
      ws.A.diagonal().array() += mu;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(ws.A);
      ws.delta = ldlt.solve(-ws.grad);
      double trial_fsq = 0.0;
      if (ws.delta.allFinite() && positivity_cap(ws.x, ws.delta) >= 1.0 &&
          try_step(ws, 1.0, fsq, trial_fsq)) {
        ws.x = ws.x_trial;
        ws.f = ws.f_trial;
        fsq = trial_fsq;
        fmax = ws.f.lpNorm<Eigen::Infinity>();
        mu = std::max(mu / 4.0, 1e-12 * scale);
        stepped = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!stepped) return;
  }
}

std::optional<RawSolution> solve_from(NewtonWorkspace& ws, const SolverConfig& config,
                                      const double* x0, std::int64_t trial) {
  const int K = ws.K;
  if (K == 0) {
    // n = 1: no unknowns, the single-λ metric is always Einstein.
    return RawSolution{{}, 0.0, 0, trial};
  }
  for (int i = 0; i < K; ++i) ws.x[i] = std::max(x0[i], kCoordinateFloor);
  ws.eval.residual(ws.x.data(), ws.f.data());
  if (!ws.f.allFinite()) return std::nullopt;
  double fmax = ws.f.lpNorm<Eigen::Infinity>();
  double fsq = ws.f.squaredNorm();

  bool lm_mode = false;
  double mu = 0.0;
  int newton_rejects = 0;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    if (fmax < config.residual_tolerance) {
      polish(ws, fmax);
      return RawSolution{{ws.x.data(), ws.x.data() + K}, fmax, iter - 1, trial};
    }
    ws.eval.jacobian(ws.x.data(), ws.J.data());
    if (!ws.J.allFinite()) return std::nullopt;

    bool accepted = false;
    double trial_fsq = 0.0;

    if (!lm_mode) {
      Eigen::PartialPivLU<RowMajorMatrix> lu(ws.J);
      ws.delta = lu.solve(-ws.f);
      if (ws.delta.allFinite()) {
        // Backtracking on ||F||² with factor 1/2 from the positivity cap.
        double alpha = positivity_cap(ws.x, ws.delta);
        while (alpha >= kMinLineSearchStep) {
          if (try_step(ws, alpha, fsq, trial_fsq)) {
            accepted = true;
            break;
          }
          alpha *= 0.5;
        }
      }
      if (accepted) {
        newton_rejects = 0;
      } else {
        ++newton_rejects;
        if (newton_rejects >= 2) lm_mode = true;
      }
    }

    if (!accepted) {
      // Levenberg–Marquardt with escalating damping on the normal equations.
      ws.JtJ.noalias() = ws.J.transpose() * ws.J;
      ws.grad.noalias() = ws.J.transpose() * ws.f;
      const double scale = ws.JtJ.diagonal().maxCoeff();
      if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;
      if (mu <= 0.0) mu = 1e-3 * scale;
      bool lm_ok = false;
      for (int attempt = 0; attempt < 30; ++attempt) {
        ws.A = ws.JtJ;
        ws.A.diagonal().array() += mu;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(ws.A);
        ws.delta = ldlt.solve(-ws.grad);
        if (ws.delta.allFinite()) {
          const double alpha = positivity_cap(ws.x, ws.delta);
          if (alpha > 0.0 && try_step(ws, alpha, fsq, trial_fsq)) {
            lm_ok = true;
            mu = std::max(mu / 3.0, 1e-12 * scale);
            break;
          }
        }
        mu *= 10.0;
        if (mu > 1e12 * scale) break;
      }
      if (!lm_ok) return std::nullopt;  // singular step with no LM progress
      if (lm_mode && mu <= 1e-6 * scale) {
        lm_mode = false;
        newton_rejects = 0;
        mu = 0.0;
      }
      accepted = true;
    }

    ws.x = ws.x_trial;
    ws.f = ws.f_trial;
    fsq = trial_fsq;
    fmax = ws.f.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(fmax)) return std::nullopt;
  }
  return std::nullopt;  // iteration cap
}

}  // namespace

void SolverConfig::validate() const {
  if (n < 1) throw std::invalid_argument("solver: n must be >= 1");
  if (trials < 1) throw std::invalid_argument("solver: trials must be >= 1");
  if (!(box_max > 0.0)) throw std::invalid_argument("solver: box_max must be > 0");
  if (!(residual_tolerance > 0.0)) {
    throw std::invalid_argument("solver: residual_tolerance must be > 0");
  }
  if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be >= 1");
  if (!(positivity_threshold > 0.0)) {
    throw std::invalid_argument("solver: positivity_threshold must be > 0");
  }
  if (rounding_decimals < 1 || rounding_decimals > 15) {
    throw std::invalid_argument("solver: rounding_decimals must be in [1, 15]");
  }
  if (!(box_max > positivity_threshold)) {
    throw std::invalid_argument("solver: box_max must exceed positivity_threshold");
  }
  if (std::pow(10.0, -rounding_decimals) <= residual_tolerance) {
    throw std::invalid_argument("solver: rounding grid must be coarser than residual_tolerance");
  }
  if (threads < 0) throw std::invalid_argument("solver: threads must be >= 0");
}

std::vector<double> sample_initial(const SolverConfig& config, std::int64_t trial) {
  config.validate();
  if (trial < 0 || trial >= config.trials) {
    throw std::invalid_argument("sample_initial: trial " + std::to_string(trial) +
                                " outside [0, " + std::to_string(config.trials) + ")");
  }
  const int K = config.n * (config.n + 1) / 2 - 1;
  std::vector<double> out(K);
  sample_initial_into(config, trial, out);
  return out;
}

std::optional<RawSolution> solve_one(const SolverConfig& config,
                                     std::span<const double> x0) {
  config.validate();
  NewtonWorkspace ws(config.n);
  if (static_cast<int>(x0.size()) != ws.K) {
    throw std::invalid_argument("solve_one: expected " + std::to_string(ws.K) +
                                " coordinates, got " + std::to_string(x0.size()));
  }
  return solve_from(ws, config, x0.data(), -1);
}

std::vector<RawSolution> multistart(
    const SolverConfig& config,
    const std::function<void(std::int64_t, std::int64_t)>& progress) {
  config.validate();
  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(std::min<std::int64_t>(threads, config.trials));

  std::atomic<std::int64_t> next{0};
  std::atomic<std::int64_t> done{0};
  constexpr std::int64_t kChunk = 256;
  std::vector<std::vector<RawSolution>> buckets(threads);

  auto worker = [&](int w) {
    NewtonWorkspace ws(config.n);
    std::vector<double> x0(ws.K);
    for (;;) {
      const std::int64_t begin = next.fetch_add(kChunk);
      if (begin >= config.trials) break;
      const std::int64_t end = std::min(begin + kChunk, config.trials);
      for (std::int64_t t = begin; t < end; ++t) {
        sample_initial_into(config, t, x0);
        if (auto sol = solve_from(ws, config, x0.data(), t)) {
          buckets[w].push_back(std::move(*sol));
        }
      }
      done.fetch_add(end - begin);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  if (progress) {
    std::int64_t seen = -1;
    while (done.load() < config.trials) {
      const std::int64_t d = done.load();
      if (d != seen) {
        progress(d, config.trials);
        seen = d;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(200));
    }
    progress(config.trials, config.trials);
  }
  for (auto& th : pool) th.join();

  std::size_t total = 0;
  for (const auto& b : buckets) total += b.size();
  std::vector<RawSolution> all;
  all.reserve(total);
  for (auto& b : buckets) {
    for (auto& s : b) all.push_back(std::move(s));
  }
  std::sort(all.begin(), all.end(), [](const RawSolution& a, const RawSolution& b) {
    return a.trial_index < b.trial_index;
  });
  return all;
}

double round_to_decimals(double value, int decimals) {
  const double factor = std::pow(10.0, decimals);
  return static_cast<double>(std::llround(value * factor)) / factor;
}

std::vector<RawSolution> filter_round_dedup(std::vector<RawSolution> solutions,
                                            const SolverConfig& config) {
  // Positivity filter runs on the unrounded coordinates, then rounding,
  // then unique rows — the reference order.
  std::erase_if(solutions, [&](const RawSolution& s) {
    for (double v : s.x) {
      if (v < config.positivity_threshold) return true;
    }
    return false;
  });
  for (auto& s : solutions) {
    for (double& v : s.x) v = round_to_decimals(v, config.rounding_decimals);
  }
  std::sort(solutions.begin(), solutions.end(),
            [](const RawSolution& a, const RawSolution& b) {
              if (a.x != b.x) return a.x < b.x;
              return a.trial_index < b.trial_index;
            });
  solutions.erase(std::unique(solutions.begin(), solutions.end(),
                              [](const RawSolution& a, const RawSolution& b) {
                                return a.x == b.x;
                              }),
                  solutions.end());
  return solutions;
}

}  // namespace flagein
