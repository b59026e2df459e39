#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "flagein/curvature.hpp"

namespace flagein {

/// All multistart/Newton parameters. Defaults follow the reference
/// procedure: initial points uniform in (0, 10]^{N−1}, coordinates below
/// 1e-4 rejected, 5-decimal dedup grid.
struct SolverConfig {
  int n = 2;
  std::int64_t trials = 1000;
  double box_max = 10.0;
  double residual_tolerance = 1e-10;  // convergence: max-norm of F
  int max_iterations = 200;           // per trial
  double positivity_threshold = 1e-4;
  int rounding_decimals = 5;
  std::uint64_t rng_seed = 0;
  int threads = 0;  // 0 = all hardware threads

  void validate() const;  // throws std::invalid_argument
};

/// One converged trial. x is the λ vector for roots after (1,2) with
/// λ_12 = 1 implied; residual_norm is max|F| at x.
struct RawSolution {
  std::vector<double> x;
  double residual_norm = 0.0;
  int iterations = 0;
  std::int64_t trial_index = -1;
};

/// Initial condition for one trial: independent coordinates uniform on
/// (0, box_max]. A pure function of (rng_seed, trial) — each trial owns a
/// SplitMix64 stream keyed by a 64-bit mix of seed and trial index, so
/// the value is independent of thread scheduling.
std::vector<double> sample_initial(const SolverConfig& config, std::int64_t trial);

/// Damped Newton with Levenberg–Marquardt fallback from one starting
/// point. Failure (divergence, iteration cap, singular step without LM
/// progress, non-finite values) is a normal outcome and returns nullopt.
/// Throws std::invalid_argument when x0 has the wrong length.
std::optional<RawSolution> solve_one(const SolverConfig& config,
                                     std::span<const double> x0);

/// Runs config.trials independent solves and collects the successes,
/// sorted by trial index. The result is independent of the worker count.
/// progress, when set, is called periodically with (done, total).
std::vector<RawSolution> multistart(
    const SolverConfig& config,
    const std::function<void(std::int64_t, std::int64_t)>& progress = {});

/// Positivity filter, rounding, and dedup exactly in the reference order:
/// drop solutions with any coordinate < positivity_threshold, round every
/// coordinate to rounding_decimals, keep the earliest trial per distinct
/// rounded vector, sort lexicographically by rounded vector.
std::vector<RawSolution> filter_round_dedup(std::vector<RawSolution> solutions,
                                            const SolverConfig& config);

/// Grid rounding used for dedup: llround(v·10^d)/10^d.
double round_to_decimals(double value, int decimals);

}  // namespace flagein
