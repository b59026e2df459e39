// flagein — find, verify, deduplicate, and classify invariant Einstein
// metrics on the full flag manifolds SU(n+1)/T^n.
//
// Subcommands: solve | verify | classify | ke | table.
// Standard output carries machine-readable summaries; progress and
// diagnostics go to standard error. Exit codes: 0 success,
// 1 verification/classification/runtime failure, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "flagein/classify.hpp"
#include "flagein/curvature.hpp"
#include "flagein/kernels.hpp"
#include "flagein/solution_io.hpp"
#include "flagein/solver.hpp"

namespace {

using namespace flagein;

struct SolveArgs {
  int n = 2;
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  double box_max = 10.0;
  double tol = 1e-10;
  int max_iter = 200;
  double positivity = 1e-4;
  int round_decimals = 5;
  int threads = 0;
  std::string out;
  std::string format = "csv";
};

int cmd_solve(const SolveArgs& args) {
  SolverConfig cfg;
  cfg.n = args.n;
  cfg.trials = args.trials;
  cfg.rng_seed = args.seed;
  cfg.box_max = args.box_max;
  cfg.residual_tolerance = args.tol;
  cfg.max_iterations = args.max_iter;
  cfg.positivity_threshold = args.positivity;
  cfg.rounding_decimals = args.round_decimals;
  cfg.threads = args.threads;
  cfg.validate();

  std::function<void(std::int64_t, std::int64_t)> progress;
  if (args.trials >= 20000) {
    progress = [last_percent = std::int64_t{-1}](std::int64_t done,
                                                 std::int64_t total) mutable {
      const std::int64_t percent = 100 * done / total;
      if (percent / 5 != last_percent / 5) {
        std::fprintf(stderr, "progress: %lld/%lld trials (%lld%%)\n",
                     static_cast<long long>(done), static_cast<long long>(total),
                     static_cast<long long>(percent));
        last_percent = percent;
      }
    };
  }

  const auto raws = multistart(cfg, progress);

  std::vector<RawSolution> first_half;
  for (const auto& r : raws) {
    if (r.trial_index < cfg.trials / 2) first_half.push_back(r);
  }
  const auto deduped_half = filter_round_dedup(std::move(first_half), cfg);
  const auto deduped = filter_round_dedup(raws, cfg);

  SolutionFile file;
  file.meta.n = cfg.n;
  file.meta.trials = cfg.trials;
  file.meta.seed = cfg.rng_seed;
  file.meta.box_max = cfg.box_max;
  file.meta.residual_tolerance = cfg.residual_tolerance;
  file.meta.positivity_threshold = cfg.positivity_threshold;
  file.meta.rounding_decimals = cfg.rounding_decimals;
  file.records.reserve(deduped.size());
  for (const auto& sol : deduped) {
    file.records.push_back(make_record(cfg.n, sol.x, sol.residual_norm));
  }
  write_solutions(file, args.out,
                  args.format == "json" ? SolutionFormat::Json : SolutionFormat::Csv);

  std::printf("n=%d trials=%lld seed=%llu threads=%d kernel=%s successes=%zu "
              "distinct=%zu distinct_at_half_trials=%zu out=%s\n",
              cfg.n, static_cast<long long>(cfg.trials),
              static_cast<unsigned long long>(cfg.rng_seed), cfg.threads,
              active_kernels().name, raws.size(), deduped.size(), deduped_half.size(),
              args.out.c_str());
  return 0;
}

// Accepts both the solver's solution files and the SU(5) reference table.
struct VerifyInput {
  int n = 0;
  std::vector<std::vector<double>> lambdas;  // full vectors incl. λ_12
};

VerifyInput load_lambda_rows(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  bool fixture = false;
  while (std::getline(probe, line)) {
    if (line.empty() || line[0] == '#' || line[0] == '{') {
      if (!line.empty() && line[0] == '{') break;
      continue;
    }
    fixture = line.rfind("x_1_3,", 0) == 0;
    break;
  }
  probe.close();

  VerifyInput input;
  if (fixture) {
    input.n = 4;
    for (const auto& row : read_su5_fixture(path)) {
      input.lambdas.push_back(row.lambda);
    }
  } else {
    const SolutionFile file = read_solutions(path);
    input.n = file.meta.n;
    for (const auto& rec : file.records) input.lambdas.push_back(rec.lambda);
  }
  return input;
}

int cmd_verify(const std::string& in, double tol) {
  const VerifyInput input = load_lambda_rows(in);
  double worst = 0.0;
  std::size_t failures = 0;
  for (std::size_t row = 0; row < input.lambdas.size(); ++row) {
    Metric metric{input.n, input.lambdas[row]};
    const CurvatureSummary summary = curvature_summary(metric, tol);
    worst = std::max(worst, summary.max_ricci_deviation);
    if (summary.max_ricci_deviation >= tol) {
      ++failures;
      std::fprintf(stderr, "row %zu: max Ricci deviation %.6e exceeds %.6e\n",
                   row + 1, summary.max_ricci_deviation, tol);
    }
  }
  std::printf("rows=%zu worst_deviation=%.6e tolerance=%.6e result=%s\n",
              input.lambdas.size(), worst, tol, failures == 0 ? "pass" : "fail");
  return failures == 0 ? 0 : 1;
}

int cmd_classify(const std::string& in, std::string out) {
  const SolutionFile file = read_solutions(in);
  std::vector<std::vector<double>> xs;
  xs.reserve(file.records.size());
  for (const auto& rec : file.records) {
    xs.emplace_back(rec.lambda.begin() + 1, rec.lambda.end());
  }
  auto classes = group_classes(xs, file.meta.n);
  match_kaehler(classes, file.meta.n);

  if (out.empty()) {
    out = in;
    const auto dot = out.rfind('.');
    if (dot != std::string::npos) out.resize(dot);
    out += "_classes.csv";
  }
  const auto blocks = make_class_blocks(classes, file.records);
  write_classes(blocks, file.meta.n, out);

  std::printf("classes=%zu out=%s\n", classes.size(), out.c_str());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::printf("class=%zu members=%zu h=%.9f ke=%d shares_h=%d\n", c + 1,
                classes[c].members.size(), classes[c].h_value,
                classes[c].is_kaehler_einstein ? 1 : 0,
                classes[c].shares_h_value ? 1 : 0);
  }
  return 0;
}

int cmd_ke(int n) {
  const auto metrics = kaehler_einstein_metrics(n);
  std::size_t verified = 0;
  double worst_residual = 0.0;
  for (const auto& metric : metrics) {
    const std::vector<double> x(metric.lambda.begin() + 1, metric.lambda.end());
    double fmax = 0.0;
    for (double f : residual_system(x, n)) fmax = std::max(fmax, std::abs(f));
    worst_residual = std::max(worst_residual, fmax);
    const bool einstein = curvature_summary(metric).einstein_constant.has_value();
    if (fmax < 1e-12 && einstein) ++verified;
    for (std::size_t p = 0; p < metric.lambda.size(); ++p) {
      std::printf("%s%.5f", p == 0 ? "" : ",", metric.lambda[p]);
    }
    std::printf("\n");
  }
  std::printf("ke_metrics=%zu verified=%zu max_residual=%.6e\n", metrics.size(),
              verified, worst_residual);
  return verified == metrics.size() ? 0 : 1;
}

int cmd_table(const std::string& in, const std::string& format) {
  const auto [n, blocks] = read_classes(in);
  std::fputs(render_table(blocks, n,
                          format == "csv" ? TableFormat::Csv : TableFormat::Markdown)
                 .c_str(),
             stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant Einstein metrics on the full flag manifolds SU(n+1)/T^n"};
  app.require_subcommand(1);
  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "Force kernel variant: auto|scalar|avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Multistart search for Einstein metrics");
  solve->add_option("--n", solve_args.n, "Torus rank of SU(n+1)/T^n")->required();
  solve->add_option("--trials", solve_args.trials, "Number of random initial conditions")
      ->required();
  solve->add_option("--seed", solve_args.seed, "RNG master seed (required: runs must be reproducible)")
      ->required();
  solve->add_option("--box-max", solve_args.box_max, "Initial box (0, box_max]^{N-1}");
  solve->add_option("--tol", solve_args.tol, "Residual max-norm convergence tolerance");
  solve->add_option("--max-iter", solve_args.max_iter, "Newton iteration cap per trial");
  solve->add_option("--positivity", solve_args.positivity,
                    "Reject solutions with a coordinate below this");
  solve->add_option("--round-decimals", solve_args.round_decimals, "Dedup rounding digits");
  solve->add_option("--threads", solve_args.threads, "Worker count (0 = all cores)");
  solve->add_option("--out", solve_args.out, "Output solution file")->required();
  solve->add_option("--format", solve_args.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string verify_in;
  double verify_tol = kFileEinsteinTolerance;
  auto* verify = app.add_subcommand("verify", "Recheck the Einstein condition per row");
  verify->add_option("--in", verify_in, "Solution file or SU(5) reference table")->required();
  verify->add_option("--tol", verify_tol,
                     "Max allowed Ricci deviation (default matches 5-decimal rounding)");

  std::string classify_in, classify_out;
  auto* classify = app.add_subcommand("classify", "Group solutions into isometry classes");
  classify->add_option("--in", classify_in, "Solution file")->required();
  classify->add_option("--out", classify_out, "Class file (default: <in>_classes.csv)");

  int ke_n = 2;
  auto* ke = app.add_subcommand("ke", "Generate and verify the Kähler–Einstein metrics");
  ke->add_option("--n", ke_n, "Torus rank")->required();

  std::string table_in, table_format = "markdown";
  auto* table = app.add_subcommand("table", "Render a class file");
  table->add_option("--in", table_in, "Class file")->required();
  table->add_option("--format", table_format, "Output format")
      ->check(CLI::IsMember({"markdown", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!select_kernels(kernel)) {
    std::fprintf(stderr, "kernel '%s' is unavailable on this machine\n", kernel.c_str());
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (verify->parsed()) return cmd_verify(verify_in, verify_tol);
    if (classify->parsed()) return cmd_classify(classify_in, classify_out);
    if (ke->parsed()) return cmd_ke(ke_n);
    if (table->parsed()) return cmd_table(table_in, table_format);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
