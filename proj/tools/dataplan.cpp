// dataplan: solve, sweep and audit period-price data plan menus.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "dataplan/csv.hpp"
#include "dataplan/error.hpp"
#include "dataplan/scenario.hpp"
#include "dataplan/verification.hpp"

namespace {

using namespace dataplan;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kVerificationFailed = 2;
constexpr int kBudgetRefused = 3;

void print_run(const RunArtifacts& a) {
  fmt::print("scenario {}\n", a.scenario_name);
  fmt::print("profit {}\n", format_number(a.total_profit));
  if (a.grouped) {
    fmt::print("iterations {} converged {}\n", a.grouped->iterations, a.grouped->converged ? "yes" : "no");
  }
  for (const BaselineComparison& b : a.comparison.baselines) {
    fmt::print("  vs {:<24} {:>10.6f}  uplift {:>7.2f}%  served {:.3f}\n", b.label, b.baseline.profit,
               b.uplift_percent, b.baseline.served_fraction);
  }
  fmt::print("surplus ratio {:.4f}\n", a.comparison.social.ratio);
  fmt::print("ic/ir {} (worst ic {:.3g}, worst ir {:.3g}, {} types)\n", a.certificate.passed ? "pass" : "FAIL",
             a.certificate.worst_ic_violation, a.certificate.worst_ir_violation, a.certificate.types_checked);
  for (const std::string& w : a.warnings) fmt::print(stderr, "warning: {}\n", w);
}

int cmd_solve(const std::string& scenario_path, const std::string& out, const RunOptions& options) {
  const Scenario scenario = load_scenario(scenario_path);
  const RunArtifacts a = run_scenario(scenario, options);
  write_artifacts(a, out);
  print_run(a);
  if (!a.verified(options.tolerance)) {
    fmt::print(stderr, "verification failed; artifacts in {} are flagged\n", out);
    return kVerificationFailed;
  }
  return kOk;
}

int cmd_sweep(const std::string& scenario_path, const std::vector<std::size_t>& groups, const std::string& out,
              const RunOptions& options) {
  const Scenario scenario = load_scenario(scenario_path);
  const SweepTable table = sweep_groups(scenario, groups, options);
  std::filesystem::create_directories(out);
  write_file(std::filesystem::path(out) / "fig8_sweep.csv", table.to_csv());
  bool ok = true;
  for (const SweepRow& r : table.rows) {
    fmt::print("K={} profit {} iterations {}{}\n", r.groups, format_number(r.profit), r.iterations,
               r.verified ? "" : "  UNVERIFIED");
    ok = ok && r.verified;
  }
  return ok ? kOk : kVerificationFailed;
}

int cmd_verify(const std::string& solution_path, const std::string& scenario_path, const RunOptions& options) {
  const Scenario scenario = load_scenario(scenario_path);
  const SolutionAudit audit = verify_solution(scenario, read_csv(solution_path), options);
  fmt::print("ic/ir {} (worst ic {:.3g}, worst ir {:.3g}, {} types)\n", audit.certificate.passed ? "pass" : "FAIL",
             audit.certificate.worst_ic_violation, audit.certificate.worst_ir_violation,
             audit.certificate.types_checked);
  if (audit.certificate.violating_pair) {
    const ViolatingPair& v = *audit.certificate.violating_pair;
    const auto item = [](const std::optional<std::size_t>& i) { return i ? std::to_string(*i + 1) : "none"; };
    fmt::print("  sigma {} prefers item {} over assigned item {}\n", v.sigma, item(v.chosen), item(v.assigned));
  }
  if (audit.structural) {
    fmt::print("structural {} ({})\n", audit.structural->passed ? "pass" : "FAIL",
               to_string(audit.structural->violated));
  }
  fmt::print("price chain gap {:.3g}\n", audit.price_chain_gap);
  return audit.passed(options.tolerance) ? kOk : kVerificationFailed;
}

int cmd_oracle(const std::string& scenario_path, double step, std::optional<double> period_max,
               const RunOptions& options) {
  const Scenario scenario = load_scenario(scenario_path);
  const RunArtifacts a = run_scenario(scenario, options);
  GridOracleResult oracle;
  if (const auto* market = std::get_if<DiscreteMarket>(&scenario.market)) {
    const std::vector<double> grid = make_grid(step, period_max.value_or(200 * step), step);
    oracle = grid_oracle_discrete(*market, scenario.profile, scenario.cost, grid);
  } else {
    const auto& continuous = std::get<ContinuousMarket>(scenario.market);
    const std::vector<double> sigmas = make_grid(continuous.sigma_min(), continuous.sigma_max(), step);
    const std::vector<double> periods = make_grid(step, period_max.value_or(3.5), step);
    oracle = grid_oracle_grouped(continuous, scenario.profile, scenario.cost, a.grouped->boundaries.size(), sigmas,
                                 periods, options.threads);
    fmt::print("oracle boundaries:");
    for (double s : oracle.boundaries) fmt::print(" {}", format_number(s));
    fmt::print("\n");
  }
  fmt::print("oracle periods:");
  for (double t : oracle.periods) fmt::print(" {}", format_number(t));
  fmt::print("\n");
  const double gap = 100.0 * (oracle.profit - a.total_profit) / std::abs(oracle.profit);
  fmt::print("oracle profit {}\nsolver profit {}\ngap {:.4f}% of oracle ({} table updates)\n",
             format_number(oracle.profit), format_number(a.total_profit), gap, oracle.work);
  return kOk;
}

int cmd_check_dist(const std::string& scenario_path, std::size_t grid_points) {
  const Scenario scenario = load_scenario(scenario_path);
  const auto* market = std::get_if<ContinuousMarket>(&scenario.market);
  if (!market) {
    fmt::print(stderr, "check-dist needs a continuous market\n");
    return kInputError;
  }
  const RegularityReport r = verify_boundary_regularity(*market, grid_points);
  fmt::print("regularity {} (min slack {:.6g} at sigma {:.6g}, {} points)\n", r.holds ? "holds" : "VIOLATED",
             r.min_slack, r.argmin_sigma, r.grid_points);
  return r.holds ? kOk : kVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Period-price data plan menu optimizer"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::string solution_path;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::size_t samples = 500;
  std::size_t groups_override = 0;
  std::vector<std::size_t> groups;
  double grid_step = 0.0;
  double period_max = 0.0;
  std::size_t grid_points = 1000;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Override the scenario seed");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve a scenario and write solution/comparison/certificate files");
  add_common(solve);
  solve->add_option("--out", out_dir, "Output directory")->required();
  solve->add_option("--groups", groups_override, "Override the number of groups (continuous markets)");
  solve->add_option("--samples", samples, "Sampled types for the IC/IR check (continuous markets)");

  CLI::App* sweep = app.add_subcommand("sweep", "Solve for several group counts and write fig8_sweep.csv");
  add_common(sweep);
  sweep->add_option("--groups", groups, "Comma separated group counts")->required()->delimiter(',');
  sweep->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* verify = app.add_subcommand("verify", "Audit a written solution.csv against its scenario");
  add_common(verify);
  verify->add_option("--solution", solution_path, "solution.csv to audit")->required()->check(CLI::ExistingFile);
  verify->add_option("--samples", samples, "Sampled types for the IC/IR check (continuous markets)");

  CLI::App* oracle = app.add_subcommand("oracle", "Compare the solver with an exact grid search");
  add_common(oracle);
  oracle->add_option("--grid-step", grid_step, "Grid spacing for periods and boundaries")
      ->required()
      ->check(CLI::PositiveNumber);
  oracle->add_option("--period-max", period_max, "Largest grid period (default 3.5, or 200 steps for discrete)");
  oracle->add_option("--groups", groups_override, "Override the number of groups (continuous markets)");

  CLI::App* check = app.add_subcommand("check-dist", "Check the boundary regularity condition of a type density");
  check->add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  check->add_option("--grid-points", grid_points, "Grid size")->check(CLI::Range(2, 100000000));

  CLI11_PARSE(app, argc, argv);

  RunOptions options;
  options.threads = threads;
  options.ic_samples = samples;
  const CLI::Option* seed_flag = app.get_subcommands().front()->get_option_no_throw("--seed");
  if (seed_flag != nullptr && seed_flag->count() > 0) options.seed = seed;
  if (groups_override > 0) options.groups = groups_override;

  try {
    if (solve->parsed()) return cmd_solve(scenario_path, out_dir, options);
    if (sweep->parsed()) return cmd_sweep(scenario_path, groups, out_dir, options);
    if (verify->parsed()) return cmd_verify(solution_path, scenario_path, options);
    if (oracle->parsed()) {
      return cmd_oracle(scenario_path, grid_step,
                        period_max > 0.0 ? std::optional<double>(period_max) : std::nullopt, options);
    }
    if (check->parsed()) return cmd_check_dist(scenario_path, grid_points);
  } catch (const BudgetError& e) {
    fmt::print(stderr, "refused: {}\n", e.what());
    return kBudgetRefused;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInputError;
  }
  return kInputError;
}
