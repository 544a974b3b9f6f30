#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dataplan/continuous_solver.hpp"
#include "dataplan/csv.hpp"
#include "dataplan/discrete_solver.hpp"
#include "dataplan/market_model.hpp"
#include "dataplan/type_distributions.hpp"
#include "dataplan/verification.hpp"

namespace dataplan {

/// Load-time failure. `where` is a JSON field path such as "market.counts[3]"
/// or "line 4, column 12" for syntax errors.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string where, const std::string& what);
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

enum class SolverKind { kDiscrete, kAlternating };

struct SolverConfig {
  SolverKind kind = SolverKind::kDiscrete;
  /// Group counts to solve for; the first entry is used by a plain solve,
  /// all of them by a sweep.
  std::vector<std::size_t> groups;
  std::size_t restarts = 0;
  std::uint64_t seed = 1;
  int max_iterations = 200;
};

using Market = std::variant<DiscreteMarket, ContinuousMarket>;

struct Scenario {
  std::string name;
  DemandProfile profile;
  CostModel cost;
  Market market;
  SolverConfig solver;
  std::vector<double> baselines;

  bool discrete() const { return std::holds_alternative<DiscreteMarket>(market); }
};

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Name used for a fixed-period baseline row: t=1 is "monthly", t=2 is
/// "rollover", anything else "fixed_<t>".
std::string baseline_label(double period);

struct SolutionRow {
  std::size_t group_index;  // 1-based
  double sigma_boundary;
  double period;
  double price;
  double count;
  /// Per-consumer profit price - C(period).
  double item_profit;
};

struct RunOptions {
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  /// Overrides the scenario's first group count.
  std::optional<std::size_t> groups;
  /// Continuous markets: number of uniformly sampled types for the IC/IR check.
  std::size_t ic_samples = 500;
  double tolerance = 1e-9;
};

struct RunArtifacts {
  std::string scenario_name;
  std::vector<SolutionRow> solution;
  double total_profit = 0.0;
  ComparisonReport comparison;
  FeasibilityCertificate certificate;
  /// Structural check of the discrete menu; absent for grouped menus.
  std::optional<FeasibilityReport> structural;
  /// |sum count * item_profit - total_profit|
  double consistency_gap = 0.0;
  std::optional<DiscreteSolution> discrete;
  std::optional<GroupedSolution> grouped;
  std::optional<RegularityReport> regularity;
  std::vector<std::string> warnings;

  bool verified(double tolerance = 1e-9) const;
};

RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Writes solution.csv, comparison.csv, baselines.csv, certificate.json.
void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& out_dir);

std::string solution_csv(const RunArtifacts& artifacts);
std::string comparison_csv(const RunArtifacts& artifacts);
std::string baselines_csv(const RunArtifacts& artifacts);
std::string certificate_json(const RunArtifacts& artifacts);

struct SweepRow {
  std::size_t groups;
  double profit;
  int iterations;
  bool converged;
  bool verified;
  /// One entry per scenario baseline (full-coverage policy).
  std::vector<double> uplift_percent;
};

struct SweepTable {
  std::vector<double> baseline_periods;
  std::vector<SweepRow> rows;

  std::string to_csv() const;
};

SweepTable sweep_groups(const Scenario& scenario, std::span<const std::size_t> groups,
                        const RunOptions& options = {});

/// Re-checks a written solution.csv against a scenario: rebuilds the menu,
/// runs brute-force IC/IR, and for discrete markets the structural check.
struct SolutionAudit {
  FeasibilityCertificate certificate;
  std::optional<FeasibilityReport> structural;
  /// Largest deviation of a stored price from the price chain recomputed
  /// from the stored periods and boundaries.
  double price_chain_gap = 0.0;
  bool passed(double tolerance = 1e-9) const;
};

SolutionAudit verify_solution(const Scenario& scenario, const CsvTable& solution, const RunOptions& options = {});

}  // namespace dataplan
