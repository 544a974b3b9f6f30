#include "dataplan/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>

#include "dataplan/error.hpp"

namespace dataplan {

using nlohmann::json;

ScenarioError::ScenarioError(std::string where, const std::string& what)
    : std::runtime_error(where + ": " + what), where_(std::move(where)) {}

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

const json& field(const json& obj, const std::string& path, std::string_view key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(join(path, key), "missing required field");
  return *it;
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ScenarioError(path, "expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ScenarioError(path, "must be finite");
  return x;
}

double number(const json& obj, const std::string& path, std::string_view key) {
  return number(field(obj, path, key), join(path, key));
}

double number_or(const json& obj, const std::string& path, std::string_view key, double fallback) {
  return obj.contains(key) ? number(obj, path, key) : fallback;
}

std::size_t positive_integer(const json& value, const std::string& path) {
  if (!value.is_number_integer() || value.get<long long>() < 1) {
    throw ScenarioError(path, "expected a positive integer");
  }
  return value.get<std::size_t>();
}

std::vector<double> number_list(const json& obj, const std::string& path, std::string_view key) {
  const json& arr = field(obj, path, key);
  const std::string where = join(path, key);
  if (!arr.is_array() || arr.empty()) throw ScenarioError(where, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(number(arr[i], fmt::format("{}[{}]", where, i)));
  return out;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ScenarioError(join(path, key), "unknown field");
    }
  }
}

const json& object(const json& obj, const std::string& path, std::string_view key) {
  const json& value = field(obj, path, key);
  if (!value.is_object()) throw ScenarioError(join(path, key), "expected an object");
  return value;
}

// Construct a core type, re-labelling its validation error with a field path.
template <typename F>
auto checked(const std::string& where, F&& make) {
  try {
    return make();
  } catch (const std::exception& e) {
    throw ScenarioError(where, e.what());
  }
}

Market parse_market(const json& m) {
  const std::string path = "market";
  const json& kind_value = field(m, path, "kind");
  if (!kind_value.is_string()) throw ScenarioError("market.kind", "expected a string");
  const std::string kind = kind_value.get<std::string>();
  if (kind == "discrete") {
    reject_unknown(m, path, {"kind", "types", "counts", "total"});
    const std::vector<double> types = number_list(m, path, "types");
    std::vector<double> counts =
        m.contains("counts") ? number_list(m, path, "counts") : std::vector<double>(types.size(), 1.0);
    if (m.contains("total")) {
      const double total = number(m, path, "total");
      if (!(total > 0.0)) throw ScenarioError("market.total", "must be positive");
      double sum = 0.0;
      for (double c : counts) sum += c;
      if (sum > 0.0) {
        for (double& c : counts) c *= total / sum;
      }
    }
    return checked("market", [&] { return Market{DiscreteMarket(types, counts)}; });
  }
  const double total = number_or(m, path, "total", 1.0);
  if (kind == "uniform") {
    reject_unknown(m, path, {"kind", "total", "sigma_min", "sigma_max"});
    const UniformDensity d{number(m, path, "sigma_min"), number(m, path, "sigma_max")};
    return checked("market", [&] { return Market{ContinuousMarket(total, d)}; });
  }
  if (kind == "exponential") {
    reject_unknown(m, path, {"kind", "total", "rate", "sigma_min", "sigma_max"});
    const TruncatedExponentialDensity d{number(m, path, "rate"), number_or(m, path, "sigma_min", 0.0),
                                        number(m, path, "sigma_max")};
    return checked("market", [&] { return Market{ContinuousMarket(total, d)}; });
  }
  if (kind == "truncated_normal") {
    reject_unknown(m, path, {"kind", "total", "mean", "std_dev", "lower", "upper"});
    const TruncatedNormalDensity d{number(m, path, "mean"), number(m, path, "std_dev"), number(m, path, "lower"),
                                   number(m, path, "upper")};
    return checked("market", [&] { return Market{ContinuousMarket(total, d)}; });
  }
  throw ScenarioError("market.kind",
                      "unknown market kind '" + kind + "' (discrete, uniform, exponential, truncated_normal)");
}

SolverConfig parse_solver(const json& s, bool discrete_market) {
  const std::string path = "solver";
  reject_unknown(s, path, {"kind", "K", "restarts", "seed", "max_iterations"});
  SolverConfig config;
  const json& kind_value = field(s, path, "kind");
  const std::string kind = kind_value.is_string() ? kind_value.get<std::string>() : "";
  if (kind == "discrete") {
    config.kind = SolverKind::kDiscrete;
  } else if (kind == "alternating" || kind == "continuous") {
    config.kind = SolverKind::kAlternating;
  } else {
    throw ScenarioError("solver.kind", "expected \"discrete\" or \"alternating\"");
  }
  if ((config.kind == SolverKind::kDiscrete) != discrete_market) {
    throw ScenarioError("solver.kind", "solver kind does not match market.kind");
  }
  if (config.kind == SolverKind::kAlternating) {
    const json& k = field(s, path, "K");
    if (k.is_array()) {
      if (k.empty()) throw ScenarioError("solver.K", "expected at least one group count");
      for (std::size_t i = 0; i < k.size(); ++i) config.groups.push_back(positive_integer(k[i], fmt::format("solver.K[{}]", i)));
    } else {
      config.groups.push_back(positive_integer(k, "solver.K"));
    }
  }
  if (s.contains("restarts")) {
    const json& r = s["restarts"];
    if (!r.is_number_integer() || r.get<long long>() < 0) throw ScenarioError("solver.restarts", "expected an integer >= 0");
    config.restarts = r.get<std::size_t>();
  }
  if (s.contains("seed")) {
    const json& seed = s["seed"];
    if (!seed.is_number_unsigned()) throw ScenarioError("solver.seed", "expected a non-negative integer");
    config.seed = seed.get<std::uint64_t>();
  }
  if (s.contains("max_iterations")) {
    config.max_iterations = static_cast<int>(positive_integer(s["max_iterations"], "solver.max_iterations"));
  }
  return config;
}

std::string syntax_location(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return fmt::format("line {}, column {}", line, column);
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError(syntax_location(json_text, e.byte), "JSON syntax error");
  }
  if (!doc.is_object()) throw ScenarioError("<root>", "expected a JSON object");
  reject_unknown(doc, "", {"name", "description", "alpha", "mu", "q", "cost", "market", "solver", "baselines"});

  const json& name = field(doc, "", "name");
  if (!name.is_string() || name.get<std::string>().empty()) throw ScenarioError("name", "expected a non-empty string");

  const double alpha = number(doc, "", "alpha");
  const double mu = number(doc, "", "mu");
  const double q = number(doc, "", "q");
  if (!(alpha > 0.0)) throw ScenarioError("alpha", "invariant alpha > 0 violated");
  if (!(mu > 0.0)) throw ScenarioError("mu", "invariant mu > 0 violated");
  if (!(q >= mu)) throw ScenarioError("q", "invariant q >= mu violated");
  DemandProfile profile = checked("q", [&] { return DemandProfile(alpha, mu, q); });

  const json& cost_obj = object(doc, "", "cost");
  reject_unknown(cost_obj, "cost", {"c0", "c1"});
  const double c0 = number(cost_obj, "cost", "c0");
  const double c1 = number(cost_obj, "cost", "c1");
  CostModel cost = checked("cost", [&] { return CostModel::affine(c0, c1); });

  Market market = parse_market(object(doc, "", "market"));
  const bool discrete = std::holds_alternative<DiscreteMarket>(market);
  SolverConfig solver = parse_solver(object(doc, "", "solver"), discrete);
  if (!discrete && !std::get<ContinuousMarket>(market).bounded()) {
    throw ScenarioError("market.sigma_max", "continuous markets need a finite upper type");
  }

  std::vector<double> baselines{1.0, 2.0};
  if (doc.contains("baselines")) {
    baselines.clear();
    const json& arr = doc["baselines"];
    if (!arr.is_array()) throw ScenarioError("baselines", "expected an array of periods");
    std::set<double> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = fmt::format("baselines[{}]", i);
      const double t = number(arr[i], where);
      if (!(t > 0.0)) throw ScenarioError(where, "period must be positive");
      if (!seen.insert(t).second) throw ScenarioError(where, "duplicate period");
      baselines.push_back(t);
    }
  }

  return Scenario{name.get<std::string>(), profile, cost, std::move(market), std::move(solver), std::move(baselines)};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ScenarioError(path.string(), e.what());
  }
  try {
    return parse_scenario(text);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

std::string baseline_label(double period) {
  if (period == 1.0) return "monthly";
  if (period == 2.0) return "rollover";
  return "fixed_" + format_number(period);
}

bool RunArtifacts::verified(double tolerance) const {
  if (!certificate.passed) return false;
  if (structural && !structural->passed) return false;
  if (consistency_gap > tolerance * std::max(1.0, std::abs(total_profit))) return false;
  if (grouped && !is_nondecreasing(grouped->profit_trace)) return false;
  return true;
}

namespace {

template <typename MarketT>
std::vector<BaselineComparison> compare_baselines(const Scenario& scenario, const MarketT& market, double optimal) {
  std::vector<BaselineComparison> out;
  for (double t : scenario.baselines) {
    for (BaselinePolicy policy : {BaselinePolicy::kFullCoverage, BaselinePolicy::kProfitMaximizing}) {
      const BaselineResult b = fixed_period_baseline(market, scenario.profile, scenario.cost, t, policy);
      std::string label = baseline_label(t);
      if (policy == BaselinePolicy::kProfitMaximizing) label += "_best_cutoff";
      out.push_back({label, b, uplift_percent(optimal, b.profit)});
    }
  }
  return out;
}

void add_rows(RunArtifacts& a, std::span<const double> sigmas, std::span<const double> periods,
              std::span<const double> prices, std::span<const double> counts, const CostModel& cost) {
  a.solution.clear();
  double recomputed = 0.0;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const double margin = item_profit({periods[i], prices[i]}, cost);
    a.solution.push_back({i + 1, sigmas[i], periods[i], prices[i], counts[i], margin});
    recomputed += counts[i] * margin;
  }
  a.consistency_gap = std::abs(recomputed - a.total_profit);
}

}  // namespace

RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunArtifacts a;
  a.scenario_name = scenario.name;
  const std::uint64_t seed = options.seed.value_or(scenario.solver.seed);
  if (const auto* market = std::get_if<DiscreteMarket>(&scenario.market)) {
    DiscreteSolution sol = solve_discrete(*market, scenario.profile, scenario.cost, {}, options.threads);
    a.total_profit = sol.total_profit;
    add_rows(a, market->types(), sol.periods, sol.prices, market->counts(), scenario.cost);
    const std::vector<ContractItem> items = sol.items();
    a.structural = feasibility_check(items, *market, scenario.profile, options.tolerance);
    a.certificate = brute_force_ic_ir(items, assign_discrete(*market), scenario.profile, options.tolerance);
    a.comparison = {sol.total_profit, compare_baselines(scenario, *market, sol.total_profit),
                    social_metrics(sol, *market, scenario.profile, scenario.cost)};
    a.warnings = sol.warnings;
    a.discrete = std::move(sol);
    return a;
  }

  const auto& market = std::get<ContinuousMarket>(scenario.market);
  AlternatingOptions opts;
  opts.groups = options.groups.value_or(scenario.solver.groups.front());
  opts.restarts = scenario.solver.restarts;
  opts.seed = seed;
  opts.max_iterations = scenario.solver.max_iterations;
  opts.threads = options.threads;
  GroupedSolution sol = solve_alternating(market, scenario.profile, scenario.cost, opts);
  a.regularity = verify_boundary_regularity(market, 1000);
  a.total_profit = sol.total_profit;
  const GroupedSolution menu = sol.collapsed();
  add_rows(a, menu.boundaries, menu.periods, menu.prices, menu.counts, scenario.cost);

  std::vector<double> types = sample_types(market, options.ic_samples, seed);
  types.push_back(market.sigma_min());
  types.push_back(market.sigma_max());
  types.insert(types.end(), menu.boundaries.begin(), menu.boundaries.end());
  a.certificate = brute_force_ic_ir(menu.items(), assign_grouped(menu, types), scenario.profile, options.tolerance);
  a.comparison = {sol.total_profit, compare_baselines(scenario, market, sol.total_profit),
                  social_metrics(sol, market, scenario.profile, scenario.cost)};
  a.warnings = sol.warnings;
  a.grouped = std::move(sol);
  return a;
}

std::string solution_csv(const RunArtifacts& a) {
  CsvTable t{{"group_index", "sigma_boundary", "period", "price", "count", "item_profit"}, {}};
  for (const SolutionRow& r : a.solution) {
    t.rows.push_back({std::to_string(r.group_index), format_number(r.sigma_boundary), format_number(r.period),
                      format_number(r.price), format_number(r.count), format_number(r.item_profit)});
  }
  return t.to_string();
}

std::string comparison_csv(const RunArtifacts& a) {
  CsvTable t{{"label", "profit", "uplift_percent"}, {}};
  t.rows.push_back({"optimal", format_number(a.comparison.optimal_profit), "0"});
  for (const BaselineComparison& b : a.comparison.baselines) {
    t.rows.push_back({b.label, format_number(b.baseline.profit), format_number(b.uplift_percent)});
  }
  return t.to_string();
}

std::string baselines_csv(const RunArtifacts& a) {
  CsvTable t{{"label", "policy", "period", "price", "marginal_sigma", "served_fraction", "profit"}, {}};
  for (const BaselineComparison& b : a.comparison.baselines) {
    const BaselineResult& r = b.baseline;
    t.rows.push_back({b.label, to_string(r.policy), format_number(r.period), format_number(r.price),
                      format_number(r.marginal_sigma), format_number(r.served_fraction), format_number(r.profit)});
  }
  return t.to_string();
}

namespace {

json certificate_to_json(const FeasibilityCertificate& c) {
  json out = {{"passed", c.passed},
              {"worst_ic_violation", c.worst_ic_violation},
              {"worst_ir_violation", c.worst_ir_violation},
              {"types_checked", c.types_checked},
              {"violating_pair", nullptr}};
  if (c.violating_pair) {
    const auto index = [](const std::optional<std::size_t>& i) { return i ? json(*i + 1) : json(nullptr); };
    out["violating_pair"] = {{"sigma", c.violating_pair->sigma},
                             {"item_chosen", index(c.violating_pair->chosen)},
                             {"item_assigned", index(c.violating_pair->assigned)}};
  }
  return out;
}

json structural_to_json(const FeasibilityReport& r) {
  return {{"passed", r.passed}, {"violated", to_string(r.violated)}, {"index", r.index}, {"violation", r.violation}};
}

}  // namespace

std::string certificate_json(const RunArtifacts& a) {
  json out;
  out["scenario"] = a.scenario_name;
  out["verified"] = a.verified();
  out["ic_ir"] = certificate_to_json(a.certificate);
  out["structural"] = a.structural ? structural_to_json(*a.structural) : json(nullptr);
  out["total_profit"] = a.total_profit;
  out["consistency_gap"] = a.consistency_gap;
  out["social_surplus_contract"] = a.comparison.social.contract_surplus;
  out["social_surplus_max"] = a.comparison.social.max_surplus;
  out["surplus_ratio"] = a.comparison.social.ratio;
  if (a.grouped) {
    out["iterations"] = a.grouped->iterations;
    out["converged"] = a.grouped->converged;
    out["profit_trace_nondecreasing"] = is_nondecreasing(a.grouped->profit_trace);
  }
  if (a.discrete) {
    json blocks = json::array();
    for (const auto& [first, last] : a.discrete->pooled_blocks) blocks.push_back({first + 1, last + 1});
    out["pooled_blocks"] = blocks;
  }
  if (a.regularity) {
    out["regularity"] = {{"holds", a.regularity->holds},
                         {"min_slack", a.regularity->min_slack},
                         {"argmin_sigma", a.regularity->argmin_sigma},
                         {"grid_points", a.regularity->grid_points}};
  }
  out["warnings"] = a.warnings;
  return out.dump(2) + "\n";
}

void write_artifacts(const RunArtifacts& a, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "solution.csv", solution_csv(a));
  write_file(out_dir / "comparison.csv", comparison_csv(a));
  write_file(out_dir / "baselines.csv", baselines_csv(a));
  write_file(out_dir / "certificate.json", certificate_json(a));
}

std::string SweepTable::to_csv() const {
  CsvTable t{{"groups", "profit", "iterations", "converged", "verified"}, {}};
  for (double p : baseline_periods) t.header.push_back("uplift_percent_" + baseline_label(p));
  for (const SweepRow& r : rows) {
    std::vector<std::string> row{std::to_string(r.groups), format_number(r.profit), std::to_string(r.iterations),
                                 r.converged ? "1" : "0", r.verified ? "1" : "0"};
    for (double u : r.uplift_percent) row.push_back(format_number(u));
    t.rows.push_back(std::move(row));
  }
  return t.to_string();
}

SweepTable sweep_groups(const Scenario& scenario, std::span<const std::size_t> groups, const RunOptions& options) {
  if (scenario.discrete()) throw PreconditionError("sweep_groups: needs a continuous market");
  const auto& market = std::get<ContinuousMarket>(scenario.market);
  SweepTable table;
  table.baseline_periods = scenario.baselines;
  std::vector<double> baseline_profit;
  for (double t : scenario.baselines) {
    baseline_profit.push_back(
        fixed_period_baseline(market, scenario.profile, scenario.cost, t, BaselinePolicy::kFullCoverage).profit);
  }
  for (std::size_t k : groups) {
    RunOptions opts = options;
    opts.groups = k;
    const RunArtifacts a = run_scenario(scenario, opts);
    SweepRow row{k, a.total_profit, a.grouped->iterations, a.grouped->converged, a.verified(options.tolerance), {}};
    for (double b : baseline_profit) row.uplift_percent.push_back(uplift_percent(a.total_profit, b));
    table.rows.push_back(std::move(row));
  }
  return table;
}

bool SolutionAudit::passed(double tolerance) const {
  return certificate.passed && (!structural || structural->passed) && price_chain_gap <= tolerance;
}

SolutionAudit verify_solution(const Scenario& scenario, const CsvTable& solution, const RunOptions& options) {
  if (solution.rows.empty()) throw PreconditionError("verify_solution: solution has no rows");
  const std::size_t c_index = solution.column("group_index");
  const std::size_t c_sigma = solution.column("sigma_boundary");
  const std::size_t c_period = solution.column("period");
  const std::size_t c_price = solution.column("price");
  const std::size_t c_count = solution.column("count");
  std::vector<std::vector<std::string>> rows = solution.rows;
  std::sort(rows.begin(), rows.end(),
            [&](const auto& x, const auto& y) { return std::stoul(x[c_index]) < std::stoul(y[c_index]); });
  std::vector<double> sigmas, periods, prices, counts;
  for (const auto& r : rows) {
    sigmas.push_back(std::stod(r[c_sigma]));
    periods.push_back(std::stod(r[c_period]));
    prices.push_back(std::stod(r[c_price]));
    counts.push_back(std::stod(r[c_count]));
  }
  std::vector<ContractItem> items;
  for (std::size_t i = 0; i < periods.size(); ++i) items.push_back({periods[i], prices[i]});

  SolutionAudit audit;
  std::vector<double> chain;
  if (const auto* market = std::get_if<DiscreteMarket>(&scenario.market)) {
    if (items.size() != market->size()) {
      throw PreconditionError(fmt::format("verify_solution: {} rows for {} types", items.size(), market->size()));
    }
    audit.structural = feasibility_check(items, *market, scenario.profile, options.tolerance);
    audit.certificate = brute_force_ic_ir(items, assign_discrete(*market), scenario.profile, options.tolerance);
    chain = std::is_sorted(periods.begin(), periods.end()) ? optimal_prices(periods, *market, scenario.profile)
                                                           : prices;
  } else {
    const auto& continuous = std::get<ContinuousMarket>(scenario.market);
    GroupedSolution menu;
    menu.boundaries = sigmas;
    menu.periods = periods;
    menu.prices = prices;
    menu.counts = counts;
    std::vector<double> types =
        sample_types(continuous, options.ic_samples, options.seed.value_or(scenario.solver.seed));
    types.insert(types.end(), sigmas.begin(), sigmas.end());
    audit.certificate = brute_force_ic_ir(items, assign_grouped(menu, types), scenario.profile, options.tolerance);
    chain = optimal_prices_grouped(sigmas, periods, scenario.profile);
  }
  for (std::size_t i = 0; i < prices.size(); ++i) {
    audit.price_chain_gap = std::max(audit.price_chain_gap, std::abs(prices[i] - chain[i]));
  }
  return audit;
}

}  // namespace dataplan
