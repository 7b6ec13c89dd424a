#include "sysrisk/pipeline.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "sysrisk/io.hpp"

namespace sysrisk {

namespace {

using nlohmann::json;

const char* const kNetworkOrder[] = {"empirical", "minimized", "maximized", "thresholded"};

NetworkSection analyse(const BankingSystem& system, const PipelineOptions& options) {
  NetworkSection s;
  s.liabilities = system.liabilities;
  s.objective = objective_value(system, system.liabilities);
  s.risk = risk_report(system, options.debtrank2);
  s.topology = topology_report(system.liabilities, options.convention);
  return s;
}

SolverSection optimise(const BankingSystem& system, Direction direction, const PipelineOptions& options,
                       SquareMatrix& network) {
  const auto problem = presolve(build_problem(system, direction, options.risk_sense));
  const auto ev = expand_vectors(system);
  const auto warm = split_network(problem, ev.e_bar, system.liabilities);
  const MilpSolution sol = solve(problem, options.solve, warm);
  const std::string stage = direction == Direction::Minimize ? "minimize" : "maximize";
  if (!sol.has_solution()) throw SolverError(stage + " stage: solver ended with status " + to_string(sol.status));
  network = sol.l_star;
  SolverSection out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.best_bound = sol.best_bound;
  out.gap = sol.gap;
  out.nodes = sol.node_count;
  out.lp_iterations = sol.lp_iterations;
  out.free_binaries = problem.free_binaries();
  out.presolve_eliminated = problem.presolve_eliminated;
  out.wall_time = sol.wall_time;
  return out;
}

std::optional<double> ratio(double num, double den) {
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json network_json(const NetworkSection& s) {
  json matrix = json::array();
  for (std::size_t i = 0; i < s.liabilities.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < s.liabilities.size(); ++j) row.push_back(s.liabilities(i, j));
    matrix.push_back(std::move(row));
  }
  json nn = json::array();
  for (const auto& v : s.topology.weighted_nn_degree) nn.push_back(opt(v));
  return json{
      {"liabilities", matrix},
      {"objective", s.objective},
      {"risk",
       {{"debtrank", s.risk.debtrank},
        {"debtrank_total", s.risk.debtrank_total},
        {"debtrank2", s.risk.debtrank2},
        {"debtrank2_total", s.risk.debtrank2_total},
        {"debtrank2_converged", s.risk.debtrank2_converged},
        {"direct_impact", s.risk.direct_impact},
        {"direct_impact_total", s.risk.direct_impact_total}}},
      {"topology",
       {{"links", s.topology.links},
        {"link_density", s.topology.link_density},
        {"in_degree", s.topology.in_degree},
        {"out_degree", s.topology.out_degree},
        {"assortativity", opt(s.topology.assortativity)},
        {"assortativity_convention", to_string(s.topology.convention)},
        {"local_clustering", s.topology.local_clustering},
        {"mean_clustering", s.topology.mean_clustering},
        {"weighted_nn_degree", nn},
        {"mean_weighted_nn_degree", opt(s.topology.mean_weighted_nn_degree)}}},
  };
}

json solver_json(const SolverSection& s, bool timings) {
  json j{{"status", to_string(s.status)},
         {"objective", s.objective},
         {"best_bound", finite(s.best_bound)},
         {"gap", finite(s.gap)},
         {"nodes", s.nodes},
         {"lp_iterations", s.lp_iterations},
         {"free_binaries", s.free_binaries},
         {"presolve_eliminated", s.presolve_eliminated}};
  if (timings) j["wall_time_seconds"] = s.wall_time;
  return j;
}

}  // namespace

RunReport run_pipeline(const BankingSystem& system, const PipelineOptions& options) {
  require_valid(system);
  if (!(options.threshold_coverage > 0.0 && options.threshold_coverage <= 1.0))
    throw Error("threshold coverage must lie in (0, 1]");
  RunReport r;
  r.run_label = options.run_label;
  r.input_digest = input_digest(system);
  r.bank_ids = system.bank_ids;
  r.total_volume = aggregates(system).total_volume;
  r.options = options;

  r.networks["empirical"] = analyse(system, options);
  SquareMatrix minimized, maximized;
  r.minimize = optimise(system, Direction::Minimize, options, minimized);
  r.maximize = optimise(system, Direction::Maximize, options, maximized);
  r.networks["minimized"] = analyse(with_liabilities(system, minimized), options);
  r.networks["maximized"] = analyse(with_liabilities(system, maximized), options);
  r.networks["thresholded"] =
      analyse(with_liabilities(system, threshold_network(system.liabilities, options.threshold_coverage)), options);

  const auto& emp = r.networks["empirical"];
  const auto& mn = r.networks["minimized"];
  const auto& mx = r.networks["maximized"];
  r.reduction_factor = ratio(emp.risk.debtrank_total, mn.risk.debtrank_total);
  r.impact_reduction_factor = ratio(emp.risk.direct_impact_total, mn.risk.direct_impact_total);

  std::vector<double> system_r, system_i;
  for (const char* name : kNetworkOrder) {
    const auto& s = r.networks[name];
    r.bank_correlation[name] = s.risk.pearson_debtrank_impact;
    system_r.push_back(s.risk.debtrank_total);
    system_i.push_back(s.risk.direct_impact_total);
  }
  r.system_correlation = pearson(system_r, system_i);

  const double tol = 1e-9 * std::max(1.0, std::abs(mx.objective));
  r.sandwich_holds = mn.objective <= emp.objective + tol && emp.objective <= mx.objective + tol;
  return r;
}

std::string report_json(const RunReport& r) {
  const auto& o = r.options;
  json networks = json::object();
  for (const auto& [name, s] : r.networks) networks[name] = network_json(s);
  json bank_corr = json::object();
  for (const auto& [name, v] : r.bank_correlation) bank_corr[name] = opt(v);
  json settings{
      {"risk_sense", to_string(o.risk_sense)},
      {"gap_tolerance", o.solve.gap_tolerance},
      {"node_limit", o.solve.node_limit},
      {"time_limit_seconds", o.solve.time_limit_seconds},
      {"deterministic_tie_breaking", o.solve.deterministic_tie_breaking},
      {"threshold_coverage", o.threshold_coverage},
      {"debtrank2_epsilon", o.debtrank2.epsilon},
      {"debtrank2_iteration_cap", o.debtrank2.iteration_cap},
      {"assortativity_convention", to_string(o.convention)},
  };
  json doc{
      {"schema", kReportSchema},
      {"run", r.run_label},
      {"input_digest", r.input_digest},
      {"n_banks", r.bank_ids.size()},
      {"bank_ids", r.bank_ids},
      {"total_volume", r.total_volume},
      {"settings", settings},
      {"networks", networks},
      {"solver", {{"minimize", solver_json(r.minimize, o.include_timings)},
                  {"maximize", solver_json(r.maximize, o.include_timings)}}},
      {"reduction_factor", opt(r.reduction_factor)},
      {"impact_reduction_factor", opt(r.impact_reduction_factor)},
      {"correlations", {{"bank_level", bank_corr}, {"system_level", opt(r.system_correlation)}}},
      {"objective_sandwich",
       {{"minimized", r.networks.at("minimized").objective},
        {"empirical", r.networks.at("empirical").objective},
        {"maximized", r.networks.at("maximized").objective},
        {"holds", r.sandwich_holds}}},
  };
  return doc.dump(2) + "\n";
}

std::string metrics_json(const BankingSystem& system, double threshold_coverage,
                         AssortativityConvention convention) {
  require_valid(system);
  PipelineOptions options;
  options.threshold_coverage = threshold_coverage;
  options.convention = convention;
  const auto thresholded = with_liabilities(system, threshold_network(system.liabilities, threshold_coverage));
  json doc{{"bank_ids", system.bank_ids},
           {"threshold_coverage", threshold_coverage},
           {"networks", {{"empirical", network_json(analyse(system, options))},
                         {"thresholded", network_json(analyse(thresholded, options))}}}};
  return doc.dump(2) + "\n";
}

std::string report_long_csv(const RunReport& r) {
  std::ostringstream out;
  out << "run,network_type,metric,value\n";
  auto row = [&](const std::string& network, const std::string& metric, const std::optional<double>& v) {
    out << r.run_label << ',' << network << ',' << metric << ',';
    if (v) out << format_double(*v);
    out << '\n';
  };
  for (const char* name : kNetworkOrder) {
    const auto& s = r.networks.at(name);
    row(name, "debtrank_total", s.risk.debtrank_total);
    row(name, "debtrank2_total", s.risk.debtrank2_total);
    row(name, "direct_impact_total", s.risk.direct_impact_total);
    row(name, "objective", s.objective);
    row(name, "links", static_cast<double>(s.topology.links));
    row(name, "link_density", s.topology.link_density);
    row(name, "assortativity", s.topology.assortativity);
    row(name, "mean_clustering", s.topology.mean_clustering);
    row(name, "mean_weighted_nn_degree", s.topology.mean_weighted_nn_degree);
    row(name, "pearson_debtrank_impact", s.risk.pearson_debtrank_impact);
  }
  row("system", "reduction_factor", r.reduction_factor);
  row("system", "impact_reduction_factor", r.impact_reduction_factor);
  row("system", "pearson_debtrank_impact", r.system_correlation);
  return out.str();
}

}  // namespace sysrisk
