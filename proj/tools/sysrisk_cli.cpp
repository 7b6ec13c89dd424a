// Command-line front end. Talks to the library only through the C interface.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sysrisk.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kSolver = 3 };

int exit_code(sysrisk_status s) {
  switch (s) {
    case SYSRISK_OK: return kOk;
    case SYSRISK_PARSE_ERROR:
    case SYSRISK_VALIDATION_ERROR: return kInvalid;
    case SYSRISK_SOLVER_ERROR: return kSolver;
    default: return kUsage;
  }
}

int report(sysrisk_status s) {
  if (s != SYSRISK_OK) std::cerr << "error: " << sysrisk_status_name(s) << ": " << sysrisk_last_error() << "\n";
  return exit_code(s);
}

struct SystemDeleter {
  void operator()(sysrisk_system* s) const { sysrisk_system_destroy(s); }
};
struct SolutionDeleter {
  void operator()(sysrisk_solution* s) const { sysrisk_solution_destroy(s); }
};
struct StringDeleter {
  void operator()(char* s) const { sysrisk_string_free(s); }
};
using System = std::unique_ptr<sysrisk_system, SystemDeleter>;
using Solution = std::unique_ptr<sysrisk_solution, SolutionDeleter>;
using Text = std::unique_ptr<char, StringDeleter>;

struct Inputs {
  std::string banks, exposures;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--banks", in.banks, "Bank CSV (bank_id,equity[,total_assets,total_liabilities])")->required();
  cmd->add_option("--exposures", in.exposures, "Exposure CSV (debtor_id,creditor_id,amount)")->required();
}

sysrisk_status load(const Inputs& in, System& out) {
  sysrisk_system* raw = nullptr;
  const auto s = sysrisk_system_load_csv(in.banks.c_str(), in.exposures.c_str(), &raw);
  out.reset(raw);
  return s;
}

bool write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) std::cerr << "error: cannot write " << path << "\n";
  return static_cast<bool>(f);
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::map<std::string, sysrisk_direction> kDirections{{"min", SYSRISK_MINIMIZE}, {"max", SYSRISK_MAXIMIZE}};
const std::map<std::string, sysrisk_risk_sense> kSenses{{"eq", SYSRISK_RISK_EQUAL},
                                                       {"geq", SYSRISK_RISK_GREATER_EQUAL}};
const std::map<std::string, sysrisk_assortativity> kConventions{
    {"source_out_target_in", SYSRISK_ASSORT_SOURCE_OUT_TARGET_IN},
    {"source_in_target_out", SYSRISK_ASSORT_SOURCE_IN_TARGET_OUT},
    {"total_degree", SYSRISK_ASSORT_TOTAL_DEGREE}};

const char* solve_status_name(sysrisk_solve_status s) {
  switch (s) {
    case SYSRISK_SOLVE_OPTIMAL: return "optimal";
    case SYSRISK_SOLVE_GAP_REACHED: return "gap_reached";
    case SYSRISK_SOLVE_INFEASIBLE: return "infeasible";
    case SYSRISK_SOLVE_LIMIT_HIT: return "limit_hit";
  }
  return "unknown";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Systemic-risk analysis and optimisation of interbank exposure networks"};
  app.require_subcommand(1);

  Inputs in;
  std::string out_path;

  auto* validate = app.add_subcommand("validate", "Check a network for structural problems");
  add_inputs(validate, in);

  std::string variant = "dr";
  double epsilon = 1e-6;
  auto* debtrank = app.add_subcommand("debtrank", "Per-bank DebtRank and direct impact");
  add_inputs(debtrank, in);
  debtrank->add_option("--variant", variant, "dr (single transmission) or dr2 (differential shocks)")
      ->check(CLI::IsMember({"dr", "dr2"}));
  debtrank->add_option("--epsilon", epsilon, "Convergence threshold for dr2")->check(CLI::PositiveNumber);
  debtrank->add_option("-o,--output", out_path, "Output CSV (default stdout)");

  sysrisk_solve_options solve;
  sysrisk_solve_options_init(&solve);
  sysrisk_direction direction = SYSRISK_MINIMIZE;
  std::string out_banks, out_exposures;
  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--risk-sense", solve.risk_sense, "eq or geq for the risk-weighted rows")
        ->transform(CLI::CheckedTransformer(kSenses, CLI::ignore_case));
    cmd->add_option("--gap", solve.gap_tolerance, "Relative optimality gap")->check(CLI::PositiveNumber);
    cmd->add_option("--time-limit", solve.time_limit_seconds, "Seconds per solve (0: none)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--node-limit", solve.node_limit, "Branch-and-bound nodes per solve (0: none)");
  };

  auto* optimize = app.add_subcommand("optimize", "Minimise or maximise systemic risk at fixed aggregates");
  add_inputs(optimize, in);
  optimize->add_option("--direction", direction, "min or max")
      ->transform(CLI::CheckedTransformer(kDirections, CLI::ignore_case));
  add_solver_flags(optimize);
  optimize->add_option("--out-banks", out_banks, "Write the optimised network's bank CSV");
  optimize->add_option("--out-exposures", out_exposures, "Write the optimised network's exposure CSV");

  double coverage = 0.9;
  sysrisk_assortativity convention = SYSRISK_ASSORT_SOURCE_OUT_TARGET_IN;
  auto* metrics = app.add_subcommand("metrics", "Topology of the network and its thresholded variant");
  add_inputs(metrics, in);
  metrics->add_option("--threshold-coverage", coverage, "Volume share kept by the thresholded network")
      ->check(CLI::Range(0.0, 1.0));
  metrics->add_option("--assortativity", convention, "Degree pairing across links")
      ->transform(CLI::CheckedTransformer(kConventions, CLI::ignore_case));
  metrics->add_option("-o,--output", out_path, "Output JSON (default stdout)");

  auto* mps = app.add_subcommand("export-mps", "Write the optimisation model in free MPS format");
  add_inputs(mps, in);
  mps->add_option("--direction", direction, "min or max")
      ->transform(CLI::CheckedTransformer(kDirections, CLI::ignore_case));
  mps->add_option("--risk-sense", solve.risk_sense, "eq or geq")
      ->transform(CLI::CheckedTransformer(kSenses, CLI::ignore_case));
  mps->add_option("-o,--output", out_path, "Output file (default stdout)");

  sysrisk_synth_options synth;
  sysrisk_synth_options_init(&synth);
  std::string weights = "lognormal", equity = "fraction", kappa = "constant";
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic banking system");
  gen->add_option("--n", synth.n, "Number of banks")->check(CLI::Range(2, 100000));
  gen->add_option("--density", synth.density, "Target link density")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", synth.seed, "Random seed");
  gen->add_option("--weights", weights, "lognormal or uniform")->check(CLI::IsMember({"lognormal", "uniform"}));
  gen->add_option("--weight-a", synth.weight_a, "Log-normal mu or uniform lower end");
  gen->add_option("--weight-b", synth.weight_b, "Log-normal sigma or uniform upper end");
  gen->add_option("--equity", equity, "fraction (e = a (a_i + 1)) or lognormal")
      ->check(CLI::IsMember({"fraction", "lognormal"}));
  gen->add_option("--equity-a", synth.equity_a, "Equity fraction or log-normal mu");
  gen->add_option("--equity-b", synth.equity_b, "Log-normal sigma of equity");
  gen->add_option("--kappa", kappa, "constant or leverage")->check(CLI::IsMember({"constant", "leverage"}));
  gen->add_option("--out-banks", out_banks, "Bank CSV to write")->required();
  gen->add_option("--out-exposures", out_exposures, "Exposure CSV to write")->required();

  sysrisk_pipeline_options pipe;
  sysrisk_pipeline_options_init(&pipe);
  std::string label = "run", report_path, csv_path;
  bool timings = false;
  auto* pipeline = app.add_subcommand("pipeline", "Empirical, minimised, maximised and thresholded analysis");
  add_inputs(pipeline, in);
  add_solver_flags(pipeline);
  pipeline->add_option("--threshold-coverage", coverage, "Volume share kept by the thresholded network")
      ->check(CLI::Range(0.0, 1.0));
  pipeline->add_option("--epsilon", epsilon, "Convergence threshold for DebtRank2")->check(CLI::PositiveNumber);
  pipeline->add_option("--assortativity", convention, "Degree pairing across links")
      ->transform(CLI::CheckedTransformer(kConventions, CLI::ignore_case));
  pipeline->add_option("--label", label, "Run label used in the report");
  pipeline->add_flag("--timings", timings, "Include wall-clock solver times (breaks byte-identical reruns)");
  pipeline->add_option("--report", report_path, "Report JSON (default stdout)");
  pipeline->add_option("--long-csv", csv_path, "Long-format CSV with headline metrics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (validate->parsed()) {
    System system;
    const auto s = load(in, system);
    if (s != SYSRISK_OK) return report(s);
    std::cout << "ok: " << sysrisk_system_size(system.get()) << " banks\n";
    return kOk;
  }

  if (debtrank->parsed()) {
    System system;
    if (auto s = load(in, system); s != SYSRISK_OK) return report(s);
    const size_t n = sysrisk_system_size(system.get());
    std::vector<double> r(n), impact(n);
    int converged = 1;
    auto s = variant == "dr" ? sysrisk_debtrank(system.get(), r.data())
                             : sysrisk_debtrank2(system.get(), epsilon, r.data(), &converged);
    if (s == SYSRISK_OK) s = sysrisk_direct_impact(system.get(), impact.data());
    if (s != SYSRISK_OK) return report(s);
    std::string text = "bank_id," + std::string(variant == "dr" ? "debtrank" : "debtrank2") + ",direct_impact\n";
    double total_r = 0.0, total_i = 0.0;
    for (size_t i = 0; i < n; ++i) {
      text += std::string(sysrisk_system_bank_id(system.get(), i)) + "," + number(r[i]) + "," + number(impact[i]) + "\n";
      total_r += r[i];
      total_i += impact[i];
    }
    text += "TOTAL," + number(total_r) + "," + number(total_i) + "\n";
    if (!converged) std::cerr << "warning: DebtRank2 hit its iteration cap before converging\n";
    return write_text(out_path, text) ? kOk : kUsage;
  }

  if (optimize->parsed()) {
    System system;
    if (auto s = load(in, system); s != SYSRISK_OK) return report(s);
    sysrisk_solution* raw = nullptr;
    const auto s = sysrisk_optimize(system.get(), direction, &solve, &raw);
    Solution sol(raw);
    if (s != SYSRISK_OK) return report(s);
    const auto status = sysrisk_solution_status(sol.get());
    std::cout << "status: " << solve_status_name(status) << "\n";
    if (!sysrisk_solution_has_network(sol.get())) {
      std::cerr << "error: no network found\n";
      return kSolver;
    }
    std::cout << "objective: " << number(sysrisk_solution_objective(sol.get())) << "\n"
              << "best_bound: " << number(sysrisk_solution_best_bound(sol.get())) << "\n"
              << "gap: " << number(sysrisk_solution_gap(sol.get())) << "\n"
              << "nodes: " << sysrisk_solution_nodes(sol.get()) << "\n";
    if (!out_banks.empty() || !out_exposures.empty()) {
      if (out_banks.empty() || out_exposures.empty()) {
        std::cerr << "error: --out-banks and --out-exposures go together\n";
        return kUsage;
      }
      sysrisk_system* optimised = nullptr;
      if (auto t = sysrisk_solution_system(sol.get(), &optimised); t != SYSRISK_OK) return report(t);
      System holder(optimised);
      if (auto t = sysrisk_system_save_csv(holder.get(), out_banks.c_str(), out_exposures.c_str()); t != SYSRISK_OK)
        return report(t);
    }
    return kOk;
  }

  if (metrics->parsed()) {
    System system;
    if (auto s = load(in, system); s != SYSRISK_OK) return report(s);
    char* raw = nullptr;
    const auto s = sysrisk_metrics_json(system.get(), coverage, convention, &raw);
    Text json(raw);
    if (s != SYSRISK_OK) return report(s);
    return write_text(out_path, json.get()) ? kOk : kUsage;
  }

  if (mps->parsed()) {
    System system;
    if (auto s = load(in, system); s != SYSRISK_OK) return report(s);
    char* raw = nullptr;
    const auto s = sysrisk_export_mps(system.get(), direction, solve.risk_sense, &raw);
    Text text(raw);
    if (s != SYSRISK_OK) return report(s);
    return write_text(out_path, text.get()) ? kOk : kUsage;
  }

  if (gen->parsed()) {
    synth.uniform_weights = weights == "uniform";
    if (synth.uniform_weights && gen->count("--weight-a") == 0 && gen->count("--weight-b") == 0) {
      synth.weight_a = 0.5;
      synth.weight_b = 1.5;
    }
    synth.lognormal_equity = equity == "lognormal";
    if (synth.lognormal_equity && gen->count("--equity-a") == 0) synth.equity_a = 0.0;
    synth.leverage_kappa = kappa == "leverage";
    sysrisk_system* raw = nullptr;
    const auto s = sysrisk_generate(&synth, &raw);
    System system(raw);
    if (s != SYSRISK_OK) return report(s);
    return report(sysrisk_system_save_csv(system.get(), out_banks.c_str(), out_exposures.c_str()));
  }

  if (pipeline->parsed()) {
    System system;
    if (auto s = load(in, system); s != SYSRISK_OK) return report(s);
    pipe.solve = solve;
    pipe.threshold_coverage = coverage;
    pipe.debtrank2_epsilon = epsilon;
    pipe.convention = convention;
    pipe.include_timings = timings ? 1 : 0;
    pipe.run_label = label.c_str();
    char* json_raw = nullptr;
    char* csv_raw = nullptr;
    const auto s = sysrisk_pipeline(system.get(), &pipe, &json_raw, csv_path.empty() ? nullptr : &csv_raw);
    Text json(json_raw), csv(csv_raw);
    if (s != SYSRISK_OK) return report(s);
    if (!write_text(report_path, json.get())) return kUsage;
    if (!csv_path.empty() && !write_text(csv_path, csv.get())) return kUsage;
    return kOk;
  }
  return kUsage;
}
