#pragma once

#include <map>
#include <optional>
#include <string>

#include "sysrisk/contagion.hpp"
#include "sysrisk/metrics.hpp"
#include "sysrisk/milp_solver.hpp"

namespace sysrisk {

inline constexpr const char* kReportSchema = "sysrisk-report/1";

struct PipelineOptions {
  std::string run_label = "run";
  RowSense risk_sense = RowSense::Equal;
  SolveOptions solve;
  DebtRank2Options debtrank2;
  double threshold_coverage = 0.9;
  AssortativityConvention convention = AssortativityConvention::SourceOutTargetIn;
  bool include_timings = false;  // wall-clock fields make reports non-reproducible
};

struct NetworkSection {
  SquareMatrix liabilities;
  double objective = 0.0;  // sum_ij min(L_ij / e_j, 1) a_j
  RiskReport risk;
  TopologyReport topology;
};

struct SolverSection {
  SolveStatus status = SolveStatus::Optimal;
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  std::size_t nodes = 0;
  long lp_iterations = 0;
  std::size_t free_binaries = 0;
  std::size_t presolve_eliminated = 0;
  double wall_time = 0.0;
};

struct RunReport {
  std::string run_label;
  std::string input_digest;
  std::vector<std::string> bank_ids;
  double total_volume = 0.0;
  PipelineOptions options;
  // Keys: empirical, minimized, maximized, thresholded.
  std::map<std::string, NetworkSection> networks;
  SolverSection minimize, maximize;
  std::optional<double> reduction_factor;         // DebtRank: empirical / minimized
  std::optional<double> impact_reduction_factor;  // direct impact: empirical / minimized
  // Bank-level Pearson correlation of DebtRank and direct impact, per network.
  std::map<std::string, std::optional<double>> bank_correlation;
  // Correlation of system DebtRank and system direct impact across the four networks.
  std::optional<double> system_correlation;
  bool sandwich_holds = true;
};

/// Empirical analysis, minimisation, maximisation and thresholding in one pass.
/// Throws SolverError naming the stage when an optimisation yields no network.
RunReport run_pipeline(const BankingSystem& system, const PipelineOptions& options = {});

/// Stable JSON document (sorted keys, two-space indent).
std::string report_json(const RunReport& report);

/// Risk and topology of the network and of its thresholded variant, as JSON.
std::string metrics_json(const BankingSystem& system, double threshold_coverage,
                         AssortativityConvention convention = AssortativityConvention::SourceOutTargetIn);

/// Long format: run,network_type,metric,value.
std::string report_long_csv(const RunReport& report);

}  // namespace sysrisk
