#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sysrisk/network.hpp"

namespace sysrisk {

enum class NodeState { Undistressed, Distressed, Inactive };

/// Trace of a single DebtRank run: distress levels and states after the final step.
struct DebtRankState {
  std::vector<double> h;
  std::vector<NodeState> s;
  int iterations = 0;  // T
};

struct DebtRank2Result {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
};

struct DebtRank2Options {
  double epsilon = 1e-6;
  int iteration_cap = 10000;
};

struct RiskReport {
  std::vector<double> debtrank;
  double debtrank_total = 0.0;
  std::vector<double> debtrank2;
  double debtrank2_total = 0.0;
  bool debtrank2_converged = true;
  std::vector<double> direct_impact;
  double direct_impact_total = 0.0;
  // Pearson correlation of per-bank DebtRank and direct impact; absent for zero variance.
  std::optional<double> pearson_debtrank_impact;
};

/// Runs the single-transmission DebtRank recursion from one initially defaulting bank.
DebtRankState debtrank_run(const SquareMatrix& impact, std::size_t seed);

double debtrank_single(const BankingSystem& system, const SquareMatrix& impact,
                       std::span<const double> v, std::size_t seed);

/// Per-bank DebtRank for every seed.
std::vector<double> debtrank_all(const BankingSystem& system);

/// Differential-shock DebtRank: increments keep propagating until they fall below epsilon.
DebtRank2Result debtrank2_single(const BankingSystem& system, const SquareMatrix& impact,
                                 std::span<const double> v, std::size_t seed,
                                 const DebtRank2Options& options = {});

std::vector<DebtRank2Result> debtrank2_all(const BankingSystem& system,
                                           const DebtRank2Options& options = {});

/// I_i = (1/Lbar) sum_j min(L_ij / e_j, 1) a_j; all zero on an empty market.
std::vector<double> direct_impact(const BankingSystem& system);

RiskReport risk_report(const BankingSystem& system, const DebtRank2Options& dr2 = {});

std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

}  // namespace sysrisk
