#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sysrisk/milp_model.hpp"
#include "sysrisk/network.hpp"

namespace sysrisk {

struct SolveOptions {
  double gap_tolerance = 1e-6;          // relative
  double integrality_tolerance = 1e-7;
  double feasibility_tolerance = 1e-8;
  long node_limit = 0;                  // 0: unlimited
  double time_limit_seconds = 0.0;      // 0: unlimited
  bool deterministic_tie_breaking = true;
};

enum class SolveStatus { Optimal, GapReached, Infeasible, LimitHit };

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> z;
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  SquareMatrix l_star;
  long node_count = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;

  bool has_solution() const {
    return status == SolveStatus::Optimal || status == SolveStatus::GapReached ||
           (status == SolveStatus::LimitHit && !z.empty());
  }
};

/// Branch-and-bound over the indicator binaries of a problem produced by build_problem
/// (optionally presolved). Throws Error if the problem lacks that pair structure.
/// warm_start, when given and feasible, seeds the incumbent.
MilpSolution solve(const MilpProblem& problem, const SolveOptions& options = {},
                   std::span<const double> warm_start = {});

/// Builds, presolves and solves for a system, warm-started from its own network.
MilpSolution optimize(const BankingSystem& system, Direction direction,
                      RowSense risk_sense = RowSense::Equal, const SolveOptions& options = {});

struct OracleResult {
  double min_objective = 0.0;
  double max_objective = 0.0;
  std::size_t points_examined = 0;
};

/// Exhaustive enumeration for N <= 4. Every vertex of the cells cut out of the feasible
/// polytope by the hyperplanes L_ij = e_j is visited; the concave objective is linear on
/// each cell, so both extrema are attained among them.
OracleResult brute_force_oracle(const BankingSystem& system, RowSense risk_sense = RowSense::Equal);

std::string to_string(SolveStatus status);

}  // namespace sysrisk
