#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sysrisk/milp_model.hpp"

namespace sysrisk {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// min cost'x + offset  s.t.  rows (sense) rhs,  lower <= x <= upper.
/// Lower bounds must be finite.
struct LinearProgram {
  std::size_t n_cols = 0;
  std::size_t n_rows = 0;
  std::vector<double> cost;
  double offset = 0.0;
  std::vector<double> lower, upper;
  std::vector<Triplet> entries;
  std::vector<RowSense> sense;
  std::vector<double> rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

struct LpOptions {
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  long iteration_limit = 0;  // 0 selects a size-based default
  // Structural columns priced ahead of the rest while any of them improves, e.g. the basis of
  // a closely related LP. Only the pivot order changes, never the result's validity.
  std::vector<std::size_t> preferred;
};

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> reduced_cost;  // structural columns of the minimisation solved; set when optimal
  std::vector<char> basic;           // structural columns in the final basis; set when optimal
  long iterations = 0;
  std::string diagnostic;
};

/// Bounded-variable revised simplex with a dense basis inverse, two phases.
/// Redundant equality rows are tolerated: their artificials stay basic at zero.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

/// LP relaxation of a MILP in the full z-space (integrality dropped). Maximisation is
/// handled internally; the returned objective is in the problem's own direction.
LpSolution solve_lp(const MilpProblem& problem, const LpOptions& options = {});

std::string to_string(LpStatus status);

}  // namespace sysrisk
