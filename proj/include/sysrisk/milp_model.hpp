#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sysrisk/network.hpp"

namespace sysrisk {

enum class Direction { Minimize, Maximize };
enum class RowSense { LessEqual, Equal, GreaterEqual };

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
  bool operator==(const Triplet&) const = default;
};

/// One block of linear constraints in triplet form, all rows sharing a sense.
struct ConstraintBlock {
  std::size_t rows = 0;
  RowSense sense = RowSense::Equal;
  std::vector<Triplet> entries;  // sorted by (row, col)
  std::vector<double> rhs;

  bool operator==(const ConstraintBlock&) const = default;
};

/// Column-major vectorization of L stretched to length N^2.
struct ExpandedVectors {
  std::vector<double> e_bar;  // equity of the creditor (column) of each entry
  std::vector<double> a_bar;  // interbank assets of the creditor
  std::vector<double> l_bar;  // interbank liabilities of the debtor (row)
};

/// Mixed-integer program over z = (y, delta), each of length 2N^2.
///
/// Entry k of vec(L) (k = j*N + i for L(i, j)) owns the continuous pair
/// y[2k] (below-equity part) and y[2k+1] (above-equity part), and the binaries
/// delta[2k], delta[2k+1] at offset 2N^2. A1 holds the four indicator rows of
/// every pair in the order  y1 - e d1 <= 0,  -y1 + e d2 <= 0,  y2 - u d2 <= 0,
/// -d1 + d2 <= 0.  A2/A3 fix column/row sums and A4 the kappa-weighted column sums.
struct MilpProblem {
  std::size_t n_banks = 0;
  std::size_t n_vars = 0;
  Direction direction = Direction::Minimize;
  std::vector<double> c;
  ConstraintBlock a1, a2, a3, a4;
  std::vector<double> lower, upper;
  std::vector<char> is_integer;
  std::size_t presolve_eliminated = 0;

  std::size_t n_pairs() const { return n_banks * n_banks; }
  std::size_t y_offset() const { return 0; }
  std::size_t delta_offset() const { return 2 * n_pairs(); }
  std::size_t free_binaries() const;

  bool operator==(const MilpProblem&) const = default;
};

std::vector<double> vectorize(const SquareMatrix& l);
SquareMatrix devectorize(std::span<const double> x, std::size_t n);

ExpandedVectors expand_vectors(const BankingSystem& system);

MilpProblem build_problem(const BankingSystem& system, Direction direction,
                          RowSense risk_sense = RowSense::Equal);

/// Fixes or relaxes binaries the indicator structure makes redundant; feasible y-set unchanged.
MilpProblem presolve(MilpProblem problem);

/// Un-normalised objective sum_ij min(L_ij/e_j, 1) a_j, with a_j taken from the system.
double objective_value(const BankingSystem& system, const SquareMatrix& candidate);

/// Splits x = vec(L) into (y, delta) using y1 = min(x, e), y2 = x - y1, delta by positivity.
std::vector<double> split_network(const MilpProblem& problem, std::span<const double> e_bar,
                                  const SquareMatrix& l);

/// L*(i, j) = y[2k] + y[2k+1], diagonal forced to zero.
SquareMatrix extract_network(std::span<const double> z, std::size_t n);

double linear_objective(const MilpProblem& problem, std::span<const double> z);

/// Largest absolute violation of bounds, integrality and every constraint row by z.
double max_violation(const MilpProblem& problem, std::span<const double> z);

std::string to_string(RowSense sense);
std::string to_string(Direction direction);

}  // namespace sysrisk
