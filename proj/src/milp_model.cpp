#include "sysrisk/milp_model.hpp"

#include <algorithm>
#include <cmath>

namespace sysrisk {

std::size_t MilpProblem::free_binaries() const {
  std::size_t count = 0;
  for (std::size_t j = 0; j < n_vars; ++j) {
    if (is_integer[j] && lower[j] < upper[j]) ++count;
  }
  return count;
}

std::vector<double> vectorize(const SquareMatrix& l) {
  const std::size_t n = l.size();
  std::vector<double> x(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) x[j * n + i] = l(i, j);
  }
  return x;
}

SquareMatrix devectorize(std::span<const double> x, std::size_t n) {
  if (x.size() != n * n) throw Error("devectorize: length is not N^2");
  SquareMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) l(i, j) = x[j * n + i];
  }
  return l;
}

ExpandedVectors expand_vectors(const BankingSystem& system) {
  const std::size_t n = system.size();
  const auto agg = aggregates(system);
  ExpandedVectors ev;
  ev.e_bar.resize(n * n);
  ev.a_bar.resize(n * n);
  ev.l_bar.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = j * n + i;
      ev.e_bar[k] = system.equity[j];
      ev.a_bar[k] = agg.a[j];
      ev.l_bar[k] = agg.l[i];
    }
  }
  return ev;
}

namespace {

void push(ConstraintBlock& block, std::size_t row, std::size_t col, double value) {
  if (value != 0.0) block.entries.push_back({row, col, value});
}

}  // namespace

MilpProblem build_problem(const BankingSystem& system, Direction direction, RowSense risk_sense) {
  require_valid(system);
  const std::size_t n = system.size();
  const std::size_t np = n * n;
  const auto agg = aggregates(system);
  const auto ev = expand_vectors(system);

  MilpProblem p;
  p.n_banks = n;
  p.n_vars = 4 * np;
  p.direction = direction;
  p.c.assign(p.n_vars, 0.0);
  p.lower.assign(p.n_vars, 0.0);
  p.upper.assign(p.n_vars, 0.0);
  p.is_integer.assign(p.n_vars, 0);

  const std::size_t d0 = p.delta_offset();
  p.a1.rows = 4 * np;
  p.a1.sense = RowSense::LessEqual;
  p.a1.rhs.assign(p.a1.rows, 0.0);

  for (std::size_t k = 0; k < np; ++k) {
    const std::size_t i = k % n;
    const std::size_t j = k / n;
    const double e = ev.e_bar[k];
    const double u = std::max(0.0, std::min(ev.a_bar[k], ev.l_bar[k]) - e);
    const std::size_t y1 = 2 * k, y2 = 2 * k + 1, d1 = d0 + 2 * k, d2 = d0 + 2 * k + 1;

    p.c[y1] = ev.a_bar[k] / e;
    p.is_integer[d1] = p.is_integer[d2] = 1;
    if (i != j) {
      p.upper[y1] = e;
      p.upper[y2] = u;
      p.upper[d1] = p.upper[d2] = 1.0;
    }

    const std::size_t r = 4 * k;
    push(p.a1, r, y1, 1.0);
    push(p.a1, r, d1, -e);
    push(p.a1, r + 1, y1, -1.0);
    push(p.a1, r + 1, d2, e);
    push(p.a1, r + 2, y2, 1.0);
    push(p.a1, r + 2, d2, -u);
    push(p.a1, r + 3, d1, -1.0);
    push(p.a1, r + 3, d2, 1.0);
  }

  p.a2.rows = p.a3.rows = p.a4.rows = n;
  p.a2.sense = p.a3.sense = RowSense::Equal;
  p.a4.sense = risk_sense;
  p.a2.rhs = agg.a;
  p.a3.rhs = agg.l;
  p.a4.rhs.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) p.a4.rhs[j] += system.liabilities(i, j) * system.kappa_of(i);
  }

  // A2/A4 rows are creditor columns; entries of a row are contiguous in vec(L).
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const std::size_t k = j * n + i;
      push(p.a2, j, 2 * k, 1.0);
      push(p.a2, j, 2 * k + 1, 1.0);
      push(p.a4, j, 2 * k, system.kappa_of(i));
      push(p.a4, j, 2 * k + 1, system.kappa_of(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t k = j * n + i;
      push(p.a3, i, 2 * k, 1.0);
      push(p.a3, i, 2 * k + 1, 1.0);
    }
  }
  return p;
}

MilpProblem presolve(MilpProblem p) {
  const std::size_t n = p.n_banks;
  const std::size_t d0 = p.delta_offset();
  std::size_t eliminated = 0;
  auto drop_integrality = [&](std::size_t col) {
    if (p.is_integer[col]) {
      p.is_integer[col] = 0;
      ++eliminated;
    }
  };
  for (std::size_t k = 0; k < p.n_pairs(); ++k) {
    if (k % n == k / n) continue;  // diagonal pairs are already fixed by bounds
    const std::size_t y1 = 2 * k, y2 = 2 * k + 1, d1 = d0 + 2 * k, d2 = d0 + 2 * k + 1;
    if (p.upper[y1] == 0.0 && p.upper[y2] == 0.0 && p.upper[d1] == 0.0) continue;

    // u = 0: the above-equity part cannot be used.
    if (p.upper[y2] == 0.0) {
      p.upper[d2] = 0.0;
      drop_integrality(d2);
    }
    // min(a_bar, l_bar) = 0: the creditor lends nothing or the debtor borrows nothing.
    const bool empty_entry = p.a2.rhs[k / n] == 0.0 || p.a3.rhs[k % n] == 0.0;
    if (empty_entry) {
      p.upper[y1] = p.upper[y2] = 0.0;
      p.upper[d1] = p.upper[d2] = 0.0;
      drop_integrality(d1);
      drop_integrality(d2);
      continue;
    }
    // With d2 fixed at zero, d1 only bounds y1 <= e d1 and d2 <= d1; any
    // fractional d1 >= y1/e rounds up feasibly, so it need not be integral.
    if (p.upper[d2] == 0.0) drop_integrality(d1);
  }
  p.presolve_eliminated += eliminated;
  return p;
}

double objective_value(const BankingSystem& system, const SquareMatrix& candidate) {
  const std::size_t n = system.size();
  if (candidate.size() != n) throw Error("objective_value: dimension mismatch");
  const auto agg = aggregates(system);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      total += std::min(candidate(i, j) / system.equity[j], 1.0) * agg.a[j];
    }
  }
  return total;
}

std::vector<double> split_network(const MilpProblem& problem, std::span<const double> e_bar,
                                  const SquareMatrix& l) {
  const std::size_t n = problem.n_banks;
  const auto x = vectorize(l);
  std::vector<double> z(problem.n_vars, 0.0);
  const std::size_t d0 = problem.delta_offset();
  for (std::size_t k = 0; k < n * n; ++k) {
    const double y1 = std::min(x[k], e_bar[k]);
    const double y2 = std::max(0.0, x[k] - y1);
    z[2 * k] = y1;
    z[2 * k + 1] = y2;
    z[d0 + 2 * k] = x[k] > 0.0 ? 1.0 : 0.0;
    z[d0 + 2 * k + 1] = y2 > 0.0 ? 1.0 : 0.0;
  }
  return z;
}

SquareMatrix extract_network(std::span<const double> z, std::size_t n) {
  SquareMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const std::size_t k = j * n + i;
      l(i, j) = z[2 * k] + z[2 * k + 1];
    }
  }
  return l;
}

double linear_objective(const MilpProblem& problem, std::span<const double> z) {
  double total = 0.0;
  for (std::size_t j = 0; j < problem.n_vars; ++j) total += problem.c[j] * z[j];
  return total;
}

namespace {

double block_violation(const ConstraintBlock& block, std::span<const double> z) {
  std::vector<double> activity(block.rows, 0.0);
  for (const auto& t : block.entries) activity[t.row] += t.value * z[t.col];
  double worst = 0.0;
  for (std::size_t r = 0; r < block.rows; ++r) {
    const double diff = activity[r] - block.rhs[r];
    switch (block.sense) {
      case RowSense::LessEqual: worst = std::max(worst, diff); break;
      case RowSense::GreaterEqual: worst = std::max(worst, -diff); break;
      case RowSense::Equal: worst = std::max(worst, std::abs(diff)); break;
    }
  }
  return worst;
}

}  // namespace

double max_violation(const MilpProblem& problem, std::span<const double> z) {
  double worst = 0.0;
  for (std::size_t j = 0; j < problem.n_vars; ++j) {
    worst = std::max({worst, problem.lower[j] - z[j], z[j] - problem.upper[j]});
    if (problem.is_integer[j]) worst = std::max(worst, std::abs(z[j] - std::round(z[j])));
  }
  for (const auto* block : {&problem.a1, &problem.a2, &problem.a3, &problem.a4})
    worst = std::max(worst, block_violation(*block, z));
  return worst;
}

std::string to_string(RowSense sense) {
  switch (sense) {
    case RowSense::LessEqual: return "leq";
    case RowSense::Equal: return "eq";
    case RowSense::GreaterEqual: return "geq";
  }
  return "?";
}

std::string to_string(Direction direction) {
  return direction == Direction::Minimize ? "min" : "max";
}

}  // namespace sysrisk
