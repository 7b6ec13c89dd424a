#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sysrisk/milp_solver.hpp"

namespace sysrisk {

namespace {

using Dense = std::vector<std::vector<double>>;

// Row-reduces [m | b] in place and keeps only independent rows.
void keep_independent_rows(Dense& m, std::vector<double>& b, double tol) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    for (std::size_t r = rank; r < rows; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (std::abs(m[piv][c]) <= tol) continue;
    std::swap(m[piv], m[rank]);
    std::swap(b[piv], b[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m[r][c] == 0.0) continue;
      const double f = m[r][c] / m[rank][c];
      for (std::size_t cc = 0; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
      b[r] -= f * b[rank];
    }
    ++rank;
  }
  for (std::size_t r = rank; r < rows; ++r) {
    if (std::abs(b[r]) > 1e-7 * (1.0 + std::abs(b[r]))) throw Error("oracle: inconsistent constraint system");
  }
  m.resize(rank);
  b.resize(rank);
}

// Solves a square system by Gaussian elimination; false when singular.
bool solve_square(Dense a, std::vector<double>& x, double tol) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) <= tol) return false;
    std::swap(a[piv], a[c]);
    std::swap(x[piv], x[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t cc = c; cc < n; ++cc) a[r][cc] -= f * a[c][cc];
      x[r] -= f * x[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double v = x[c];
    for (std::size_t cc = c + 1; cc < n; ++cc) v -= a[c][cc] * x[cc];
    x[c] = v / a[c][c];
  }
  return true;
}

}  // namespace

OracleResult brute_force_oracle(const BankingSystem& system, RowSense risk_sense) {
  require_valid(system);
  const std::size_t n = system.size();
  if (n > 4) throw Error("brute-force oracle is limited to four banks");
  const auto agg = aggregates(system);

  struct Var {
    std::size_t i = 0, j = 0;
    bool slack = false;
  };
  std::vector<Var> vars;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) vars.push_back({i, j, false});
  if (risk_sense == RowSense::GreaterEqual)
    for (std::size_t j = 0; j < n; ++j) vars.push_back({0, j, true});
  if (risk_sense == RowSense::LessEqual) throw Error("oracle supports eq and geq risk rows only");
  const std::size_t nv = vars.size();

  std::vector<double> risk(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) risk[j] += system.liabilities(i, j) * system.kappa_of(i);

  Dense m(3 * n, std::vector<double>(nv, 0.0));
  std::vector<double> b(3 * n, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    const Var& q = vars[v];
    if (q.slack) {
      m[2 * n + q.j][v] = -1.0;
      continue;
    }
    m[q.j][v] = 1.0;                              // creditor column sum
    m[n + q.i][v] = 1.0;                          // debtor row sum
    m[2 * n + q.j][v] = system.kappa_of(q.i);     // risk-weighted column sum
  }
  for (std::size_t j = 0; j < n; ++j) {
    b[j] = agg.a[j];
    b[n + j] = agg.l[j];
    b[2 * n + j] = risk[j];
  }
  const double scale = std::max(1.0, agg.total_volume);
  keep_independent_rows(m, b, 1e-10);
  const std::size_t r = m.size();

  OracleResult out;
  out.min_objective = std::numeric_limits<double>::infinity();
  out.max_objective = -std::numeric_limits<double>::infinity();

  auto evaluate = [&](const std::vector<double>& x) {
    double total = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (vars[v].slack) continue;
      const std::size_t j = vars[v].j;
      total += std::min(std::max(x[v], 0.0) / system.equity[j], 1.0) * agg.a[j];
    }
    out.min_objective = std::min(out.min_objective, total);
    out.max_objective = std::max(out.max_objective, total);
    ++out.points_examined;
  };

  std::vector<char> chosen(nv, 0);
  std::fill(chosen.begin(), chosen.begin() + static_cast<long>(r), 1);
  std::vector<std::size_t> basic, nonbasic;
  do {
    basic.clear();
    nonbasic.clear();
    for (std::size_t v = 0; v < nv; ++v) (chosen[v] ? basic : nonbasic).push_back(v);
    Dense sub(r, std::vector<double>(r, 0.0));
    for (std::size_t row = 0; row < r; ++row)
      for (std::size_t c = 0; c < r; ++c) sub[row][c] = m[row][basic[c]];

    std::vector<std::size_t> choices;
    for (std::size_t v : nonbasic) choices.push_back(vars[v].slack ? 1 : 2);
    std::vector<std::size_t> digit(nonbasic.size(), 0);
    bool singular = false;
    while (!singular) {
      std::vector<double> x(nv, 0.0);
      for (std::size_t t = 0; t < nonbasic.size(); ++t) {
        const Var& q = vars[nonbasic[t]];
        x[nonbasic[t]] = digit[t] == 0 ? 0.0 : system.equity[q.j];
      }
      std::vector<double> rhs(r);
      for (std::size_t row = 0; row < r; ++row) {
        double v = b[row];
        for (std::size_t t : nonbasic) v -= m[row][t] * x[t];
        rhs[row] = v;
      }
      if (!solve_square(sub, rhs, 1e-10)) {
        singular = true;
        break;
      }
      bool feasible = true;
      for (std::size_t c = 0; c < r; ++c) {
        if (rhs[c] < -1e-9 * scale) feasible = false;
        x[basic[c]] = rhs[c];
      }
      if (feasible) evaluate(x);
      std::size_t t = 0;
      while (t < digit.size() && ++digit[t] == choices[t]) digit[t++] = 0;
      if (t == digit.size()) break;
    }
  } while (std::prev_permutation(chosen.begin(), chosen.end()));

  if (out.points_examined == 0) throw Error("oracle found no feasible network");
  return out;
}

}  // namespace sysrisk
