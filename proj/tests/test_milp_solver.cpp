#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "sysrisk/metrics.hpp"
#include "sysrisk/milp_solver.hpp"
#include "sysrisk/simplex.hpp"

using namespace sysrisk;
using doctest::Approx;

namespace {

BankingSystem family(double t) {
  SquareMatrix l(3);
  l(0, 1) = t;
  l(0, 2) = 6 - t;
  l(1, 0) = 6 - t;
  l(1, 2) = t;
  l(2, 0) = t;
  l(2, 1) = 6 - t;
  return make_system({4, 4, 4}, l);
}

// The family's feasible set is the segment L(t), t in [0, 6]; sweep it directly.
std::pair<double, double> family_sweep() {
  double lo = 1e300, hi = -1e300;
  for (int step = 0; step <= 6000; ++step) {
    const double t = step / 1000.0;
    const double f = 18.0 * (std::min(t / 4.0, 1.0) + std::min((6.0 - t) / 4.0, 1.0));
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  return {lo, hi};
}

void check_feasible(const BankingSystem& s, const MilpSolution& sol, RowSense sense) {
  REQUIRE(sol.l_star.size() == s.size());
  const auto a = testsupport::col_sums(s.liabilities), l = testsupport::row_sums(s.liabilities);
  const auto a2 = testsupport::col_sums(sol.l_star), l2 = testsupport::row_sums(sol.l_star);
  double scale = 1.0;
  for (double x : a) scale = std::max(scale, x);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(a2[i] - a[i]) <= 1e-8 * scale);
    CHECK(std::abs(l2[i] - l[i]) <= 1e-8 * scale);
    CHECK(sol.l_star(i, i) == 0.0);
    double r = 0, r2 = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      r += s.liabilities(k, i) * s.kappa_of(k);
      r2 += sol.l_star(k, i) * s.kappa_of(k);
      CHECK(sol.l_star(k, i) >= -1e-12);
    }
    if (sense == RowSense::Equal) CHECK(std::abs(r2 - r) <= 1e-8 * std::max(1.0, r));
    else CHECK(r2 >= r - 1e-8 * std::max(1.0, r));
  }
}

}  // namespace

TEST_CASE("simplex solves a small bounded LP") {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6, 0 <= x, y <= 10  ->  x = 1.6, y = 1.2
  LinearProgram lp;
  lp.n_cols = 2;
  lp.n_rows = 2;
  lp.cost = {-1, -1};
  lp.lower = {0, 0};
  lp.upper = {10, 10};
  lp.entries = {{0, 0, 1}, {0, 1, 2}, {1, 0, 3}, {1, 1, 1}};
  lp.sense = {RowSense::LessEqual, RowSense::LessEqual};
  lp.rhs = {4, 6};
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == Approx(1.6));
  CHECK(sol.x[1] == Approx(1.2));
  CHECK(sol.objective == Approx(-2.8));
}

TEST_CASE("simplex reports infeasible and unbounded programs") {
  LinearProgram lp;
  lp.n_cols = 1;
  lp.n_rows = 1;
  lp.cost = {1};
  lp.lower = {0};
  lp.upper = {1};
  lp.entries = {{0, 0, 1}};
  lp.sense = {RowSense::GreaterEqual};
  lp.rhs = {2};
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
  lp.cost = {-1};
  lp.upper = {kInfinity};
  lp.rhs = {0};
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("simplex tolerates a redundant equality row") {
  // x + y = 2, 2x + 2y = 4, min x  ->  x = 0, y = 2
  LinearProgram lp;
  lp.n_cols = 2;
  lp.n_rows = 2;
  lp.cost = {1, 0};
  lp.lower = {0, 0};
  lp.upper = {kInfinity, kInfinity};
  lp.entries = {{0, 0, 1}, {0, 1, 1}, {1, 0, 2}, {1, 1, 2}};
  lp.sense = {RowSense::Equal, RowSense::Equal};
  lp.rhs = {2, 4};
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == Approx(0.0));
  CHECK(sol.x[1] == Approx(2.0));
}

TEST_CASE("relaxation of a two-bank system has a single point") {
  SquareMatrix l(2);
  l(0, 1) = 5;
  l(1, 0) = 3;
  const auto s = make_system({10, 10}, l);
  const auto lp = solve_lp(build_problem(s, Direction::Minimize));
  REQUIRE(lp.status == LpStatus::Optimal);
  CHECK(extract_network(lp.x, 2)(0, 1) == Approx(5));
  CHECK(extract_network(lp.x, 2)(1, 0) == Approx(3));
}

TEST_CASE("relaxation with unequal totals is infeasible") {
  auto p = build_problem(family(2), Direction::Minimize);
  p.a2.rhs[0] += 1.0;
  CHECK(solve_lp(p).status == LpStatus::Infeasible);
  CHECK(solve(p).status == SolveStatus::Infeasible);
}

TEST_CASE("LP-only instance: the optimum is the linear objective of any feasible network") {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 10; ++it) {
    const auto s = scale_equity(testsupport::random_system(rng, 5, 0.6, false), 1000.0);
    const auto p = presolve(build_problem(s, Direction::Minimize));
    REQUIRE(p.free_binaries() == 0);
    const auto lp = solve_lp(p);
    REQUIRE(lp.status == LpStatus::Optimal);
    // Below equity the objective is sum_ij L_ij a_j / e_j = sum_j a_j^2 / e_j whatever L is.
    const auto a = testsupport::col_sums(s.liabilities);
    double expected = 0;
    for (std::size_t j = 0; j < 5; ++j) expected += a[j] * a[j] / s.equity[j];
    CHECK(lp.objective == Approx(expected).epsilon(1e-9));
  }
}

// Objective: min(5/10, 1) a_1 + min(3/10, 1) a_0 = 0.5 * 5 + 0.3 * 3 = 3.4.
TEST_CASE("two-bank system keeps its unique network") {
  SquareMatrix l(2);
  l(0, 1) = 5;
  l(1, 0) = 3;
  const auto s = make_system({10, 10}, l);
  for (auto d : {Direction::Minimize, Direction::Maximize}) {
    const auto sol = optimize(s, d);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == Approx(3.4).epsilon(1e-12));
    CHECK(sol.l_star(0, 1) == Approx(5));
    CHECK(sol.l_star(1, 0) == Approx(3));
  }
  const auto o = brute_force_oracle(s);
  CHECK(o.min_objective == Approx(3.4));
  CHECK(o.max_objective == Approx(3.4));
}

TEST_CASE("three-bank family: closed form, sweep, oracle and solver agree") {
  const auto [sweep_lo, sweep_hi] = family_sweep();
  CHECK(sweep_lo == Approx(18.0).epsilon(1e-12));
  CHECK(sweep_hi == Approx(27.0).epsilon(1e-12));
  for (double t : {0.0, 1.0, 3.0, 5.5}) {
    const auto s = family(t);
    const auto lo = optimize(s, Direction::Minimize);
    const auto hi = optimize(s, Direction::Maximize);
    CHECK(std::abs(lo.objective - 18.0) <= 1e-8);
    CHECK(std::abs(hi.objective - 27.0) <= 1e-8);
    CHECK(link_count(lo.l_star) == 3);
    CHECK(link_density(lo.l_star) == 0.5);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (lo.l_star(i, j) > 1e-9) CHECK(lo.l_star(i, j) == Approx(6.0));
    const auto o = brute_force_oracle(s);
    CHECK(o.min_objective == Approx(18.0).epsilon(1e-12));
    CHECK(o.max_objective == Approx(27.0).epsilon(1e-12));
  }
}

TEST_CASE("a binding risk row shrinks the family's feasible set") {
  // With kappa = (1, 2, 3) the risk rows pin t, because each column mixes two debtors.
  auto s = family(1.0);
  s.kappa = {1, 2, 3};
  const auto o = brute_force_oracle(s);
  CHECK(o.min_objective >= 18.0 - 1e-9);
  CHECK(o.min_objective == Approx(o.max_objective));
  CHECK(o.min_objective == Approx(objective_value(s, s.liabilities)));
  // Under fixed row and column sums the ">=" rows pin the same point.
  const auto og = brute_force_oracle(s, RowSense::GreaterEqual);
  CHECK(og.min_objective == Approx(o.min_objective));
  CHECK(og.max_objective == Approx(o.max_objective));
}

TEST_CASE("property: solver matches the oracle on small systems") {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 30; ++it) {
    const auto s = testsupport::random_system(rng, 3 + it % 2, 0.7, it % 3 == 0);
    const auto sense = it % 2 == 0 ? RowSense::Equal : RowSense::GreaterEqual;
    const auto o = brute_force_oracle(s, sense);
    const auto lo = optimize(s, Direction::Minimize, sense);
    const auto hi = optimize(s, Direction::Maximize, sense);
    CHECK(testsupport::close_rel(lo.objective, o.min_objective, 1e-6));
    CHECK(testsupport::close_rel(hi.objective, o.max_objective, 1e-6));
    check_feasible(s, lo, sense);
    check_feasible(s, hi, sense);
  }
}

TEST_CASE("property: direction sandwich and objective consistency") {
  std::mt19937_64 rng(43);
  for (int it = 0; it < 30; ++it) {
    const auto s = testsupport::random_system(rng, 3 + it % 4, 0.5, it % 2 == 1);
    const double emp = objective_value(s, s.liabilities);
    const auto lo = optimize(s, Direction::Minimize);
    const auto hi = optimize(s, Direction::Maximize);
    CHECK(lo.objective <= emp + 1e-9 * std::max(1.0, emp));
    CHECK(emp <= hi.objective + 1e-9 * std::max(1.0, emp));
    CHECK(testsupport::close_rel(lo.objective, objective_value(s, lo.l_star), 1e-9));
    CHECK(testsupport::close_rel(hi.objective, objective_value(s, hi.l_star), 1e-9));
    CHECK(lo.best_bound <= lo.objective + 1e-9 * std::max(1.0, lo.objective));
    CHECK(lo.gap <= 1e-6 + 1e-12);
  }
}

TEST_CASE("property: equal and at-least risk rows give the same optimum") {
  std::mt19937_64 rng(44);
  for (int it = 0; it < 20; ++it) {
    const auto s = testsupport::random_system(rng, 3 + it % 2, 0.7, true);
    for (auto d : {Direction::Minimize, Direction::Maximize}) {
      const auto eq = optimize(s, d, RowSense::Equal);
      const auto ge = optimize(s, d, RowSense::GreaterEqual);
      CHECK(testsupport::close_rel(eq.objective, ge.objective, 1e-6));
    }
  }
}

TEST_CASE("repeated solves are bit-identical") {
  std::mt19937_64 rng(45);
  const auto s = testsupport::random_system(rng, 6, 0.5, true);
  const auto a = optimize(s, Direction::Minimize);
  const auto b = optimize(s, Direction::Minimize);
  CHECK(a.objective == b.objective);
  CHECK(a.l_star == b.l_star);
  CHECK(a.z == b.z);
  CHECK(a.node_count == b.node_count);
}

TEST_CASE("node limit returns the incumbent with a gap") {
  std::mt19937_64 rng(46);
  const auto s = testsupport::random_system(rng, 8, 0.6, false);
  SolveOptions opt;
  opt.node_limit = 1;
  const auto sol = optimize(s, Direction::Minimize, RowSense::Equal, opt);
  CHECK((sol.status == SolveStatus::LimitHit || sol.status == SolveStatus::Optimal ||
         sol.status == SolveStatus::GapReached));
  CHECK(sol.objective <= objective_value(s, s.liabilities) + 1e-9);
  check_feasible(s, sol, RowSense::Equal);
  CHECK(sol.best_bound <= sol.objective + 1e-9);
}

TEST_CASE("an empty market is a no-op") {
  const auto s = make_system({1, 2, 3}, SquareMatrix(3));
  const auto sol = optimize(s, Direction::Minimize);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == 0.0);
  CHECK(sol.l_star == SquareMatrix(3));
}

TEST_CASE("extract_network sums pairs and keeps a zero diagonal") {
  const auto s = family(3);
  const auto sol = optimize(s, Direction::Minimize);
  const auto x = vectorize(sol.l_star);
  for (std::size_t k = 0; k < 9; ++k) {
    if (k % 3 == k / 3) CHECK(x[k] == 0.0);
    else CHECK(x[k] == sol.z[2 * k] + sol.z[2 * k + 1]);
  }
}

TEST_CASE("oracle refuses large systems") {
  std::mt19937_64 rng(47);
  CHECK_THROWS_AS(brute_force_oracle(testsupport::random_system(rng, 5, 0.5, false)), Error);
}
