#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "sysrisk/milp_model.hpp"
#include "sysrisk/milp_solver.hpp"

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

}  // namespace

TEST_CASE("vectorize stacks columns") {
  SquareMatrix l(2);
  l(0, 1) = 2;
  l(1, 0) = 3;
  CHECK(vectorize(l) == std::vector<double>{0, 3, 2, 0});
  CHECK(vectorize(SquareMatrix(3)) == std::vector<double>(9, 0.0));
}

TEST_CASE("property: devectorize inverts vectorize") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 100; ++it) {
    const auto l = testsupport::random_matrix(rng, 1 + it % 7, 0.5);
    const auto x = vectorize(l);
    CHECK(devectorize(x, l.size()) == l);
  }
}

TEST_CASE("expanded vectors follow column-major order") {
  SquareMatrix l(2);
  l(0, 1) = 5;
  const auto ev = expand_vectors(make_system({10, 20}, l));
  CHECK(ev.e_bar == std::vector<double>{10, 10, 20, 20});
  CHECK(ev.a_bar == std::vector<double>{0, 0, 5, 5});
  CHECK(ev.l_bar == std::vector<double>{5, 0, 5, 0});
}

TEST_CASE("problem dimensions for three banks") {
  const auto p = build_problem(family(3), Direction::Minimize);
  CHECK(p.n_vars == 36);
  CHECK(p.c.size() == 36);
  CHECK(p.a1.rows == 36);
  CHECK(p.a2.rows == 3);
  CHECK(p.a3.rows == 3);
  CHECK(p.a4.rows == 3);
  CHECK(p.a1.sense == RowSense::LessEqual);
  CHECK(p.a2.sense == RowSense::Equal);
  CHECK(p.a3.sense == RowSense::Equal);
}

TEST_CASE("slope vector alternates and binaries cost nothing") {
  std::mt19937_64 rng(32);
  const auto s = testsupport::random_system(rng, 5, 0.6, true);
  const auto p = build_problem(s, Direction::Maximize);
  const auto ev = expand_vectors(s);
  for (std::size_t k = 0; k < p.n_pairs(); ++k) {
    CHECK(p.c[2 * k] == ev.a_bar[k] / ev.e_bar[k]);
    CHECK(p.c[2 * k + 1] == 0.0);
  }
  for (std::size_t v = p.delta_offset(); v < p.n_vars; ++v) CHECK(p.c[v] == 0.0);
}

TEST_CASE("bounds: diagonal fixed, equity and overflow caps elsewhere") {
  std::mt19937_64 rng(33);
  const auto s = testsupport::random_system(rng, 5, 0.6, false);
  const auto p = build_problem(s, Direction::Minimize);
  const auto ev = expand_vectors(s);
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < p.n_pairs(); ++k) {
    if (k % n == k / n) {
      CHECK(p.upper[2 * k] == 0.0);
      CHECK(p.upper[2 * k + 1] == 0.0);
      continue;
    }
    CHECK(p.upper[2 * k] == ev.e_bar[k]);
    CHECK(p.upper[2 * k + 1] == std::max(0.0, std::min(ev.a_bar[k], ev.l_bar[k]) - ev.e_bar[k]));
  }
}

TEST_CASE("risk rows equal column-sum rows for unit kappa") {
  std::mt19937_64 rng(34);
  const auto s = testsupport::random_system(rng, 6, 0.5, false);
  const auto p = build_problem(s, Direction::Minimize);
  CHECK(p.a4.entries == p.a2.entries);
  for (std::size_t j = 0; j < s.size(); ++j) CHECK(p.a4.rhs[j] == Approx(p.a2.rhs[j]).epsilon(1e-14));
}

TEST_CASE("risk rows carry kappa weights and r = L^T kappa") {
  std::mt19937_64 rng(35);
  const auto s = testsupport::random_system(rng, 4, 0.7, true);
  const auto p = build_problem(s, Direction::Minimize, RowSense::GreaterEqual);
  CHECK(p.a4.sense == RowSense::GreaterEqual);
  for (std::size_t j = 0; j < 4; ++j) {
    double r = 0;
    for (std::size_t i = 0; i < 4; ++i) r += s.liabilities(i, j) * s.kappa[i];
    CHECK(p.a4.rhs[j] == Approx(r));
  }
  for (const auto& t : p.a4.entries) {
    const std::size_t k = t.col / 2;
    CHECK(t.value == s.kappa[k % 4]);
  }
}

TEST_CASE("property: the empirical split is feasible and reproduces the objective") {
  std::mt19937_64 rng(36);
  for (int it = 0; it < 100; ++it) {
    const auto s = testsupport::random_system(rng, 3 + it % 6, 0.5, it % 2 == 0);
    const auto p = build_problem(s, Direction::Minimize);
    const auto z = split_network(p, expand_vectors(s).e_bar, s.liabilities);
    CHECK(max_violation(p, z) <= 1e-9 * std::max(1.0, aggregates(s).total_volume));
    const double ref = testsupport::capped_objective(s.equity, testsupport::col_sums(s.liabilities), s.liabilities);
    CHECK(linear_objective(p, z) == Approx(ref).epsilon(1e-12));
    CHECK(objective_value(s, s.liabilities) == Approx(ref).epsilon(1e-12));
    const auto back = extract_network(z, s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        CHECK(back(i, j) == Approx(s.liabilities(i, j)).epsilon(1e-15));
  }
}

TEST_CASE("objective value examples") {
  SquareMatrix l(2);
  l(0, 1) = 5;
  CHECK(objective_value(make_system({10, 10}, l), l) == Approx(2.5));
  SquareMatrix ring(3);
  ring(0, 1) = ring(1, 2) = ring(2, 0) = 6;
  CHECK(objective_value(make_system({4, 4, 4}, ring), ring) == Approx(18));
  CHECK(objective_value(make_system({1, 1}, SquareMatrix(2)), SquareMatrix(2)) == 0.0);
}

TEST_CASE("presolve removes binaries of entries that cannot carry weight") {
  SquareMatrix l(3);
  l(0, 1) = 5;  // bank 2 lends nothing, bank 1 borrows nothing
  const auto s = make_system({10, 10, 10}, l);
  const auto p = presolve(build_problem(s, Direction::Minimize));
  const std::size_t n = 3;
  for (std::size_t k = 0; k < p.n_pairs(); ++k) {
    const std::size_t i = k % n, j = k / n;
    if (j == 2 || i == 1 || i == j) {
      CHECK(p.upper[2 * k] == 0.0);
      CHECK(p.upper[2 * k + 1] == 0.0);
      CHECK(p.upper[p.delta_offset() + 2 * k] == 0.0);
      CHECK(p.upper[p.delta_offset() + 2 * k + 1] == 0.0);
    }
  }
  CHECK(p.free_binaries() == 0);
  CHECK(p.presolve_eliminated + p.free_binaries() == 2 * p.n_pairs() - 2 * n);
}

TEST_CASE("presolve fixes the overflow part where no entry can exceed equity") {
  std::mt19937_64 rng(37);
  for (int it = 0; it < 20; ++it) {
    auto s = testsupport::random_system(rng, 5, 0.6, false);
    s = scale_equity(s, 100.0);
    const auto p = presolve(build_problem(s, Direction::Minimize));
    CHECK(p.free_binaries() == 0);
    for (std::size_t k = 0; k < p.n_pairs(); ++k) CHECK(p.upper[2 * k + 1] == 0.0);
    // The program is then an LP; its optimum is the MILP optimum.
    const auto lp = solve(p);
    const auto full = solve(build_problem(s, Direction::Minimize));
    CHECK(lp.objective == Approx(full.objective).epsilon(1e-9));
  }
}

TEST_CASE("presolve leaves the feasible set alone when every entry can overflow") {
  const auto s = family(3);
  const auto p = build_problem(s, Direction::Minimize);
  const auto q = presolve(p);
  CHECK(q.upper == p.upper);
  CHECK(q.free_binaries() == p.free_binaries());
}

TEST_CASE("property: presolve keeps the empirical split feasible") {
  std::mt19937_64 rng(38);
  for (int it = 0; it < 100; ++it) {
    const auto s = testsupport::random_system(rng, 3 + it % 5, 0.4, true);
    const auto p = presolve(build_problem(s, Direction::Minimize));
    const auto z = split_network(p, expand_vectors(s).e_bar, s.liabilities);
    CHECK(max_violation(p, z) <= 1e-9 * std::max(1.0, aggregates(s).total_volume));
  }
}

TEST_CASE("max_violation sees broken rows") {
  const auto s = family(3);
  const auto p = build_problem(s, Direction::Minimize);
  auto z = split_network(p, expand_vectors(s).e_bar, s.liabilities);
  CHECK(max_violation(p, z) <= 1e-12);
  z[2 * 3] += 1.0;  // L(0, 1) grows by one: its column and row sums break
  CHECK(max_violation(p, z) >= 1.0 - 1e-12);
}
