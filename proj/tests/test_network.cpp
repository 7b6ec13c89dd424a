#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "sysrisk/network.hpp"

using namespace sysrisk;

namespace {

bool mentions(const ValidationReport& r, const std::string& text) {
  for (const auto& v : r.violations)
    if (v.message == text) return true;
  return false;
}

SquareMatrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
  SquareMatrix m(rows.size());
  std::size_t i = 0;
  for (auto row : rows) {
    std::size_t j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("validate flags a nonzero diagonal") {
  auto s = make_system({1.0, 1.0}, matrix({{1, 0}, {0, 0}}));
  CHECK(mentions(validate(s), "nonzero diagonal at 0"));
}

TEST_CASE("validate accepts an empty market") {
  auto s = make_system({1, 1, 1}, SquareMatrix(3));
  CHECK(validate(s).ok());
}

TEST_CASE("validate flags non-positive equity") {
  auto s = make_system({0.0, 1.0}, SquareMatrix(2));
  CHECK(mentions(validate(s), "non-positive equity at 0"));
}

TEST_CASE("validate flags negative and non-finite entries") {
  auto l = matrix({{0, -1}, {std::nan(""), 0}});
  auto s = make_system({1.0, 1.0}, l);
  const auto r = validate(s);
  CHECK(mentions(r, "negative liability at 0,1"));
  CHECK(mentions(r, "non-finite liability at 1,0"));
  CHECK_THROWS_AS(require_valid(s), ValidationError);
}

TEST_CASE("aggregates of a single link") {
  auto g = aggregates(make_system({10, 10}, matrix({{0, 5}, {0, 0}})));
  CHECK(g.l == std::vector<double>{5, 0});
  CHECK(g.a == std::vector<double>{0, 5});
  CHECK(g.total_volume == 5.0);
  CHECK(g.v == std::vector<double>{0, 1});
}

TEST_CASE("aggregates of an empty market give zero weights") {
  auto g = aggregates(make_system({1, 1, 1}, SquareMatrix(3)));
  CHECK(g.total_volume == 0.0);
  CHECK(g.v == std::vector<double>{0, 0, 0});
}

TEST_CASE("aggregates of a chain") {
  auto g = aggregates(make_system({1, 1, 1}, matrix({{0, 5, 0}, {0, 0, 5}, {0, 0, 0}})));
  CHECK(g.a == std::vector<double>{0, 5, 5});
  CHECK(g.total_volume == 10.0);
  CHECK(g.v == std::vector<double>{0, 0.5, 0.5});
}

TEST_CASE("impact matrix caps at one") {
  auto w = impact_matrix(make_system({10, 10}, matrix({{0, 5}, {0, 0}})));
  CHECK(w(0, 1) == 0.5);
  auto capped = impact_matrix(make_system({10, 10}, matrix({{0, 20}, {0, 0}})));
  CHECK(capped(0, 1) == 1.0);
  auto zero = impact_matrix(make_system({1, 1}, SquareMatrix(2)));
  CHECK(zero == SquareMatrix(2));
}

TEST_CASE("leverage ratio") {
  std::vector<double> ta{100, 100}, tl{90, 0};
  CHECK(leverage_kappa(ta, tl) == std::vector<double>{10, 1});
  std::vector<double> bad_ta{100}, bad_tl{100};
  CHECK_THROWS_WITH_AS(leverage_kappa(bad_ta, bad_tl), "insolvent balance sheet at 0", ValidationError);
}

TEST_CASE("property: totals balance and weights sum to one") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    auto s = testsupport::random_system(rng, 2 + it % 9, 0.6, false);
    const auto g = aggregates(s);
    double sl = 0, sa = 0, sv = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      sl += g.l[i];
      sa += g.a[i];
      sv += g.v[i];
    }
    CHECK(std::abs(sl - sa) / std::max(1.0, g.total_volume) < 1e-12);
    if (g.total_volume > 0) CHECK(std::abs(sv - 1.0) < 1e-12);
    for (double v : g.v) CHECK((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("property: impact matrix is monotone in equity") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 100; ++it) {
    auto s = testsupport::random_system(rng, 6, 0.5, false);
    const auto w = impact_matrix(s);
    const auto w2 = impact_matrix(scale_equity(s, 1.7));
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(w2(i, j) <= w(i, j));
        CHECK((w(i, j) >= 0.0 && w(i, j) <= 1.0));
      }
  }
}
