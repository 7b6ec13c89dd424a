#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sysrisk/metrics.hpp"
#include "sysrisk/synth.hpp"

using namespace sysrisk;
using doctest::Approx;

TEST_CASE("full density gives a complete digraph") {
  SynthParams p;
  p.n = 10;
  p.target_density = 1.0;
  CHECK(link_count(generate(p).liabilities) == 90);
}

TEST_CASE("the same seed reproduces the system") {
  SynthParams p;
  p.seed = 99;
  CHECK(generate(p) == generate(p));
  SynthParams q = p;
  q.seed = 100;
  CHECK_FALSE(generate(p) == generate(q));
}

TEST_CASE("density concentrates around the target") {
  SynthParams p;
  p.n = 20;
  p.target_density = 0.5;
  double sum = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    p.seed = s;
    sum += link_density(generate(p).liabilities);
  }
  CHECK(std::abs(sum / 1000 - 0.5) < 0.03);
}

TEST_CASE("every rule combination yields valid systems") {
  for (auto w : {WeightDistribution::LogNormal, WeightDistribution::Uniform})
    for (auto e : {EquityRule::AssetFraction, EquityRule::LogNormal})
      for (auto k : {KappaRule::Constant, KappaRule::Leverage})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
          SynthParams p;
          p.n = 8;
          p.weights = w;
          p.weight_lo = 0.5;
          p.weight_hi = 2.0;
          p.equity = e;
          p.kappa = k;
          p.seed = seed;
          const auto s = generate(p);
          CHECK(validate(s).ok());
          CHECK(s.size() == 8);
          if (k == KappaRule::Leverage) {
            REQUIRE(s.kappa.size() == 8);
            for (std::size_t i = 0; i < 8; ++i) {
              CHECK(s.kappa[i] >= 1.0);
              REQUIRE(s.balance_sheets[i].has_value());
              CHECK(s.balance_sheets[i]->total_assets > s.balance_sheets[i]->total_liabilities);
            }
          }
        }
}

TEST_CASE("default equity is a quarter of interbank assets plus one") {
  SynthParams p;
  p.seed = 3;
  const auto s = generate(p);
  const auto g = aggregates(s);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.equity[i] == Approx(0.25 * (g.a[i] + 1.0)));
}

TEST_CASE("uniform weights respect their range") {
  SynthParams p;
  p.weights = WeightDistribution::Uniform;
  p.weight_lo = 2.0;
  p.weight_hi = 3.0;
  p.target_density = 1.0;
  const auto s = generate(p);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (i != j) CHECK((s.liabilities(i, j) >= 2.0 && s.liabilities(i, j) <= 3.0));
}

TEST_CASE("bad parameters are rejected") {
  SynthParams p;
  p.target_density = 0.0;
  CHECK_THROWS_AS(check_params(p), Error);
  p = {};
  p.n = 0;
  CHECK_THROWS_AS(generate(p), Error);
  p = {};
  p.weights = WeightDistribution::Uniform;
  p.weight_lo = 2.0;
  p.weight_hi = 1.0;
  CHECK_THROWS_AS(check_params(p), Error);
}
