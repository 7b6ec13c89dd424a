#include "sysrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sysrisk {

void check_params(const SynthParams& p) {
  if (p.n < 2) throw Error("synthetic systems need at least two banks");
  if (!(p.target_density > 0.0 && p.target_density <= 1.0)) throw Error("target density must lie in (0, 1]");
  if (p.weights == WeightDistribution::LogNormal && !(p.weight_sigma >= 0.0 && std::isfinite(p.weight_mu)))
    throw Error("invalid log-normal weight parameters");
  if (p.weights == WeightDistribution::Uniform && !(p.weight_lo > 0.0 && p.weight_hi >= p.weight_lo))
    throw Error("uniform weights need 0 < lo <= hi");
  if (p.equity == EquityRule::AssetFraction && !(p.equity_fraction > 0.0))
    throw Error("equity fraction must be positive");
  if (p.equity == EquityRule::LogNormal && !(p.equity_sigma >= 0.0 && std::isfinite(p.equity_mu)))
    throw Error("invalid log-normal equity parameters");
  if (p.kappa == KappaRule::Constant && !(p.kappa_value > 0.0)) throw Error("kappa must be positive");
  if (p.kappa == KappaRule::Leverage && !(p.leverage_lo >= 1.0 && p.leverage_hi >= p.leverage_lo))
    throw Error("leverage range must satisfy 1 <= lo <= hi");
}

BankingSystem generate(const SynthParams& p) {
  check_params(p);
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> lognormal_weight(p.weight_mu, p.weight_sigma);
  std::uniform_real_distribution<double> uniform_weight(p.weight_lo, p.weight_hi);

  const std::size_t n = p.n;
  SquareMatrix l(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (p.target_density < 1.0 && unit(rng) >= p.target_density) continue;
      double w = p.weights == WeightDistribution::LogNormal ? lognormal_weight(rng) : uniform_weight(rng);
      // A zero draw would silently drop the link.
      l(i, j) = std::max(w, std::numeric_limits<double>::min());
    }
  }

  std::vector<double> a(n, 0.0), row(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a[j] += l(i, j);
      row[i] += l(i, j);
    }

  std::vector<double> equity(n);
  std::lognormal_distribution<double> lognormal_equity(p.equity_mu, p.equity_sigma);
  for (std::size_t i = 0; i < n; ++i) {
    equity[i] = p.equity == EquityRule::AssetFraction ? p.equity_fraction * (a[i] + 1.0)
                                                      : std::max(lognormal_equity(rng), 1e-12);
  }

  BankingSystem system = make_system(equity, std::move(l));
  if (p.kappa == KappaRule::Constant) {
    if (p.kappa_value != 1.0) system.kappa.assign(n, p.kappa_value);
  } else {
    std::uniform_real_distribution<double> leverage(p.leverage_lo, p.leverage_hi);
    std::vector<double> ta(n), tl(n);
    system.balance_sheets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      // The balance sheet must hold the interbank positions.
      ta[i] = std::max({leverage(rng) * equity[i], a[i] + equity[i], row[i] + equity[i]});
      tl[i] = ta[i] - equity[i];
      system.balance_sheets[i] = BalanceSheet{ta[i], tl[i]};
    }
    system.kappa = leverage_kappa(ta, tl);
  }
  require_valid(system);
  return system;
}

std::string to_string(WeightDistribution d) { return d == WeightDistribution::LogNormal ? "lognormal" : "uniform"; }
std::string to_string(EquityRule r) { return r == EquityRule::AssetFraction ? "asset_fraction" : "lognormal"; }
std::string to_string(KappaRule r) { return r == KappaRule::Constant ? "constant" : "leverage"; }

}  // namespace sysrisk
