#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sysrisk/network.hpp"

namespace sysrisk {

enum class WeightDistribution { LogNormal, Uniform };
enum class EquityRule { AssetFraction, LogNormal };
enum class KappaRule { Constant, Leverage };

struct SynthParams {
  std::size_t n = 10;
  double target_density = 0.5;

  WeightDistribution weights = WeightDistribution::LogNormal;
  double weight_mu = 0.0;  // log-normal location
  double weight_sigma = 1.0;  // log-normal scale
  double weight_lo = 0.0;
  double weight_hi = 1.0;

  EquityRule equity = EquityRule::AssetFraction;
  double equity_fraction = 0.25;  // e_i = fraction * (a_i + 1)
  double equity_mu = 0.0;
  double equity_sigma = 1.0;

  KappaRule kappa = KappaRule::Constant;
  double kappa_value = 1.0;
  double leverage_lo = 5.0;  // total assets / equity drawn uniformly in [lo, hi]
  double leverage_hi = 20.0;

  std::uint64_t seed = 1;
};

/// Throws Error when a parameter is out of range.
void check_params(const SynthParams& params);

/// Erdos-Renyi directed skeleton with random weights; deterministic per seed.
BankingSystem generate(const SynthParams& params);

std::string to_string(WeightDistribution d);
std::string to_string(EquityRule r);
std::string to_string(KappaRule r);

}  // namespace sysrisk
