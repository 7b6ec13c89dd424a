#include "sysrisk/contagion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sysrisk {

DebtRankState debtrank_run(const SquareMatrix& impact, std::size_t seed) {
  const std::size_t n = impact.size();
  if (seed >= n) throw Error("seed out of range");

  DebtRankState st;
  st.h.assign(n, 0.0);
  st.s.assign(n, NodeState::Undistressed);
  st.h[seed] = 1.0;
  st.s[seed] = NodeState::Distressed;
  st.iterations = 1;

  std::vector<double> h_next(n);
  std::vector<NodeState> s_next(n);
  auto any_distressed = [&] {
    return std::any_of(st.s.begin(), st.s.end(), [](NodeState s) { return s == NodeState::Distressed; });
  };
  while (any_distressed()) {
    // h first, simultaneously for all i, from the previous step's distressed set.
    for (std::size_t i = 0; i < n; ++i) {
      double acc = st.h[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (st.s[j] == NodeState::Distressed) acc += impact(j, i) * st.h[j];
      }
      h_next[i] = std::min(1.0, acc);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (st.s[i] == NodeState::Distressed) {
        s_next[i] = NodeState::Inactive;
      } else if (h_next[i] > 0.0 && st.s[i] != NodeState::Inactive) {
        s_next[i] = NodeState::Distressed;
      } else {
        s_next[i] = st.s[i];
      }
    }
    st.h.swap(h_next);
    st.s.swap(s_next);
    ++st.iterations;
  }
  return st;
}

double debtrank_single(const BankingSystem& system, const SquareMatrix& impact,
                       std::span<const double> v, std::size_t seed) {
  (void)system;
  const auto st = debtrank_run(impact, seed);
  double r = 0.0;
  for (std::size_t j = 0; j < st.h.size(); ++j) {
    if (j != seed) r += st.h[j] * v[j];
  }
  return r;
}

std::vector<double> debtrank_all(const BankingSystem& system) {
  const auto agg = aggregates(system);
  const auto w = impact_matrix(system);
  std::vector<double> out(system.size(), 0.0);
  if (agg.total_volume <= 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = debtrank_single(system, w, agg.v, i);
  return out;
}

DebtRank2Result debtrank2_single(const BankingSystem& system, const SquareMatrix& impact,
                                 std::span<const double> v, std::size_t seed,
                                 const DebtRank2Options& options) {
  (void)system;
  const std::size_t n = impact.size();
  if (seed >= n) throw Error("seed out of range");
  if (!(options.epsilon > 0.0)) throw Error("DebtRank2 epsilon must be positive");

  std::vector<double> prev(n, 0.0);
  std::vector<double> cur(n, 0.0);
  std::vector<double> next(n);
  cur[seed] = 1.0;

  DebtRank2Result result;
  result.converged = false;
  for (int it = 0; it < options.iteration_cap; ++it) {
    double max_increment = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = cur[i];
      for (std::size_t j = 0; j < n; ++j) {
        const double dh = cur[j] - prev[j];
        if (dh != 0.0) acc += impact(j, i) * dh;
      }
      next[i] = std::min(1.0, acc);
      max_increment = std::max(max_increment, next[i] - cur[i]);
    }
    prev.swap(cur);
    cur.swap(next);
    result.iterations = it + 1;
    if (max_increment < options.epsilon) {
      result.converged = true;
      break;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j != seed) result.value += cur[j] * v[j];
  }
  return result;
}

std::vector<DebtRank2Result> debtrank2_all(const BankingSystem& system,
                                           const DebtRank2Options& options) {
  const auto agg = aggregates(system);
  const auto w = impact_matrix(system);
  std::vector<DebtRank2Result> out(system.size());
  if (agg.total_volume <= 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = debtrank2_single(system, w, agg.v, i, options);
  return out;
}

std::vector<double> direct_impact(const BankingSystem& system) {
  const std::size_t n = system.size();
  const auto agg = aggregates(system);
  std::vector<double> out(n, 0.0);
  if (agg.total_volume <= 0.0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      acc += std::min(system.liabilities(i, j) / system.equity[j], 1.0) * agg.a[j];
    }
    out[i] = acc / agg.total_volume;
  }
  return out;
}

RiskReport risk_report(const BankingSystem& system, const DebtRank2Options& dr2) {
  RiskReport r;
  r.debtrank = debtrank_all(system);
  r.debtrank_total = std::accumulate(r.debtrank.begin(), r.debtrank.end(), 0.0);
  for (const auto& x : debtrank2_all(system, dr2)) {
    r.debtrank2.push_back(x.value);
    r.debtrank2_total += x.value;
    r.debtrank2_converged = r.debtrank2_converged && x.converged;
  }
  r.direct_impact = direct_impact(system);
  r.direct_impact_total = std::accumulate(r.direct_impact.begin(), r.direct_impact.end(), 0.0);
  r.pearson_debtrank_impact = pearson(r.debtrank, r.direct_impact);
  return r;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace sysrisk
