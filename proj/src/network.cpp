#include "sysrisk/network.hpp"

#include <cmath>
#include <set>
#include <string>

namespace sysrisk {

BankingSystem make_system(std::vector<double> equity, SquareMatrix liabilities,
                          std::vector<double> kappa) {
  BankingSystem system;
  system.bank_ids.reserve(equity.size());
  for (std::size_t i = 0; i < equity.size(); ++i) system.bank_ids.push_back("B" + std::to_string(i));
  system.equity = std::move(equity);
  system.liabilities = std::move(liabilities);
  system.kappa = std::move(kappa);
  return system;
}

ValidationReport validate(const BankingSystem& system) {
  ValidationReport report;
  auto add = [&](std::string msg) { report.violations.push_back({std::move(msg)}); };

  const std::size_t n = system.size();
  if (n == 0) add("empty system");
  if (system.liabilities.size() != n) {
    add("liability matrix is " + std::to_string(system.liabilities.size()) + "x" +
        std::to_string(system.liabilities.size()) + " but there are " + std::to_string(n) +
        " banks");
    return report;
  }
  if (system.bank_ids.size() != n) add("bank id count does not match bank count");
  if (!system.kappa.empty() && system.kappa.size() != n) add("kappa count does not match bank count");
  if (!system.balance_sheets.empty() && system.balance_sheets.size() != n)
    add("balance sheet count does not match bank count");

  std::set<std::string> seen;
  for (const auto& id : system.bank_ids) {
    if (!seen.insert(id).second) add("duplicate bank id " + id);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double e = system.equity[i];
    if (!std::isfinite(e)) {
      add("non-finite equity at " + std::to_string(i));
    } else if (e <= 0.0) {
      add("non-positive equity at " + std::to_string(i));
    }
    if (system.kappa.size() == n) {
      const double k = system.kappa[i];
      if (!std::isfinite(k)) {
        add("non-finite kappa at " + std::to_string(i));
      } else if (k <= 0.0) {
        add("non-positive kappa at " + std::to_string(i));
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = system.liabilities(i, j);
      const std::string where = std::to_string(i) + "," + std::to_string(j);
      if (!std::isfinite(x)) {
        add("non-finite liability at " + where);
      } else if (x < 0.0) {
        add("negative liability at " + where);
      }
    }
    if (system.liabilities(i, i) != 0.0) add("nonzero diagonal at " + std::to_string(i));
  }
  return report;
}

void require_valid(const BankingSystem& system) {
  const auto report = validate(system);
  if (report.ok()) return;
  std::string text;
  for (const auto& v : report.violations) text += (text.empty() ? "" : "; ") + v.message;
  throw ValidationError("invalid banking system: " + text);
}

DerivedAggregates aggregates(const BankingSystem& system) {
  const std::size_t n = system.size();
  DerivedAggregates out;
  out.l.assign(n, 0.0);
  out.a.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = system.liabilities(i, j);
      out.l[i] += x;
      out.a[j] += x;
    }
  }
  for (double li : out.l) out.total_volume += li;
  out.v.assign(n, 0.0);
  if (out.total_volume > 0.0) {
    for (std::size_t i = 0; i < n; ++i) out.v[i] = out.a[i] / out.total_volume;
  }
  return out;
}

SquareMatrix impact_matrix(const BankingSystem& system) {
  const std::size_t n = system.size();
  SquareMatrix w(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      w(i, j) = std::min(system.liabilities(i, j) / system.equity[j], 1.0);
    }
  }
  return w;
}

std::vector<double> leverage_kappa(std::span<const double> total_assets,
                                   std::span<const double> total_liabilities) {
  if (total_assets.size() != total_liabilities.size())
    throw Error("total assets and total liabilities differ in length");
  std::vector<double> kappa(total_assets.size());
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const double equity = total_assets[i] - total_liabilities[i];
    if (!(equity > 0.0) || !std::isfinite(total_assets[i]))
      throw ValidationError("insolvent balance sheet at " + std::to_string(i));
    kappa[i] = total_assets[i] / equity;
  }
  return kappa;
}

BankingSystem scale_equity(const BankingSystem& system, double factor) {
  BankingSystem out = system;
  for (double& e : out.equity) e *= factor;
  return out;
}

BankingSystem with_liabilities(const BankingSystem& system, SquareMatrix liabilities) {
  BankingSystem out = system;
  out.liabilities = std::move(liabilities);
  return out;
}

}  // namespace sysrisk
