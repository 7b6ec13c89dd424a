// Random instance generators and independent reference computations shared by the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "sysrisk/network.hpp"

namespace testsupport {

using sysrisk::BankingSystem;
using sysrisk::SquareMatrix;

inline SquareMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double density, double scale = 10.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SquareMatrix l(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && u(rng) < density) l(i, j) = scale * (0.05 + u(rng));
  return l;
}

// Equity drawn around a fraction of interbank assets so that some exposures exceed equity.
inline BankingSystem random_system(std::mt19937_64& rng, std::size_t n, double density, bool hetero_kappa) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SquareMatrix l = random_matrix(rng, n, density);
  std::vector<double> e(n), kappa;
  for (std::size_t j = 0; j < n; ++j) {
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) a += l(i, j);
    e[j] = (0.1 + 0.6 * u(rng)) * (a + 1.0);
  }
  if (hetero_kappa) {
    kappa.resize(n);
    for (auto& k : kappa) k = 1.0 + 9.0 * u(rng);
  }
  return sysrisk::make_system(std::move(e), std::move(l), std::move(kappa));
}

// Directed acyclic network: links only from lower to higher rank in a random order.
inline SquareMatrix random_dag(std::mt19937_64& rng, std::size_t n, double density) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SquareMatrix l(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q)
      if (u(rng) < density) l(order[p], order[q]) = 10.0 * (0.05 + u(rng));
  return l;
}

inline std::vector<double> col_sums(const SquareMatrix& l) {
  std::vector<double> a(l.size(), 0.0);
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < l.size(); ++j) a[j] += l(i, j);
  return a;
}

inline std::vector<double> row_sums(const SquareMatrix& l) {
  std::vector<double> r(l.size(), 0.0);
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < l.size(); ++j) r[i] += l(i, j);
  return r;
}

// sum_ij min(L_ij / e_j, 1) a_j, with a taken from the reference network.
inline double capped_objective(const std::vector<double>& e, const std::vector<double>& a, const SquareMatrix& l) {
  double total = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < l.size(); ++j)
      if (i != j) total += std::min(l(i, j) / e[j], 1.0) * a[j];
  return total;
}

// Step-by-step DebtRank exactly as the iterative definition reads: simultaneous h update, then states.
inline std::vector<double> reference_debtrank(const SquareMatrix& l, const std::vector<double>& e) {
  const std::size_t n = l.size();
  const auto a = col_sums(l);
  double total = 0.0;
  for (double x : a) total += x;
  std::vector<double> out(n, 0.0);
  if (total == 0.0) return out;
  enum { U, D, I };
  for (std::size_t seed = 0; seed < n; ++seed) {
    std::vector<double> h(n, 0.0);
    std::vector<int> s(n, U);
    h[seed] = 1.0;
    s[seed] = D;
    for (int step = 0; step < static_cast<int>(n) + 2; ++step) {
      bool any = false;
      for (int x : s) any = any || x == D;
      if (!any) break;
      std::vector<double> next = h;
      for (std::size_t i = 0; i < n; ++i) {
        double push = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (s[j] == D && j != i) push += std::min(l(j, i) / e[i], 1.0) * h[j];
        next[i] = std::min(1.0, h[i] + push);
      }
      std::vector<int> ns = s;
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] == D) ns[i] = I;
        else if (next[i] > 0.0 && s[i] != I) ns[i] = D;
      }
      h = next;
      s = ns;
    }
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != seed) r += h[j] * a[j] / total;
    out[seed] = r;
  }
  return out;
}

inline bool close_rel(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(1.0, std::max(std::abs(x), std::abs(y)));
}

}  // namespace testsupport
