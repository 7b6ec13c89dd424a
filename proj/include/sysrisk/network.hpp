#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sysrisk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A banking system that breaks a structural rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (CSV, MPS).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The optimizer could not deliver a network.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Dense row-major N x N matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Balance-sheet totals used to derive the leverage ratio of a bank.
struct BalanceSheet {
  double total_assets = 0.0;
  double total_liabilities = 0.0;
  bool operator==(const BalanceSheet&) const = default;
};

/// An interbank exposure network. liabilities(i, j) is the amount bank i owes bank j.
struct BankingSystem {
  std::vector<std::string> bank_ids;
  std::vector<double> equity;
  SquareMatrix liabilities;
  // Credit-risk indicator per bank. Empty means kappa = 1 for every bank.
  std::vector<double> kappa;
  // Optional per-bank balance-sheet totals; empty, or one entry per bank.
  std::vector<std::optional<BalanceSheet>> balance_sheets;

  std::size_t size() const { return equity.size(); }
  double kappa_of(std::size_t i) const { return kappa.empty() ? 1.0 : kappa[i]; }

  bool operator==(const BankingSystem&) const = default;
};

struct Violation {
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

struct DerivedAggregates {
  std::vector<double> l;  // row sums (interbank liabilities)
  std::vector<double> a;  // column sums (interbank assets)
  double total_volume = 0.0;
  std::vector<double> v;  // relative weights a_i / total_volume
};

/// Builds a system with generated ids "B0", "B1", ... and kappa = 1.
BankingSystem make_system(std::vector<double> equity, SquareMatrix liabilities,
                          std::vector<double> kappa = {});

ValidationReport validate(const BankingSystem& system);

/// Throws Error listing the first violation when the system is not well-formed.
void require_valid(const BankingSystem& system);

DerivedAggregates aggregates(const BankingSystem& system);

/// W(i, j) = min(L(i, j) / e_j, 1).
SquareMatrix impact_matrix(const BankingSystem& system);

/// kappa_i = TA_i / (TA_i - TL_i); throws on a non-positive denominator.
std::vector<double> leverage_kappa(std::span<const double> total_assets,
                                   std::span<const double> total_liabilities);

/// Returns a copy with every equity multiplied by factor.
BankingSystem scale_equity(const BankingSystem& system, double factor);

/// Returns a copy with the liability matrix replaced.
BankingSystem with_liabilities(const BankingSystem& system, SquareMatrix liabilities);

}  // namespace sysrisk
