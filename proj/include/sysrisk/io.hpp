#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sysrisk/network.hpp"

namespace sysrisk {

/// Banks: `bank_id,equity[,total_assets,total_liabilities]`.
/// Exposures: `debtor_id,creditor_id,amount`, i.e. L[debtor][creditor] += amount.
/// Banks with both balance-sheet totals get kappa = TA / (TA - TL), the rest kappa = 1.
/// Throws ParseError (with the line number) or ValidationError.
BankingSystem parse_network(std::istream& banks, std::istream& exposures);
BankingSystem load_network(const std::string& banks_path, const std::string& exposures_path);

/// Canonical text form: full precision, exposures in row-major order of positive entries.
void write_network(const BankingSystem& system, std::ostream& banks, std::ostream& exposures);
void save_network(const BankingSystem& system, const std::string& banks_path,
                  const std::string& exposures_path);

/// Concatenated canonical bank and exposure files.
std::string canonical_text(const BankingSystem& system);

/// 64-bit FNV-1a of the canonical text, as 16 lowercase hex digits.
std::string input_digest(const BankingSystem& system);

std::uint64_t fnv1a64(const std::string& bytes);

/// printf("%.17g"); round-trips every finite double.
std::string format_double(double value);

}  // namespace sysrisk
