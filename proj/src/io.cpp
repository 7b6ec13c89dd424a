#include "sysrisk/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace sysrisk {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& file, std::size_t line, const std::string& what) {
  throw ParseError(file + " line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& text, const std::string& file, std::size_t line, const char* field) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    fail(file, line, std::string("bad ") + field + " '" + text + "'");
  return v;
}

// Reads non-blank lines, checking the header. Yields (line number, fields).
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_table(
    std::istream& in, const std::string& file, const std::vector<std::string>& header,
    std::size_t required_columns) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t number = 0;
  std::size_t columns = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    for (const auto& f : fields)
      if (f.find('"') != std::string::npos) fail(file, number, "quoted fields are not supported");
    if (!seen_header) {
      if (fields.size() < required_columns || fields.size() > header.size())
        fail(file, number, "unexpected header");
      for (std::size_t c = 0; c < fields.size(); ++c)
        if (fields[c] != header[c]) fail(file, number, "expected column '" + header[c] + "'");
      columns = fields.size();
      seen_header = true;
      continue;
    }
    if (fields.size() != columns)
      fail(file, number, "expected " + std::to_string(columns) + " fields, found " + std::to_string(fields.size()));
    rows.emplace_back(number, std::move(fields));
  }
  if (!seen_header) fail(file, number, "missing header");
  return rows;
}

}  // namespace

BankingSystem parse_network(std::istream& banks, std::istream& exposures) {
  const auto bank_rows =
      read_table(banks, "banks", {"bank_id", "equity", "total_assets", "total_liabilities"}, 2);
  if (bank_rows.empty()) throw ParseError("banks: no banks listed");
  if (!bank_rows.empty() && bank_rows.front().second.size() == 3)
    throw ParseError("banks: total_assets and total_liabilities must appear together");

  BankingSystem system;
  std::map<std::string, std::size_t> index;
  bool any_sheet = false;
  std::vector<std::optional<BalanceSheet>> sheets;
  std::vector<std::size_t> bank_lines;
  for (const auto& [line, f] : bank_rows) {
    bank_lines.push_back(line);
    if (f[0].empty()) fail("banks", line, "empty bank id");
    if (!index.emplace(f[0], system.bank_ids.size()).second) fail("banks", line, "duplicate bank id '" + f[0] + "'");
    system.bank_ids.push_back(f[0]);
    system.equity.push_back(parse_number(f[1], "banks", line, "equity"));
    std::optional<BalanceSheet> sheet;
    if (f.size() == 4) {
      if (f[2].empty() != f[3].empty())
        fail("banks", line, "total_assets and total_liabilities must both be given or both be empty");
      if (!f[2].empty()) {
        sheet = BalanceSheet{parse_number(f[2], "banks", line, "total_assets"),
                             parse_number(f[3], "banks", line, "total_liabilities")};
        any_sheet = true;
      }
    }
    sheets.push_back(sheet);
  }

  const std::size_t n = system.bank_ids.size();
  system.liabilities = SquareMatrix(n);
  const auto exposure_rows = read_table(exposures, "exposures", {"debtor_id", "creditor_id", "amount"}, 3);
  for (const auto& [line, f] : exposure_rows) {
    const auto d = index.find(f[0]);
    const auto c = index.find(f[1]);
    if (d == index.end()) fail("exposures", line, "unknown bank id '" + f[0] + "'");
    if (c == index.end()) fail("exposures", line, "unknown bank id '" + f[1] + "'");
    if (d->second == c->second) fail("exposures", line, "self-loop on '" + f[0] + "'");
    const double amount = parse_number(f[2], "exposures", line, "amount");
    if (amount < 0.0) fail("exposures", line, "negative amount");
    system.liabilities(d->second, c->second) += amount;
  }

  if (any_sheet) {
    system.balance_sheets = sheets;
    system.kappa.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!sheets[i]) continue;
      const double ta = sheets[i]->total_assets, tl = sheets[i]->total_liabilities;
      if (!(ta > tl)) fail("banks", bank_lines[i], "insolvent balance sheet for '" + system.bank_ids[i] + "'");
      system.kappa[i] = leverage_kappa(std::span<const double>(&ta, 1), std::span<const double>(&tl, 1))[0];
    }
  }
  require_valid(system);
  return system;
}

BankingSystem load_network(const std::string& banks_path, const std::string& exposures_path) {
  std::ifstream banks(banks_path);
  if (!banks) throw IoError("cannot open " + banks_path);
  std::ifstream exposures(exposures_path);
  if (!exposures) throw IoError("cannot open " + exposures_path);
  return parse_network(banks, exposures);
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_network(const BankingSystem& system, std::ostream& banks, std::ostream& exposures) {
  const std::size_t n = system.size();
  bool sheets = false;
  for (const auto& s : system.balance_sheets) sheets = sheets || s.has_value();
  banks << (sheets ? "bank_id,equity,total_assets,total_liabilities\n" : "bank_id,equity\n");
  for (std::size_t i = 0; i < n; ++i) {
    banks << system.bank_ids[i] << ',' << format_double(system.equity[i]);
    if (sheets) {
      const auto& s = system.balance_sheets[i];
      if (s) banks << ',' << format_double(s->total_assets) << ',' << format_double(s->total_liabilities);
      else banks << ",,";
    }
    banks << '\n';
  }
  exposures << "debtor_id,creditor_id,amount\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (system.liabilities(i, j) > 0.0)
        exposures << system.bank_ids[i] << ',' << system.bank_ids[j] << ','
                  << format_double(system.liabilities(i, j)) << '\n';
}

void save_network(const BankingSystem& system, const std::string& banks_path,
                  const std::string& exposures_path) {
  std::ofstream banks(banks_path);
  std::ofstream exposures(exposures_path);
  if (!banks || !exposures) throw IoError("cannot write network files");
  write_network(system, banks, exposures);
  if (!banks || !exposures) throw Error("failed while writing network files");
}

std::string canonical_text(const BankingSystem& system) {
  std::ostringstream banks, exposures;
  write_network(system, banks, exposures);
  return banks.str() + exposures.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string input_digest(const BankingSystem& system) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text(system))));
  return buf;
}

}  // namespace sysrisk
