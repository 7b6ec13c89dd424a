#include "sysrisk/mps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "sysrisk/io.hpp"

namespace sysrisk {

namespace {

char sense_code(RowSense s) {
  switch (s) {
    case RowSense::LessEqual: return 'L';
    case RowSense::Equal: return 'E';
    case RowSense::GreaterEqual: return 'G';
  }
  return 'E';
}

std::string column_name(const MilpProblem& p, std::size_t j) {
  const std::size_t d0 = p.delta_offset();
  return j < d0 ? "y_" + std::to_string(j + 1) : "d_" + std::to_string(j - d0 + 1);
}

const ConstraintBlock* block_at(const MilpProblem& p, int b) {
  switch (b) {
    case 1: return &p.a1;
    case 2: return &p.a2;
    case 3: return &p.a3;
    default: return &p.a4;
  }
}

std::string row_name(int block, std::size_t row) {
  return "r_a" + std::to_string(block) + "_" + std::to_string(row + 1);
}

}  // namespace

std::string export_mps(const MilpProblem& p, const std::string& name) {
  std::ostringstream out;
  out << "NAME " << name << '\n';
  if (p.direction == Direction::Maximize) out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n N obj\n";
  for (int b = 1; b <= 4; ++b) {
    const auto* blk = block_at(p, b);
    for (std::size_t r = 0; r < blk->rows; ++r) out << ' ' << sense_code(blk->sense) << ' ' << row_name(b, r) << '\n';
  }

  std::vector<std::vector<std::pair<std::string, double>>> by_col(p.n_vars);
  for (int b = 1; b <= 4; ++b)
    for (const auto& t : block_at(p, b)->entries) by_col[t.col].emplace_back(row_name(b, t.row), t.value);

  out << "COLUMNS\n";
  bool in_marker = false;
  int marker = 0;
  for (std::size_t j = 0; j < p.n_vars; ++j) {
    if (p.is_integer[j] && !in_marker) {
      out << "    MARKER" << marker++ << " 'MARKER' 'INTORG'\n";
      in_marker = true;
    } else if (!p.is_integer[j] && in_marker) {
      out << "    MARKER" << marker++ << " 'MARKER' 'INTEND'\n";
      in_marker = false;
    }
    const std::string col = column_name(p, j);
    if (p.c[j] != 0.0 || by_col[j].empty()) out << "    " << col << " obj " << format_double(p.c[j]) << '\n';
    for (const auto& [row, v] : by_col[j]) out << "    " << col << ' ' << row << ' ' << format_double(v) << '\n';
  }
  if (in_marker) out << "    MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (int b = 1; b <= 4; ++b) {
    const auto* blk = block_at(p, b);
    for (std::size_t r = 0; r < blk->rows; ++r)
      if (blk->rhs[r] != 0.0) out << "    rhs " << row_name(b, r) << ' ' << format_double(blk->rhs[r]) << '\n';
  }

  out << "BOUNDS\n";
  for (std::size_t j = 0; j < p.n_vars; ++j) {
    const std::string col = column_name(p, j);
    if (p.lower[j] == p.upper[j]) {
      out << " FX bnd " << col << ' ' << format_double(p.lower[j]) << '\n';
      continue;
    }
    if (p.lower[j] != 0.0) out << " LO bnd " << col << ' ' << format_double(p.lower[j]) << '\n';
    if (std::isfinite(p.upper[j])) out << " UP bnd " << col << ' ' << format_double(p.upper[j]) << '\n';
    else out << " PL bnd " << col << '\n';
  }
  out << "ENDATA\n";
  return out.str();
}

namespace {

double number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = first + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError("mps line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

// Splits "y_12" into ('y', 11); returns false on other names.
bool split_name(const std::string& s, const std::string& prefix, std::size_t& index) {
  if (s.rfind(prefix, 0) != 0 || s.size() == prefix.size()) return false;
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data() + prefix.size(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) return false;
  index = v - 1;
  return true;
}

}  // namespace

MilpProblem parse_mps(const std::string& text) {
  std::istringstream in(text);
  std::string line, section;
  std::size_t number_of_line = 0;
  bool maximize = false;
  std::string objective_row;

  struct RowInfo {
    int block = 0;
    std::size_t index = 0;
    char sense = 'E';
  };
  std::map<std::string, RowInfo> rows;
  std::size_t block_rows[5] = {0, 0, 0, 0, 0};
  char block_sense[5] = {0, 0, 0, 0, 0};

  struct ColumnData {
    bool integer = false;
    double cost = 0.0;
    std::vector<std::pair<RowInfo, double>> entries;
    double lower = 0.0, upper = std::numeric_limits<double>::infinity();
  };
  std::map<std::pair<char, std::size_t>, ColumnData> columns;
  bool integer_marker = false;
  std::map<std::pair<int, std::size_t>, double> rhs;
  bool ended = false;

  auto err = [&](const std::string& what) -> ParseError {
    return ParseError("mps line " + std::to_string(number_of_line) + ": " + what);
  };
  auto column_key = [&](const std::string& name) {
    std::size_t idx = 0;
    if (split_name(name, "y_", idx)) return std::make_pair('y', idx);
    if (split_name(name, "d_", idx)) return std::make_pair('d', idx);
    throw err("unknown column '" + name + "'");
  };

  while (std::getline(in, line)) {
    ++number_of_line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (line[0] != ' ' && line[0] != '\t') {
      section = tok[0];
      if (section == "NAME") continue;
      if (section == "OBJSENSE") {
        if (tok.size() > 1) maximize = tok[1] == "MAX" || tok[1] == "MAXIMIZE";
        continue;
      }
      if (section == "ENDATA") {
        ended = true;
        break;
      }
      if (section != "ROWS" && section != "COLUMNS" && section != "RHS" && section != "BOUNDS")
        throw err("unsupported section '" + section + "'");
      continue;
    }
    if (section == "OBJSENSE") {
      maximize = tok[0] == "MAX" || tok[0] == "MAXIMIZE";
    } else if (section == "ROWS") {
      if (tok.size() != 2) throw err("expected sense and row name");
      if (tok[0] == "N") {
        if (objective_row.empty()) objective_row = tok[1];
        continue;
      }
      if (tok[0] != "L" && tok[0] != "E" && tok[0] != "G") throw err("bad row sense '" + tok[0] + "'");
      RowInfo info;
      info.sense = tok[0][0];
      for (int b = 1; b <= 4 && info.block == 0; ++b)
        if (split_name(tok[1], "r_a" + std::to_string(b) + "_", info.index)) info.block = b;
      if (info.block == 0) throw err("unknown row '" + tok[1] + "'");
      if (block_sense[info.block] && block_sense[info.block] != info.sense) throw err("mixed senses within a block");
      block_sense[info.block] = info.sense;
      block_rows[info.block] = std::max(block_rows[info.block], info.index + 1);
      if (!rows.emplace(tok[1], info).second) throw err("duplicate row '" + tok[1] + "'");
    } else if (section == "COLUMNS") {
      if (tok.size() >= 3 && tok[1] == "'MARKER'") {
        if (tok[2] == "'INTORG'") integer_marker = true;
        else if (tok[2] == "'INTEND'") integer_marker = false;
        else throw err("bad marker");
        continue;
      }
      if (tok.size() != 3 && tok.size() != 5) throw err("expected column, row, value");
      auto& col = columns[column_key(tok[0])];
      col.integer = integer_marker;
      for (std::size_t t = 1; t + 1 < tok.size(); t += 2) {
        const double v = number(tok[t + 1], number_of_line);
        if (tok[t] == objective_row) {
          col.cost = v;
          continue;
        }
        const auto r = rows.find(tok[t]);
        if (r == rows.end()) throw err("unknown row '" + tok[t] + "'");
        if (v != 0.0) col.entries.emplace_back(r->second, v);
      }
    } else if (section == "RHS") {
      if (tok.size() != 3 && tok.size() != 5) throw err("expected set name, row, value");
      for (std::size_t t = 1; t + 1 < tok.size(); t += 2) {
        const auto r = rows.find(tok[t]);
        if (r == rows.end()) throw err("unknown row '" + tok[t] + "'");
        rhs[{r->second.block, r->second.index}] = number(tok[t + 1], number_of_line);
      }
    } else if (section == "BOUNDS") {
      if (tok.size() < 3) throw err("short bound line");
      const auto key = column_key(tok[2]);
      const auto it = columns.find(key);
      if (it == columns.end()) throw err("bound on undeclared column '" + tok[2] + "'");
      auto& col = it->second;
      const std::string& type = tok[0];
      if (type == "PL") {
        col.upper = std::numeric_limits<double>::infinity();
        continue;
      }
      if (tok.size() != 4) throw err("bound needs a value");
      const double v = number(tok[3], number_of_line);
      if (type == "UP") col.upper = v;
      else if (type == "LO") col.lower = v;
      else if (type == "FX") col.lower = col.upper = v;
      else throw err("unsupported bound type '" + type + "'");
    } else {
      throw err("data outside a section");
    }
  }
  if (!ended) throw ParseError("mps: missing ENDATA");

  std::size_t ny = 0, nd = 0;
  for (const auto& entry : columns) {
    std::size_t& count = entry.first.first == 'y' ? ny : nd;
    count = std::max(count, entry.first.second + 1);
  }
  if (ny != nd || ny % 2 != 0) throw ParseError("mps: y and d columns do not pair up");
  const std::size_t pairs = ny / 2;
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(pairs))));
  if (n * n != pairs || columns.size() != 2 * ny) throw ParseError("mps: column set does not describe a square network");

  MilpProblem p;
  p.n_banks = n;
  p.n_vars = 4 * pairs;
  p.direction = maximize ? Direction::Maximize : Direction::Minimize;
  p.c.assign(p.n_vars, 0.0);
  p.lower.assign(p.n_vars, 0.0);
  p.upper.assign(p.n_vars, 0.0);
  p.is_integer.assign(p.n_vars, 0);
  ConstraintBlock* blocks[5] = {nullptr, &p.a1, &p.a2, &p.a3, &p.a4};
  for (int b = 1; b <= 4; ++b) {
    blocks[b]->rows = block_rows[b];
    blocks[b]->rhs.assign(block_rows[b], 0.0);
    switch (block_sense[b]) {
      case 'L': blocks[b]->sense = RowSense::LessEqual; break;
      case 'G': blocks[b]->sense = RowSense::GreaterEqual; break;
      default: blocks[b]->sense = RowSense::Equal;
    }
  }
  for (const auto& [key, col] : columns) {
    const std::size_t j = key.first == 'y' ? key.second : p.delta_offset() + key.second;
    p.c[j] = col.cost;
    p.lower[j] = col.lower;
    p.upper[j] = col.upper;
    p.is_integer[j] = col.integer ? 1 : 0;
    for (const auto& [row, v] : col.entries) blocks[row.block]->entries.push_back({row.index, j, v});
  }
  for (int b = 1; b <= 4; ++b) {
    auto& e = blocks[b]->entries;
    std::sort(e.begin(), e.end(), [](const Triplet& x, const Triplet& y) {
      return x.row != y.row ? x.row < y.row : x.col < y.col;
    });
  }
  for (const auto& [key, v] : rhs) blocks[key.first]->rhs[key.second] = v;
  std::size_t integers = 0;
  for (char f : p.is_integer) integers += f ? 1 : 0;
  p.presolve_eliminated = 2 * pairs - std::min(2 * pairs, integers);
  return p;
}

}  // namespace sysrisk
