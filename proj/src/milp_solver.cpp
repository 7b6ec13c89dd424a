#include "sysrisk/milp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <unordered_set>

#include "sysrisk/simplex.hpp"

namespace sysrisk {

namespace {

// Per-entry data recovered from the indicator rows of A1.
struct Pair {
  double e = 0.0;      // equity cap of the below-equity part
  double u = 0.0;      // cap of the above-equity part
  double slope = 0.0;  // objective coefficient of the below-equity part
  bool y1_open = false;
  bool y2_open = false;
  int d1_lo = 0, d1_hi = 1, d2_lo = 0, d2_hi = 1;
};

struct LinkingRow {
  int block = 0;  // 0: creditor sums, 1: debtor sums, 2: risk rows
  bool implied = false;  // a copy of a creditor-sum row (kappa = 1 throughout)
  RowSense sense = RowSense::Equal;
  double rhs = 0.0;
  std::vector<std::pair<std::size_t, double>> terms;  // (pair, coefficient)
};

struct Structure {
  std::size_t n_pairs = 0;
  std::vector<Pair> pairs;
  std::vector<LinkingRow> rows;
  double scale = 1.0;
  // Blocks whose rows are unit-coefficient equalities over disjoint pairs; each such row
  // can be convexified on its own.
  std::vector<int> separable_blocks;
};

int bound_to_int(double v) { return v >= 0.5 ? 1 : 0; }

Structure extract_structure(const MilpProblem& p) {
  const std::size_t np = p.n_pairs();
  if (p.n_vars != 4 * np || p.a1.rows != 4 * np || p.c.size() != p.n_vars ||
      p.lower.size() != p.n_vars || p.upper.size() != p.n_vars || p.is_integer.size() != p.n_vars)
    throw Error("problem dimensions do not match the pair structure");
  const std::size_t d0 = p.delta_offset();
  Structure s;
  s.n_pairs = np;
  s.pairs.resize(np);

  std::vector<double> coef_e(np, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> coef_e2(np, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> coef_u(np, 0.0);
  for (const auto& t : p.a1.entries) {
    const std::size_t k = t.row / 4;
    const std::size_t kind = t.row % 4;
    const std::size_t y1 = 2 * k, y2 = 2 * k + 1, d1 = d0 + 2 * k, d2 = d0 + 2 * k + 1;
    bool ok = false;
    switch (kind) {
      case 0:
        ok = (t.col == y1 && t.value == 1.0) || t.col == d1;
        if (t.col == d1) coef_e[k] = -t.value;
        break;
      case 1:
        ok = (t.col == y1 && t.value == -1.0) || t.col == d2;
        if (t.col == d2) coef_e2[k] = t.value;
        break;
      case 2:
        ok = (t.col == y2 && t.value == 1.0) || t.col == d2;
        if (t.col == d2) coef_u[k] = -t.value;
        break;
      default:
        ok = (t.col == d1 && t.value == -1.0) || (t.col == d2 && t.value == 1.0);
    }
    if (!ok) throw Error("A1 row " + std::to_string(t.row) + " does not match the indicator pattern");
  }
  for (const double r : p.a1.rhs) {
    if (r != 0.0) throw Error("A1 right-hand side must be zero");
  }

  for (std::size_t k = 0; k < np; ++k) {
    Pair& q = s.pairs[k];
    if (!(coef_e[k] > 0.0) || coef_e[k] != coef_e2[k] || coef_u[k] < 0.0)
      throw Error("inconsistent indicator coefficients for pair " + std::to_string(k));
    q.e = coef_e[k];
    q.u = coef_u[k];
    const std::size_t y1 = 2 * k, y2 = 2 * k + 1, d1 = d0 + 2 * k, d2 = d0 + 2 * k + 1;
    if (p.c[y2] != 0.0 || p.c[d1] != 0.0 || p.c[d2] != 0.0)
      throw Error("only the below-equity parts may carry objective weight");
    q.slope = p.c[y1];
    for (std::size_t j : {y1, y2, d1, d2}) {
      if (p.lower[j] != 0.0 && !(j >= d0 && p.lower[j] == 1.0))
        throw Error("unsupported lower bound on column " + std::to_string(j));
    }
    if (p.upper[y1] != 0.0 && p.upper[y1] != q.e) throw Error("unsupported bound on y column " + std::to_string(y1));
    if (p.upper[y2] != 0.0 && p.upper[y2] != q.u) throw Error("unsupported bound on y column " + std::to_string(y2));
    q.y1_open = p.upper[y1] > 0.0;
    q.y2_open = p.upper[y2] > 0.0;
    q.d1_lo = bound_to_int(p.lower[d1]);
    q.d1_hi = bound_to_int(p.upper[d1]);
    q.d2_lo = bound_to_int(p.lower[d2]);
    q.d2_hi = bound_to_int(p.upper[d2]);
  }

  double scale = 1.0;
  int block_index = 0;
  for (const auto* block : {&p.a2, &p.a3, &p.a4}) {
    const int b = block_index++;
    std::vector<std::map<std::size_t, std::pair<double, double>>> acc(block->rows);
    for (const auto& t : block->entries) {
      if (t.col >= d0) throw Error("linking rows may not reference binaries");
      auto& slot = acc[t.row][t.col / 2];
      (t.col % 2 == 0 ? slot.first : slot.second) += t.value;
    }
    for (std::size_t r = 0; r < block->rows; ++r) {
      LinkingRow row;
      row.block = b;
      row.sense = block->sense;
      row.rhs = block->rhs[r];
      scale = std::max(scale, std::abs(row.rhs));
      for (const auto& [k, cc] : acc[r]) {
        if (cc.first != cc.second) throw Error("linking row coefficients differ within a pair");
        row.terms.emplace_back(k, cc.first);
      }
      s.rows.push_back(std::move(row));
    }
  }
  s.scale = scale;
  const std::size_t n = p.n_banks;
  if (s.rows.size() == 3 * n) {
    for (std::size_t r = 0; r < n; ++r) {
      const LinkingRow& sum = s.rows[r];
      LinkingRow& risk = s.rows[2 * n + r];
      const bool rhs_ok = risk.sense == RowSense::Equal ? risk.rhs == sum.rhs
                          : risk.sense == RowSense::GreaterEqual ? risk.rhs <= sum.rhs
                                                                 : risk.rhs >= sum.rhs;
      risk.implied = sum.sense == RowSense::Equal && rhs_ok && risk.terms == sum.terms;
    }
  }
  for (int b : {0, 1}) {
    std::vector<char> used(np, 0);
    bool ok = true;
    for (const auto& row : s.rows) {
      if (row.block != b) continue;
      ok = ok && row.sense == RowSense::Equal;
      for (const auto& [k, c] : row.terms) {
        ok = ok && c == 1.0 && !used[k];
        used[k] = 1;
      }
    }
    if (ok) s.separable_blocks.push_back(b);
  }
  return s;
}

// Node-local box on every entry x_k, tightened by propagation over the linking rows.
struct Box {
  std::vector<double> lo, hi;
};

// Bound changes relative to the root box, kept sorted by pair.
struct BoundChange {
  std::uint32_t pair = 0;
  double lo = 0.0;
  double hi = 0.0;
};
using Changes = std::vector<BoundChange>;

Box root_box(const Structure& s) {
  Box b;
  b.lo.assign(s.n_pairs, 0.0);
  b.hi.assign(s.n_pairs, 0.0);
  for (std::size_t k = 0; k < s.n_pairs; ++k) {
    const Pair& q = s.pairs[k];
    if (q.d1_hi == 0 || !q.y1_open) continue;
    b.hi[k] = q.d2_hi == 0 ? q.e : q.e + (q.y2_open ? q.u : 0.0);
    if (q.d2_lo == 1) b.lo[k] = q.e;
  }
  return b;
}

// Implied bounds from the linking rows; false when the box is empty.
bool propagate(const Structure& s, Box& b) {
  const double tol = 1e-10 * s.scale;
  for (int pass = 0; pass < 20; ++pass) {
    bool changed = false;
    for (const auto& row : s.rows) {
      if (row.implied) continue;
      double sum_lo = 0.0, sum_hi = 0.0;
      for (const auto& [k, c] : row.terms) {
        sum_lo += c * b.lo[k];
        sum_hi += c * b.hi[k];
      }
      const bool has_upper = row.sense != RowSense::GreaterEqual;
      const bool has_lower = row.sense != RowSense::LessEqual;
      if (has_lower && sum_hi < row.rhs - tol) return false;
      if (has_upper && sum_lo > row.rhs + tol) return false;
      for (const auto& [k, c] : row.terms) {
        if (c <= 0.0) continue;
        if (has_upper) {
          const double cap = (row.rhs - (sum_lo - c * b.lo[k])) / c;
          if (cap < b.hi[k] - tol) {
            sum_hi -= c * (b.hi[k] - cap);
            b.hi[k] = cap;
            changed = true;
          }
        }
        if (has_lower) {
          const double floor = (row.rhs - (sum_hi - c * b.hi[k])) / c;
          if (floor > b.lo[k] + tol) {
            sum_lo += c * (floor - b.lo[k]);
            b.lo[k] = floor;
            changed = true;
          }
        }
        if (b.lo[k] > b.hi[k] + tol) return false;
      }
    }
    if (!changed) break;
  }
  for (std::size_t k = 0; k < s.n_pairs; ++k) {
    b.hi[k] = std::max(b.hi[k], 0.0);
    b.lo[k] = std::clamp(b.lo[k], 0.0, b.hi[k]);
  }
  return true;
}

struct Relaxation {
  LinearProgram lp;
  // Column c adds value(c) * touch_w[t] to entry touch_k[t] for t in [touch_start[c], touch_start[c + 1]).
  std::vector<std::size_t> touch_start{0};
  std::vector<std::size_t> touch_k;
  std::vector<double> touch_w;
  std::size_t columns() const { return touch_start.size() - 1; }
  std::vector<char> is_vertex;  // convex weight on a vertex of one separable row
  std::vector<std::uint64_t> key;  // identifies a column across nodes (hash; collisions only cost speed)
  std::vector<char> plain;      // entry modelled by its own column(s) rather than by vertices
};

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  return h ^ (h >> 29);
}

std::uint64_t bits(double v) {
  std::uint64_t out;
  std::memcpy(&out, &v, sizeof out);
  return out;
}

// Secant of slope * min(x, e) over [lo, hi] when the box straddles e.
double secant_slope(const Pair& q, double lo, double hi) { return q.slope * (q.e - lo) / (hi - lo); }

double true_term(const Pair& q, double x) { return q.slope * std::min(x, q.e); }

// Vertices of {sum_k x_k = rhs, lo <= x <= hi} over the entries of one row: every entry sits
// at a bound except at most one. They are appended to out with stride pairs.size() and counted
// in count. False when there are more than cap of them.
bool row_vertices(const std::vector<std::size_t>& pairs, double rhs, const Box& b, double tol,
                  std::size_t cap, std::vector<double>& out, std::size_t& count) {
  const std::size_t m = pairs.size();
  std::vector<double> width(m);
  double reach = rhs;
  for (std::size_t t = 0; t < m; ++t) {
    width[t] = b.hi[pairs[t]] - b.lo[pairs[t]];
    reach -= b.lo[pairs[t]];
  }
  std::vector<char> at_hi(m, 0);
  auto emit = [&](std::size_t free_item, double amount) {
    const std::size_t at = out.size();
    for (std::size_t t = 0; t < m; ++t) out.push_back(at_hi[t] ? b.hi[pairs[t]] : b.lo[pairs[t]]);
    if (free_item < m) out[at + free_item] = b.lo[pairs[free_item]] + amount;
    return ++count <= cap;
  };
  // Depth-first over the entries pushed to their upper bound; the leftover goes to one free entry.
  auto visit = [&](auto&& self, std::size_t t, double used) -> bool {
    if (used > reach + tol) return true;
    if (t == m) {
      const double rest = reach - used;
      if (rest <= tol) return rest < -tol || emit(m, 0.0);
      for (std::size_t f = 0; f < m; ++f)
        if (!at_hi[f] && width[f] > rest + tol && !emit(f, rest)) return false;
      return true;
    }
    if (width[t] <= tol) return self(self, t + 1, used);
    if (!self(self, t + 1, used)) return false;
    at_hi[t] = 1;
    const bool ok = self(self, t + 1, used + width[t]);
    at_hi[t] = 0;
    return ok;
  };
  return visit(visit, 0, 0.0);
}

constexpr std::size_t kVertexCap = 4096;
constexpr std::size_t kHullCacheBytes = std::size_t{256} << 20;

// Vertices of one separable row under one box of its entries, with everything their columns
// need except LP row numbers.
struct RowHull {
  std::vector<double> box;  // lo and hi of every entry of the row, to confirm a cache hit
  std::vector<std::size_t> pairs;
  bool ok = false;  // false when the row has more than kVertexCap vertices
  std::size_t count = 0;
  std::vector<double> cost;
  std::vector<std::uint64_t> key;
  std::vector<std::size_t> touch_start{0};  // per vertex, into touch_k / touch_w
  std::vector<std::size_t> touch_k;
  std::vector<double> touch_w;
  std::vector<std::size_t> link_start{0};  // per vertex, into link_row / link_coef
  std::vector<std::size_t> link_row;       // other rows of the problem, ascending
  std::vector<double> link_coef;

  std::size_t bytes() const {
    return sizeof(RowHull) + 8 * (box.size() + pairs.size() + cost.size() + key.size() + touch_start.size() +
                                  2 * touch_k.size() + link_start.size() + 2 * link_row.size());
  }
};

// Row hulls keyed by row and entry box. Siblings and cousins share most rows' boxes, so most
// rows are enumerated once. The cache is emptied when it outgrows its byte budget.
class HullCache {
 public:
  explicit HullCache(const Structure& s) : s_(s), entry_rows_(s.n_pairs) {
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      if (s.rows[r].implied) continue;
      for (const auto& [k, c] : s.rows[r].terms) entry_rows_[k].emplace_back(r, c);
    }
  }

  std::shared_ptr<const RowHull> get(std::size_t r, const Box& b, double tol) {
    std::uint64_t h = mix(7, r);
    for (const auto& [k, c] : s_.rows[r].terms) h = mix(mix(h, bits(b.lo[k])), bits(b.hi[k]));
    const auto it = map_.find(h);
    if (it != map_.end() && same_box(*it->second, r, b)) return it->second;
    auto hull = build(r, b, tol);
    if (it == map_.end()) {
      if (bytes_ + hull->bytes() > kHullCacheBytes) {
        map_.clear();
        bytes_ = 0;
      }
      bytes_ += hull->bytes();
      map_.emplace(h, hull);
    }
    return hull;
  }

 private:
  bool same_box(const RowHull& hull, std::size_t r, const Box& b) const {
    std::size_t t = 0;
    for (const auto& [k, c] : s_.rows[r].terms) {
      if (hull.box[t] != b.lo[k] || hull.box[t + 1] != b.hi[k]) return false;
      t += 2;
    }
    return true;
  }

  std::shared_ptr<const RowHull> build(std::size_t r, const Box& b, double tol) const {
    auto out = std::make_shared<RowHull>();
    const auto& row = s_.rows[r];
    for (const auto& [k, c] : row.terms) {
      out->box.push_back(b.lo[k]);
      out->box.push_back(b.hi[k]);
      if (b.hi[k] > 0.0) out->pairs.push_back(k);
    }
    std::vector<double> vertices;
    out->ok = row_vertices(out->pairs, row.rhs, b, tol, kVertexCap, vertices, out->count);
    if (!out->ok) {
      out->count = 0;
      return out;
    }
    const std::size_t m = out->pairs.size();
    std::vector<double> acc(s_.rows.size(), 0.0);
    std::vector<char> marked(s_.rows.size(), 0);
    std::vector<std::size_t> hit;
    for (std::size_t i = 0; i < out->count; ++i) {
      const double* v = vertices.data() + i * m;
      double cost = 0.0;
      std::uint64_t key = mix(1, r);
      hit.clear();
      for (std::size_t t = 0; t < m; ++t) {
        const std::size_t k = out->pairs[t];
        key = mix(key, bits(v[t]));
        cost += true_term(s_.pairs[k], v[t]);
        if (v[t] == 0.0) continue;
        out->touch_k.push_back(k);
        out->touch_w.push_back(v[t]);
        for (const auto& [r2, coef] : entry_rows_[k]) {
          if (r2 == r) continue;
          if (!marked[r2]) {
            marked[r2] = 1;
            hit.push_back(r2);
          }
          acc[r2] += coef * v[t];
        }
      }
      std::sort(hit.begin(), hit.end());
      for (std::size_t r2 : hit) {
        if (acc[r2] != 0.0) {
          out->link_row.push_back(r2);
          out->link_coef.push_back(acc[r2]);
        }
        acc[r2] = 0.0;
        marked[r2] = 0;
      }
      out->cost.push_back(cost);
      out->key.push_back(key);
      out->touch_start.push_back(out->touch_k.size());
      out->link_start.push_back(out->link_row.size());
    }
    return out;
  }

  const Structure& s_;
  std::vector<std::vector<std::pair<std::size_t, double>>> entry_rows_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const RowHull>> map_;
  std::size_t bytes_ = 0;
};

// Node relaxation. Rows of the separable block `family` are replaced by the convex hull of their
// own vertices priced exactly; every other entry gets its secant (minimise) or its two linear
// pieces (maximise). family < 0 disables the row hulls.
Relaxation build_relaxation(const Structure& s, Direction dir, const Box& b, int family, HullCache& cache) {
  Relaxation rel;
  auto& lp = rel.lp;
  const double sign = dir == Direction::Minimize ? 1.0 : -1.0;
  const double tol = 1e-12 * s.scale;
  rel.plain.assign(s.n_pairs, 1);

  // Decide the row hulls first so the linking rows are numbered before any column exists.
  std::vector<std::shared_ptr<const RowHull>> hulls;
  std::vector<char> consumed(s.rows.size(), 0);
  if (dir == Direction::Minimize && family >= 0) {
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      if (s.rows[r].block != family) continue;
      auto hull = cache.get(r, b, tol);
      if (!hull->ok) continue;
      consumed[r] = 1;
      for (std::size_t k : hull->pairs) rel.plain[k] = 0;
      hulls.push_back(std::move(hull));
    }
  }
  const std::size_t n_hulls = hulls.size();
  lp.n_rows = n_hulls;
  lp.sense.assign(n_hulls, RowSense::Equal);
  lp.rhs.assign(n_hulls, 1.0);
  std::vector<long> lp_row_of(s.rows.size(), -1);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_of(s.n_pairs);
  for (std::size_t r = 0; r < s.rows.size(); ++r) {
    const auto& row = s.rows[r];
    if (consumed[r] || row.implied) continue;
    const std::size_t lp_row = lp.n_rows++;
    lp_row_of[r] = static_cast<long>(lp_row);
    lp.sense.push_back(row.sense);
    lp.rhs.push_back(row.rhs);
    for (const auto& [k, coef] : row.terms) rows_of[k].emplace_back(lp_row, coef);
  }

  std::size_t n_vertices = 0, n_touches = 0, n_links = 0;
  for (const auto& hull : hulls) {
    n_vertices += hull->count;
    n_touches += hull->touch_k.size();
    n_links += hull->link_row.size();
  }
  const std::size_t n_cols_hint = n_vertices + 2 * s.n_pairs;
  lp.lower.reserve(n_cols_hint);
  lp.upper.reserve(n_cols_hint);
  lp.cost.reserve(n_cols_hint);
  rel.is_vertex.reserve(n_cols_hint);
  rel.key.reserve(n_cols_hint);
  rel.touch_start.reserve(n_cols_hint + 1);
  rel.touch_k.reserve(n_touches + 2 * s.n_pairs);
  rel.touch_w.reserve(n_touches + 2 * s.n_pairs);
  lp.entries.reserve(n_vertices + n_links + 4 * s.n_pairs);

  // Vertex columns: the convexity row comes first, then linking rows in ascending order.
  for (std::size_t h = 0; h < n_hulls; ++h) {
    const RowHull& hull = *hulls[h];
    for (std::size_t i = 0; i < hull.count; ++i) {
      const std::size_t col = lp.n_cols++;
      lp.entries.push_back({h, col, 1.0});
      for (std::size_t t = hull.link_start[i]; t < hull.link_start[i + 1]; ++t) {
        const long lr = lp_row_of[hull.link_row[t]];
        if (lr >= 0) lp.entries.push_back({static_cast<std::size_t>(lr), col, hull.link_coef[t]});
      }
      rel.touch_k.insert(rel.touch_k.end(), hull.touch_k.begin() + static_cast<std::ptrdiff_t>(hull.touch_start[i]),
                         hull.touch_k.begin() + static_cast<std::ptrdiff_t>(hull.touch_start[i + 1]));
      rel.touch_w.insert(rel.touch_w.end(), hull.touch_w.begin() + static_cast<std::ptrdiff_t>(hull.touch_start[i]),
                         hull.touch_w.begin() + static_cast<std::ptrdiff_t>(hull.touch_start[i + 1]));
      rel.touch_start.push_back(rel.touch_k.size());
      rel.is_vertex.push_back(1);
      rel.key.push_back(hull.key[i]);
      lp.lower.push_back(0.0);
      lp.upper.push_back(kInfinity);
      lp.cost.push_back(hull.cost[i]);
    }
  }

  // Plain columns, one entry each.
  std::vector<double> acc(lp.n_rows, 0.0);
  std::vector<std::size_t> hit;
  auto add_col = [&](double lo, double hi, double cost, std::uint64_t key, std::size_t k) {
    const std::size_t col = lp.n_cols++;
    rel.key.push_back(key);
    rel.touch_k.push_back(k);
    rel.touch_w.push_back(1.0);
    hit.clear();
    for (const auto& [r, coef] : rows_of[k]) {
      if (acc[r] == 0.0) hit.push_back(r);
      acc[r] += coef;
    }
    std::sort(hit.begin(), hit.end());
    for (std::size_t r : hit) {
      if (acc[r] != 0.0) lp.entries.push_back({r, col, acc[r]});
      acc[r] = 0.0;
    }
    rel.touch_start.push_back(rel.touch_k.size());
    rel.is_vertex.push_back(0);
    lp.lower.push_back(lo);
    lp.upper.push_back(hi);
    lp.cost.push_back(cost);
  };

  for (std::size_t k = 0; k < s.n_pairs; ++k) {
    if (!rel.plain[k]) continue;
    const Pair& q = s.pairs[k];
    const double lo = b.lo[k], hi = b.hi[k];
    if (hi <= 0.0) continue;
    if (hi <= q.e) {
      add_col(lo, hi, sign * q.slope, mix(2, k), k);
    } else if (lo >= q.e) {
      lp.offset += sign * q.slope * q.e;
      add_col(lo, hi, 0.0, mix(2, k), k);
    } else if (dir == Direction::Minimize) {
      const double m = secant_slope(q, lo, hi);
      lp.offset += q.slope * lo - m * lo;
      add_col(lo, hi, m, mix(2, k), k);
    } else {
      add_col(lo, q.e, sign * q.slope, mix(2, k), k);
      add_col(0.0, hi - q.e, 0.0, mix(3, k), k);
    }
  }
  return rel;
}

double true_total(const Structure& s, const std::vector<double>& x) {
  double total = 0.0;
  for (std::size_t k = 0; k < s.n_pairs; ++k) total += true_term(s.pairs[k], x[k]);
  return total;
}

// Successive linearisation of the concave cost: each LP minimises a supergradient of the
// true objective, so the true value never increases. Stops at a local minimum.
std::vector<double> descend(const Structure& s, const Box& b, std::vector<double> x, long& lp_iterations) {
  double current = true_total(s, x);
  for (int round = 0; round < 50; ++round) {
    LinearProgram lp;
    std::vector<std::size_t> column_pair;
    std::vector<long> col_of(s.n_pairs, -1);
    for (std::size_t k = 0; k < s.n_pairs; ++k) {
      if (b.hi[k] <= 0.0) continue;
      const Pair& q = s.pairs[k];
      col_of[k] = static_cast<long>(lp.n_cols++);
      column_pair.push_back(k);
      lp.lower.push_back(b.lo[k]);
      lp.upper.push_back(b.hi[k]);
      lp.cost.push_back(x[k] >= q.e * (1.0 - 1e-12) ? 0.0 : q.slope);
    }
    for (const auto& row : s.rows) {
      if (row.implied) continue;
      const std::size_t r = lp.n_rows++;
      lp.sense.push_back(row.sense);
      lp.rhs.push_back(row.rhs);
      for (const auto& [k, coef] : row.terms)
        if (col_of[k] >= 0) lp.entries.push_back({r, static_cast<std::size_t>(col_of[k]), coef});
    }
    const LpSolution sol = solve_lp(lp);
    lp_iterations += sol.iterations;
    if (sol.status != LpStatus::Optimal) break;
    std::vector<double> next(s.n_pairs, 0.0);
    for (std::size_t c = 0; c < column_pair.size(); ++c) next[column_pair[c]] = sol.x[c];
    const double value = true_total(s, next);
    if (value >= current - 1e-12 * std::max(1.0, std::abs(current))) break;
    current = value;
    x = std::move(next);
  }
  return x;
}

std::vector<double> canonical_z(const MilpProblem& p, const Structure& s, const std::vector<double>& x) {
  std::vector<double> z(p.n_vars, 0.0);
  const std::size_t d0 = p.delta_offset();
  for (std::size_t k = 0; k < s.n_pairs; ++k) {
    const Pair& q = s.pairs[k];
    const double xk = std::max(0.0, x[k]);
    const double y1 = std::min(xk, q.e);
    const double y2 = q.y2_open ? std::max(0.0, xk - y1) : 0.0;
    z[2 * k] = y1;
    z[2 * k + 1] = y2;
    const int d2 = std::max(y2 > 0.0 ? 1 : 0, q.d2_lo);
    const int d1 = std::max({xk > 0.0 ? 1 : 0, d2, q.d1_lo});
    z[d0 + 2 * k] = d1;
    z[d0 + 2 * k + 1] = d2;
  }
  return z;
}

struct OpenNode {
  double key = 0.0;  // bound inherited from the parent, minimisation sense
  std::uint64_t id = 0;
  Changes changes;
  std::shared_ptr<const std::vector<std::uint64_t>> basis;  // parent's basic column keys
};

Changes with_change(const Changes& base, std::uint32_t k, double lo, double hi) {
  Changes out;
  out.reserve(base.size() + 1);
  bool placed = false;
  for (const auto& c : base) {
    if (!placed && c.pair >= k) {
      out.push_back({k, lo, hi});
      placed = true;
      if (c.pair == k) continue;
    }
    out.push_back(c);
  }
  if (!placed) out.push_back({k, lo, hi});
  return out;
}

}  // namespace

MilpSolution solve(const MilpProblem& problem, const SolveOptions& options,
                   std::span<const double> warm_start) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  if (!(options.gap_tolerance > 0.0) || !(options.integrality_tolerance > 0.0) ||
      !(options.feasibility_tolerance > 0.0))
    throw Error("solver tolerances must be positive");

  const Structure s = extract_structure(problem);
  const Direction dir = problem.direction;
  const double sense_sign = dir == Direction::Minimize ? 1.0 : -1.0;
  const std::size_t np = s.n_pairs;

  MilpSolution sol;
  bool have_incumbent = false;
  double incumbent_key = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent_z;

  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  if (!warm_start.empty()) {
    if (warm_start.size() != problem.n_vars) throw Error("warm start has the wrong length");
    if (max_violation(problem, warm_start) <= options.feasibility_tolerance * s.scale) {
      have_incumbent = true;
      incumbent_z.assign(warm_start.begin(), warm_start.end());
      incumbent_key = sense_sign * linear_objective(problem, incumbent_z);
    }
  }

  auto cmp = [&](const OpenNode& a, const OpenNode& b) {
    if (a.key != b.key) return a.key > b.key;
    return options.deterministic_tie_breaking ? a.id > b.id : a.id < b.id;
  };
  std::priority_queue<OpenNode, std::vector<OpenNode>, decltype(cmp)> open(cmp);
  std::uint64_t next_id = 0;
  open.push({-std::numeric_limits<double>::infinity(), next_id++, {}, nullptr});

  auto relative_gap = [&](double best_key) {
    if (!have_incumbent) return std::numeric_limits<double>::infinity();
    const double diff = std::max(0.0, incumbent_key - best_key);
    if (diff == 0.0) return 0.0;
    return diff / std::max(std::abs(incumbent_key), 1e-12);
  };

  bool limit_hit = false;
  bool stopped_on_gap = false;
  Box root = root_box(s);
  if (!propagate(s, root)) open.pop();

  // Convexify the separable block whose row hulls give the stronger root bound.
  int family = -1;
  HullCache hull_cache(s);
  if (dir == Direction::Minimize && !open.empty()) {
    double best = -std::numeric_limits<double>::infinity();
    for (int b : s.separable_blocks) {
      const LpSolution lp = solve_lp(build_relaxation(s, dir, root, b, hull_cache).lp);
      sol.lp_iterations += lp.iterations;
      if (lp.status == LpStatus::Optimal && (family < 0 || lp.objective > best + 1e-12 * std::max(1.0, std::abs(best)))) {
        best = lp.objective;
        family = b;
      }
    }
  }
  Box box;
  while (!open.empty()) {
    if (have_incumbent && relative_gap(open.top().key) <= options.gap_tolerance) {
      stopped_on_gap = true;
      break;
    }
    if ((options.node_limit > 0 && sol.node_count >= options.node_limit) ||
        (options.time_limit_seconds > 0.0 && elapsed() >= options.time_limit_seconds)) {
      limit_hit = true;
      break;
    }
    OpenNode node = open.top();
    open.pop();
    ++sol.node_count;

    box = root;
    for (const auto& c : node.changes) {
      box.lo[c.pair] = c.lo;
      box.hi[c.pair] = c.hi;
    }
    if (!propagate(s, box)) continue;

    Relaxation rel = build_relaxation(s, dir, box, family, hull_cache);
    LpOptions lp_options;
    if (node.basis) {
      const std::unordered_set<std::uint64_t> warm(node.basis->begin(), node.basis->end());
      for (std::size_t c = 0; c < rel.columns(); ++c)
        if (warm.count(rel.key[c])) lp_options.preferred.push_back(c);
    }
    const LpSolution lp = solve_lp(rel.lp, lp_options);
    sol.lp_iterations += lp.iterations;
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status != LpStatus::Optimal)
      throw SolverError("node relaxation failed: " + to_string(lp.status) + " " + lp.diagnostic);

    const double key = std::max(lp.objective, node.key);  // minimisation sense
    std::vector<double> x(np, 0.0), modelled(np, 0.0);
    for (std::size_t c = 0; c < rel.columns(); ++c) {
      if (lp.x[c] == 0.0) continue;
      for (std::size_t t = rel.touch_start[c]; t < rel.touch_start[c + 1]; ++t) {
        const std::size_t k = rel.touch_k[t];
        x[k] += lp.x[c] * rel.touch_w[t];
        if (rel.is_vertex[c]) modelled[k] += lp.x[c] * true_term(s.pairs[k], rel.touch_w[t]);
      }
    }

    // Every relaxation point is a feasible network; polish it and score it exactly.
    std::vector<double> candidate = x;
    if (dir == Direction::Minimize && (sol.node_count <= 64 || sol.node_count % 16 == 0))
      candidate = descend(s, root, std::move(candidate), sol.lp_iterations);
    const double true_key = sense_sign * true_total(s, candidate);
    if (!have_incumbent || true_key < incumbent_key - 1e-9 * std::max(1.0, std::abs(true_key))) {
      have_incumbent = true;
      incumbent_z = canonical_z(problem, s, candidate);
      incumbent_key = sense_sign * linear_objective(problem, incumbent_z);
    }

    const double slack = incumbent_key - key;
    if (slack <= 1e-9 * std::max(1.0, std::abs(incumbent_key))) continue;

    if (dir != Direction::Minimize) continue;  // the concave maximum is exact at every node

    // Entries whose model underestimates the true cost at x, worst first. Concavity makes
    // the gap non-negative and zero unless the entry's box straddles its equity.
    std::vector<std::pair<double, std::size_t>> candidates;
    const double exact_tol = 1e-12 * std::max(1.0, std::abs(key));
    for (std::size_t k = 0; k < np; ++k) {
      const Pair& q = s.pairs[k];
      const double lo = box.lo[k], hi = box.hi[k];
      if (!(lo < q.e && hi > q.e)) continue;
      const double model =
          rel.plain[k] ? q.slope * lo + secant_slope(q, lo, hi) * (x[k] - lo) : modelled[k];
      const double under = true_term(q, x[k]) - model;
      if (under > exact_tol) candidates.emplace_back(under, k);
    }
    if (candidates.empty()) continue;  // relaxation is exact at this node
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    // Reduced-cost tightening on entries with their own column: moving one by t costs at
    // least |d| t in this subtree.
    Changes inherited = node.changes;
    const double margin = 1e-9 * s.scale;
    for (std::size_t c = 0; c < rel.columns(); ++c) {
      if (rel.is_vertex[c] || rel.touch_start[c + 1] - rel.touch_start[c] != 1) continue;
      const std::size_t k = rel.touch_k[rel.touch_start[c]];
      const double d = lp.reduced_cost[c];
      double lo = box.lo[k], hi = box.hi[k];
      if (d > 0.0 && lp.x[c] <= lo) hi = std::min(hi, lo + slack / d + margin);
      else if (d < 0.0 && lp.x[c] >= hi) lo = std::max(lo, hi - slack / -d - margin);
      else continue;
      if (hi < box.hi[k] - margin || lo > box.lo[k] + margin)
        inherited = with_change(inherited, static_cast<std::uint32_t>(k), lo, hi);
    }

    // Branch on the entry with the largest model error.
    const std::size_t k = candidates.front().second;
    const Pair& q = s.pairs[k];
    auto basis = std::make_shared<std::vector<std::uint64_t>>();
    for (std::size_t c = 0; c < rel.columns(); ++c)
      if (lp.basic[c]) basis->push_back(rel.key[c]);
    open.push({key, next_id++, with_change(inherited, static_cast<std::uint32_t>(k), box.lo[k], q.e), basis});
    open.push({key, next_id++, with_change(inherited, static_cast<std::uint32_t>(k), q.e, box.hi[k]), basis});
  }

  sol.wall_time = elapsed();
  if (!have_incumbent) {
    sol.status = limit_hit ? SolveStatus::LimitHit : SolveStatus::Infeasible;
    return sol;
  }
  const double best_key = open.empty() ? incumbent_key : std::min(incumbent_key, open.top().key);
  sol.z = std::move(incumbent_z);
  sol.objective = linear_objective(problem, sol.z);
  sol.best_bound = sense_sign * best_key;
  sol.gap = open.empty() ? 0.0 : relative_gap(best_key);
  sol.status = limit_hit ? SolveStatus::LimitHit
               : stopped_on_gap && sol.gap > 0.0 ? SolveStatus::GapReached
                                                 : SolveStatus::Optimal;
  sol.l_star = extract_network(sol.z, problem.n_banks);
  return sol;
}

MilpSolution optimize(const BankingSystem& system, Direction direction, RowSense risk_sense,
                      const SolveOptions& options) {
  const auto problem = presolve(build_problem(system, direction, risk_sense));
  const auto ev = expand_vectors(system);
  const auto z0 = split_network(problem, ev.e_bar, system.liabilities);
  return solve(problem, options, z0);
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapReached: return "gap_reached";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::LimitHit: return "limit_hit";
  }
  return "?";
}

}  // namespace sysrisk
