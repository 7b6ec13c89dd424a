#include "sysrisk/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace sysrisk {

namespace {

constexpr double kPivotTolerance = 1e-11;
constexpr int kDegenerateStreakForBland = 50;
constexpr long kRefactorInterval = 64;
constexpr std::size_t kPricingSegment = 256;

enum class RunResult { Optimal, Unbounded, IterationLimit };

// Bounded-variable revised simplex on sparse columns with an explicit dense basis inverse.
class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const LpOptions& options) : lp_(lp), opt_(options) {
    m_ = lp.n_rows;
    n_ = lp.n_cols;
    if (lp.cost.size() != n_ || lp.lower.size() != n_ || lp.upper.size() != n_ ||
        lp.sense.size() != m_ || lp.rhs.size() != m_)
      throw Error("linear program has inconsistent dimensions");
    for (std::size_t j = 0; j < n_; ++j) {
      if (!std::isfinite(lp.lower[j])) throw Error("linear program needs finite lower bounds");
      if (lp.upper[j] < lp.lower[j]) infeasible_bounds_ = true;
    }
    setup();
  }

  LpSolution solve() {
    if (infeasible_bounds_) {
      LpSolution out;
      out.status = LpStatus::Infeasible;
      out.diagnostic = "empty variable bounds";
      return out;
    }
    limit_ = opt_.iteration_limit > 0 ? opt_.iteration_limit
                                      : static_cast<long>(50 * (m_ + nt_) + 1000);

    // Phase I: minimise the sum of artificials.
    if (n_art_ > 0) {
      std::vector<double> phase1(nt_, 0.0);
      for (std::size_t j = art_begin_; j < nt_; ++j) phase1[j] = 1.0;
      const auto r = run(phase1, false);
      if (r == RunResult::IterationLimit) return finish(LpStatus::IterationLimit, "phase I iteration limit");
      refactor();
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= art_begin_) infeas += std::abs(beta_[i]);
      }
      if (infeas > 1e-7 * (1.0 + rhs_scale_)) {
        return finish(LpStatus::Infeasible, "phase I ended with infeasibility " + std::to_string(infeas));
      }
      for (std::size_t j = art_begin_; j < nt_; ++j) hi_[j] = 0.0;
      drive_out_artificials();
    }

    cost2_.assign(nt_, 0.0);
    std::copy(lp_.cost.begin(), lp_.cost.end(), cost2_.begin());
    const auto r = run(cost2_, true);
    if (r == RunResult::Unbounded) return finish(LpStatus::Unbounded, "objective unbounded");
    if (r == RunResult::IterationLimit) return finish(LpStatus::IterationLimit, "phase II iteration limit");
    refactor();
    return finish(LpStatus::Optimal, "");
  }

 private:
  double& inv(std::size_t i, std::size_t k) { return binv_[i * m_ + k]; }

  void setup() {
    std::vector<long> slack_of(m_, -1);
    std::size_t n_slack = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp_.sense[i] != RowSense::Equal) slack_of[i] = static_cast<long>(n_ + n_slack++);
    }
    const std::size_t w = n_ + n_slack;

    // Structural columns in compressed form, duplicates summed.
    for (const auto& e : lp_.entries) {
      if (e.row >= m_ || e.col >= n_) throw Error("linear program entry out of range");
    }
    auto by_column = [](const Triplet& a, const Triplet& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    };
    std::vector<Triplet> resorted;
    const std::vector<Triplet>* entries = &lp_.entries;
    if (!std::is_sorted(lp_.entries.begin(), lp_.entries.end(), by_column)) {
      resorted = lp_.entries;
      std::sort(resorted.begin(), resorted.end(), by_column);
      entries = &resorted;
    }
    const std::vector<Triplet>& sorted = *entries;
    std::vector<std::size_t> start(n_ + 1, 0);
    std::vector<std::size_t> rows;
    std::vector<double> vals;
    rows.reserve(sorted.size());
    vals.reserve(sorted.size());
    for (std::size_t p = 0; p < sorted.size(); ++p) {
      const auto& e = sorted[p];
      if (p > 0 && sorted[p - 1].col == e.col && sorted[p - 1].row == e.row) {
        vals.back() += e.value;
      } else {
        rows.push_back(e.row);
        vals.push_back(e.value);
      }
      start[e.col + 1] = rows.size();
    }
    for (std::size_t j = 0; j < n_; ++j) start[j + 1] = std::max(start[j + 1], start[j]);

    std::vector<double> resid(lp_.rhs);
    rhs_scale_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) rhs_scale_ = std::max(rhs_scale_, std::abs(lp_.rhs[i]));
    for (std::size_t j = 0; j < n_; ++j) {
      const double x0 = lp_.lower[j];
      if (x0 == 0.0) continue;
      for (std::size_t p = start[j]; p < start[j + 1]; ++p) resid[rows[p]] -= vals[p] * x0;
    }

    // Starting basis: preferred columns when they give a point inside their bounds, then per
    // row a slack that absorbs what is left with the right sign, else an artificial.
    std::vector<double> sign(m_, 1.0);
    std::vector<long> basic_col(m_, -1);
    std::vector<double> left(resid);
    const bool crashed = crash(start, rows, vals, resid, basic_col, left);
    n_art_ = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basic_col[i] >= 0) continue;
      if (lp_.sense[i] == RowSense::LessEqual && left[i] >= 0.0) {
        basic_col[i] = slack_of[i];
      } else if (lp_.sense[i] == RowSense::GreaterEqual && left[i] <= 0.0) {
        basic_col[i] = slack_of[i];
        sign[i] = -1.0;
      } else {
        sign[i] = left[i] >= 0.0 ? 1.0 : -1.0;
        ++n_art_;
      }
    }
    art_begin_ = w;
    nt_ = w + n_art_;

    cstart_.assign(nt_ + 1, 0);
    crow_.clear();
    cval_.clear();
    crow_.reserve(rows.size() + n_slack + n_art_);
    cval_.reserve(rows.size() + n_slack + n_art_);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t p = start[j]; p < start[j + 1]; ++p) {
        if (vals[p] == 0.0) continue;
        crow_.push_back(rows[p]);
        cval_.push_back(sign[rows[p]] * vals[p]);
      }
      cstart_[j + 1] = crow_.size();
    }
    std::vector<std::size_t> slack_row(n_slack);
    for (std::size_t i = 0; i < m_; ++i)
      if (slack_of[i] >= 0) slack_row[static_cast<std::size_t>(slack_of[i]) - n_] = i;
    for (std::size_t s = 0; s < n_slack; ++s) {
      const std::size_t i = slack_row[s];
      crow_.push_back(i);
      cval_.push_back(sign[i] * (lp_.sense[i] == RowSense::LessEqual ? 1.0 : -1.0));
      cstart_[n_ + s + 1] = crow_.size();
    }
    std::size_t next_art = art_begin_;
    std::vector<std::size_t> art_row;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basic_col[i] < 0) {
        basic_col[i] = static_cast<long>(next_art++);
        art_row.push_back(i);
      }
    }
    for (std::size_t a = 0; a < n_art_; ++a) {
      crow_.push_back(art_row[a]);
      cval_.push_back(1.0);
      cstart_[art_begin_ + a + 1] = crow_.size();
    }

    b_.resize(m_);
    beta_.resize(m_);
    basis_.resize(m_);
    lo_.assign(nt_, 0.0);
    hi_.assign(nt_, kInfinity);
    at_upper_.assign(nt_, 0);
    is_basic_.assign(nt_, 0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp_.lower[j];
      hi_[j] = lp_.upper[j];
    }
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      b_[i] = sign[i] * lp_.rhs[i];
      basis_[i] = static_cast<std::size_t>(basic_col[i]);
      is_basic_[basis_[i]] = 1;
      beta_[i] = sign[i] * resid[i];
      inv(i, i) = 1.0;
    }
    if (crashed) refactor();
  }

  // Tries to start from the preferred structural columns: picks an independent subset by
  // elimination, one row each, and keeps it if the basic solution respects their bounds.
  // Columns that land outside are dropped and the rest retried a few times. On success
  // basic_col names each chosen column's row and left holds what the other rows must absorb.
  bool crash(const std::vector<std::size_t>& start, const std::vector<std::size_t>& rows,
             const std::vector<double>& vals, const std::vector<double>& resid, std::vector<long>& basic_col,
             std::vector<double>& left) {
    std::vector<std::size_t> cand;
    std::vector<char> seen(n_, 0);
    for (std::size_t j : opt_.preferred) {
      if (j >= n_ || seen[j] || !(lp_.lower[j] < lp_.upper[j])) continue;
      seen[j] = 1;
      cand.push_back(j);
    }
    const double ftol = opt_.feasibility_tolerance * (1.0 + rhs_scale_);
    for (int round = 0; round < 4 && !cand.empty(); ++round) {
      std::vector<std::size_t> chosen, piv_row;
      std::vector<std::vector<double>> reduced_cols;
      std::vector<char> taken(m_, 0);
      for (std::size_t j : cand) {
        std::vector<double> c(m_, 0.0);
        double scale = 0.0;
        for (std::size_t p = start[j]; p < start[j + 1]; ++p) {
          c[rows[p]] += vals[p];
          scale = std::max(scale, std::abs(vals[p]));
        }
        if (scale == 0.0) continue;
        for (std::size_t t = 0; t < chosen.size(); ++t) {
          const double f = c[piv_row[t]];
          if (f == 0.0) continue;
          for (std::size_t i = 0; i < m_; ++i) c[i] -= f * reduced_cols[t][i];
        }
        std::size_t r = m_;
        for (std::size_t i = 0; i < m_; ++i)
          if (!taken[i] && (r == m_ || std::abs(c[i]) > std::abs(c[r]))) r = i;
        if (r == m_ || std::abs(c[r]) <= 1e-7 * scale) continue;
        const double pv = c[r];
        for (double& v : c) v /= pv;
        taken[r] = 1;
        chosen.push_back(j);
        piv_row.push_back(r);
        reduced_cols.push_back(std::move(c));
      }
      if (chosen.empty()) return false;

      // B d = resid with the chosen columns in their rows and unit columns elsewhere.
      std::vector<double> bm(m_ * m_, 0.0);
      std::vector<long> slot_col(m_, -1);
      for (std::size_t t = 0; t < chosen.size(); ++t) slot_col[piv_row[t]] = static_cast<long>(chosen[t]);
      for (std::size_t k = 0; k < m_; ++k) {
        if (slot_col[k] < 0) {
          bm[k * m_ + k] = 1.0;
          continue;
        }
        const auto j = static_cast<std::size_t>(slot_col[k]);
        for (std::size_t p = start[j]; p < start[j + 1]; ++p) bm[rows[p] * m_ + k] += vals[p];
      }
      std::vector<double> d(resid);
      if (!dense_solve(bm, d)) return false;
      std::vector<char> drop(n_, 0);
      bool fits = true;
      for (std::size_t k = 0; k < m_; ++k) {
        if (slot_col[k] < 0) continue;
        const auto j = static_cast<std::size_t>(slot_col[k]);
        if (d[k] < -ftol || lp_.lower[j] + d[k] > lp_.upper[j] + ftol) {
          drop[j] = 1;
          fits = false;
        }
      }
      if (fits) {
        for (std::size_t k = 0; k < m_; ++k) {
          basic_col[k] = slot_col[k];
          left[k] = slot_col[k] < 0 ? d[k] : 0.0;
        }
        return true;
      }
      std::vector<std::size_t> kept;
      for (std::size_t j : chosen)
        if (!drop[j]) kept.push_back(j);
      cand = std::move(kept);
    }
    return false;
  }

  // Solves a x = rhs in place for a dense m x m matrix; false when singular.
  bool dense_solve(std::vector<double> a, std::vector<double>& x) const {
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      for (std::size_t i = col + 1; i < m_; ++i)
        if (std::abs(a[i * m_ + col]) > std::abs(a[piv * m_ + col])) piv = i;
      if (std::abs(a[piv * m_ + col]) < 1e-13) return false;
      if (piv != col) {
        std::swap_ranges(a.begin() + piv * m_, a.begin() + (piv + 1) * m_, a.begin() + col * m_);
        std::swap(x[piv], x[col]);
      }
      const double p = a[col * m_ + col];
      for (std::size_t i = col + 1; i < m_; ++i) {
        const double f = a[i * m_ + col] / p;
        if (f == 0.0) continue;
        for (std::size_t k = col; k < m_; ++k) a[i * m_ + k] -= f * a[col * m_ + k];
        x[i] -= f * x[col];
      }
    }
    for (std::size_t col = m_; col-- > 0;) {
      double acc = x[col];
      for (std::size_t k = col + 1; k < m_; ++k) acc -= a[col * m_ + k] * x[k];
      x[col] = acc / a[col * m_ + col];
    }
    return true;
  }

  double nonbasic_value(std::size_t j) const { return at_upper_[j] ? hi_[j] : lo_[j]; }

  // y = c_B' B^-1.
  void duals(const std::vector<double>& cost, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[k];
    }
  }

  double reduced(const std::vector<double>& cost, const std::vector<double>& y, std::size_t j) const {
    double d = cost[j];
    for (std::size_t p = cstart_[j]; p < cstart_[j + 1]; ++p) d -= y[crow_[p]] * cval_[p];
    return d;
  }

  // alpha = B^-1 A_q.
  void column(std::size_t q, std::vector<double>& alpha) const {
    alpha.assign(m_, 0.0);
    for (std::size_t p = cstart_[q]; p < cstart_[q + 1]; ++p) {
      const std::size_t r = crow_[p];
      const double v = cval_[p];
      for (std::size_t i = 0; i < m_; ++i) alpha[i] += binv_[i * m_ + r] * v;
    }
  }

  RunResult run(const std::vector<double>& cost, bool phase2) {
    const double otol = opt_.optimality_tolerance;
    const double ftol = opt_.feasibility_tolerance;
    int degenerate_streak = 0;
    bool bland = false;
    long since_refactor = 0;
    std::vector<double> y, alpha;
    while (true) {
      if (iterations_ >= limit_) return RunResult::IterationLimit;
      if (since_refactor >= kRefactorInterval) {
        refactor();
        since_refactor = 0;
      }

      duals(cost, y);
      // Partial pricing: scan segments from where the last search stopped and take the best
      // candidate of the first segment that has one. Bland's rule scans everything in order.
      long enter = -1;
      double best = 0.0;
      if (!bland) {
        for (std::size_t j : opt_.preferred) {
          if (j >= n_ || is_basic_[j] || lo_[j] == hi_[j]) continue;
          const double d = reduced(cost, y, j);
          const double score = !at_upper_[j] ? -d : d;
          if (score > otol && score > best) {
            best = score;
            enter = static_cast<long>(j);
          }
        }
      }
      const std::size_t segment = bland ? nt_ : std::max<std::size_t>(kPricingSegment, nt_ / 8);
      std::size_t scanned = 0;
      std::size_t j = bland ? 0 : price_start_ % std::max<std::size_t>(nt_, 1);
      while (scanned < nt_ && enter < 0) {
        const std::size_t stop = std::min(nt_, scanned + segment);
        for (; scanned < stop; ++scanned, j = j + 1 == nt_ ? 0 : j + 1) {
          if (is_basic_[j] || lo_[j] == hi_[j]) continue;
          if (phase2 && j >= art_begin_) continue;
          const double d = reduced(cost, y, j);
          double score = 0.0;
          if (!at_upper_[j] && d < -otol) score = -d;
          else if (at_upper_[j] && d > otol) score = d;
          if (score <= 0.0) continue;
          if (bland) {
            enter = static_cast<long>(j);
            break;
          }
          if (score > best) {
            best = score;
            enter = static_cast<long>(j);
          }
        }
      }
      price_start_ = j;
      if (enter < 0) return RunResult::Optimal;
      const std::size_t q = static_cast<std::size_t>(enter);
      const double sigma = at_upper_[q] ? -1.0 : 1.0;
      column(q, alpha);

      // Harris two-pass ratio test.
      double harris = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) < kPivotTolerance) continue;
        const double rate = -sigma * alpha[i];
        const std::size_t b = basis_[i];
        if (rate < 0.0) {
          harris = std::min(harris, (beta_[i] - lo_[b] + ftol) / -rate);
        } else if (std::isfinite(hi_[b])) {
          harris = std::min(harris, (hi_[b] - beta_[i] + ftol) / rate);
        }
      }
      long leave = -1;
      double theta = kInfinity;
      double best_alpha = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) < kPivotTolerance) continue;
        const double rate = -sigma * alpha[i];
        const std::size_t b = basis_[i];
        double ratio;
        if (rate < 0.0) {
          ratio = (beta_[i] - lo_[b]) / -rate;
        } else if (std::isfinite(hi_[b])) {
          ratio = (hi_[b] - beta_[i]) / rate;
        } else {
          continue;
        }
        if (ratio > harris) continue;
        const bool better = bland ? (leave < 0 || b < basis_[static_cast<std::size_t>(leave)])
                                  : std::abs(alpha[i]) > best_alpha;
        if (better) {
          best_alpha = std::abs(alpha[i]);
          leave = static_cast<long>(i);
          theta = std::max(0.0, ratio);
        }
      }

      const double flip = hi_[q] - lo_[q];
      if (leave < 0 && !std::isfinite(flip)) return RunResult::Unbounded;
      ++iterations_;

      if (flip <= theta) {
        for (std::size_t i = 0; i < m_; ++i) beta_[i] -= sigma * alpha[i] * flip;
        at_upper_[q] = !at_upper_[q];
        degenerate_streak = 0;
        bland = false;
        continue;
      }

      const std::size_t r = static_cast<std::size_t>(leave);
      for (std::size_t i = 0; i < m_; ++i) beta_[i] -= sigma * alpha[i] * theta;
      const double entering_value = nonbasic_value(q) + sigma * theta;
      const std::size_t out = basis_[r];
      at_upper_[out] = -sigma * alpha[r] > 0.0 ? 1 : 0;
      is_basic_[out] = 0;
      pivot(r, q, alpha);
      beta_[r] = entering_value;
      ++since_refactor;

      if (theta <= 1e-12) {
        if (++degenerate_streak > kDegenerateStreakForBland) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }
    }
  }

  // Replaces basis_[r] by q; alpha = B^-1 A_q.
  void pivot(std::size_t r, std::size_t q, const std::vector<double>& alpha) {
    double* row_r = &binv_[r * m_];
    const double p = alpha[r];
    for (std::size_t k = 0; k < m_; ++k) row_r[k] /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || alpha[i] == 0.0) continue;
      const double f = alpha[i];
      double* row_i = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) row_i[k] -= f * row_r[k];
    }
    basis_[r] = q;
    is_basic_[q] = 1;
    at_upper_[q] = 0;
  }

  void drive_out_artificials() {
    std::vector<double> alpha;
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < art_begin_) continue;
      const double* rho = &binv_[r * m_];
      long best = -1;
      double best_abs = 1e-7;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (is_basic_[j]) continue;
        double v = 0.0;
        for (std::size_t p = cstart_[j]; p < cstart_[j + 1]; ++p) v += rho[crow_[p]] * cval_[p];
        if (std::abs(v) > best_abs) {
          best_abs = std::abs(v);
          best = static_cast<long>(j);
        }
      }
      if (best < 0) continue;  // redundant row; the artificial stays basic at zero
      const std::size_t q = static_cast<std::size_t>(best);
      const double value = nonbasic_value(q);
      is_basic_[basis_[r]] = 0;
      at_upper_[basis_[r]] = 0;
      column(q, alpha);
      pivot(r, q, alpha);
      beta_[r] = value;
    }
    refactor();
  }

  // Reinverts the basis and recomputes basic values: B x_B = b - N x_N.
  void refactor() {
    std::vector<double> bm(m_ * m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const std::size_t j = basis_[k];
      for (std::size_t p = cstart_[j]; p < cstart_[j + 1]; ++p) bm[crow_[p] * m_ + k] = cval_[p];
    }
    // Gauss-Jordan with partial pivoting on [B | I].
    std::vector<double> id(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) id[i * m_ + i] = 1.0;
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      double best = std::abs(bm[col * m_ + col]);
      for (std::size_t i = col + 1; i < m_; ++i) {
        if (std::abs(bm[i * m_ + col]) > best) {
          best = std::abs(bm[i * m_ + col]);
          piv = i;
        }
      }
      if (best < 1e-13) return;  // keep the current inverse
      if (piv != col) {
        std::swap_ranges(bm.begin() + piv * m_, bm.begin() + (piv + 1) * m_, bm.begin() + col * m_);
        std::swap_ranges(id.begin() + piv * m_, id.begin() + (piv + 1) * m_, id.begin() + col * m_);
      }
      const double p = bm[col * m_ + col];
      for (std::size_t k = 0; k < m_; ++k) {
        bm[col * m_ + k] /= p;
        id[col * m_ + k] /= p;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == col) continue;
        const double f = bm[i * m_ + col];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          bm[i * m_ + k] -= f * bm[col * m_ + k];
          id[i * m_ + k] -= f * id[col * m_ + k];
        }
      }
    }
    binv_ = std::move(id);
    std::vector<double> rhs(b_);
    for (std::size_t j = 0; j < nt_; ++j) {
      if (is_basic_[j]) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (std::size_t p = cstart_[j]; p < cstart_[j + 1]; ++p) rhs[crow_[p]] -= cval_[p] * v;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m_; ++k) acc += binv_[i * m_ + k] * rhs[k];
      beta_[i] = acc;
    }
  }

  LpSolution finish(LpStatus status, std::string diagnostic) {
    LpSolution out;
    out.status = status;
    out.iterations = iterations_;
    out.diagnostic = std::move(diagnostic);
    out.x.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) out.x[j] = nonbasic_value(j);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) {
        const std::size_t j = basis_[i];
        // Snap round-off back into the box.
        out.x[j] = std::clamp(beta_[i], lo_[j], hi_[j]);
      }
    }
    out.objective = lp_.offset;
    for (std::size_t j = 0; j < n_; ++j) out.objective += lp_.cost[j] * out.x[j];
    if (status == LpStatus::Optimal) {
      std::vector<double> y;
      duals(cost2_, y);
      out.reduced_cost.resize(n_);
      for (std::size_t j = 0; j < n_; ++j) out.reduced_cost[j] = is_basic_[j] ? 0.0 : reduced(cost2_, y, j);
      out.basic.assign(is_basic_.begin(), is_basic_.begin() + static_cast<std::ptrdiff_t>(n_));
    }
    return out;
  }

  const LinearProgram& lp_;
  LpOptions opt_;
  std::size_t m_ = 0, n_ = 0, nt_ = 0, art_begin_ = 0, n_art_ = 0;
  std::vector<std::size_t> cstart_, crow_;
  std::vector<double> cval_;
  std::vector<double> binv_, b_, beta_, lo_, hi_, cost2_;
  std::vector<std::size_t> basis_;
  std::vector<char> at_upper_, is_basic_;
  double rhs_scale_ = 0.0;
  bool infeasible_bounds_ = false;
  long iterations_ = 0;
  long limit_ = 0;
  std::size_t price_start_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  RevisedSimplex simplex(lp, options);
  return simplex.solve();
}

LpSolution solve_lp(const MilpProblem& problem, const LpOptions& options) {
  LinearProgram lp;
  lp.n_cols = problem.n_vars;
  const double sign = problem.direction == Direction::Minimize ? 1.0 : -1.0;
  lp.cost.resize(problem.n_vars);
  for (std::size_t j = 0; j < problem.n_vars; ++j) lp.cost[j] = sign * problem.c[j];
  lp.lower = problem.lower;
  lp.upper = problem.upper;
  for (const auto* block : {&problem.a1, &problem.a2, &problem.a3, &problem.a4}) {
    const std::size_t base = lp.n_rows;
    for (const auto& e : block->entries) lp.entries.push_back({base + e.row, e.col, e.value});
    for (std::size_t r = 0; r < block->rows; ++r) {
      lp.sense.push_back(block->sense);
      lp.rhs.push_back(block->rhs[r]);
    }
    lp.n_rows += block->rows;
  }
  auto sol = solve_lp(lp, options);
  sol.objective *= sign;
  return sol;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

}  // namespace sysrisk
