#include "sysrisk.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "sysrisk/contagion.hpp"
#include "sysrisk/io.hpp"
#include "sysrisk/milp_solver.hpp"
#include "sysrisk/mps.hpp"
#include "sysrisk/pipeline.hpp"
#include "sysrisk/synth.hpp"

struct sysrisk_system {
  sysrisk::BankingSystem value;
};

struct sysrisk_solution {
  sysrisk::BankingSystem system;
  sysrisk::MilpSolution value;
};

namespace {

thread_local std::string g_last_error;

sysrisk_status fail(sysrisk_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body, translating exceptions into status codes.
template <class F>
sysrisk_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const sysrisk::ValidationError& e) {
    return fail(SYSRISK_VALIDATION_ERROR, e.what());
  } catch (const sysrisk::ParseError& e) {
    return fail(SYSRISK_PARSE_ERROR, e.what());
  } catch (const sysrisk::SolverError& e) {
    return fail(SYSRISK_SOLVER_ERROR, e.what());
  } catch (const sysrisk::IoError& e) {
    return fail(SYSRISK_IO_ERROR, e.what());
  } catch (const sysrisk::Error& e) {
    return fail(SYSRISK_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SYSRISK_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(SYSRISK_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(SYSRISK_INTERNAL_ERROR, "unknown failure");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sysrisk::SolveOptions solve_options(const sysrisk_solve_options* o) {
  sysrisk::SolveOptions s;
  if (!o) return s;
  s.gap_tolerance = o->gap_tolerance;
  s.time_limit_seconds = o->time_limit_seconds;
  s.node_limit = static_cast<std::size_t>(o->node_limit);
  s.deterministic_tie_breaking = o->deterministic_tie_breaking != 0;
  return s;
}

sysrisk::RowSense risk_sense(sysrisk_risk_sense s) {
  return s == SYSRISK_RISK_GREATER_EQUAL ? sysrisk::RowSense::GreaterEqual : sysrisk::RowSense::Equal;
}

sysrisk::AssortativityConvention convention(sysrisk_assortativity c) {
  switch (c) {
    case SYSRISK_ASSORT_SOURCE_IN_TARGET_OUT: return sysrisk::AssortativityConvention::SourceInTargetOut;
    case SYSRISK_ASSORT_TOTAL_DEGREE: return sysrisk::AssortativityConvention::TotalDegree;
    default: return sysrisk::AssortativityConvention::SourceOutTargetIn;
  }
}

#define REQUIRE(cond, what) \
  if (!(cond)) return fail(SYSRISK_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* sysrisk_last_error(void) { return g_last_error.c_str(); }

const char* sysrisk_status_name(sysrisk_status status) {
  switch (status) {
    case SYSRISK_OK: return "ok";
    case SYSRISK_INVALID_ARGUMENT: return "invalid argument";
    case SYSRISK_PARSE_ERROR: return "parse error";
    case SYSRISK_VALIDATION_ERROR: return "validation error";
    case SYSRISK_SOLVER_ERROR: return "solver error";
    case SYSRISK_IO_ERROR: return "i/o error";
    case SYSRISK_INTERNAL_ERROR: return "internal error";
  }
  return "unknown";
}

void sysrisk_string_free(char* text) { std::free(text); }

sysrisk_status sysrisk_system_create(size_t n, const double* equity, const double* liabilities,
                                     const double* kappa, const char* const* ids, sysrisk_system** out) {
  REQUIRE(out && equity && liabilities, "null argument");
  *out = nullptr;
  return guarded([&] {
    sysrisk::SquareMatrix l(n);
    std::copy(liabilities, liabilities + n * n, l.values().begin());
    std::vector<double> k;
    if (kappa) k.assign(kappa, kappa + n);
    auto system = sysrisk::make_system(std::vector<double>(equity, equity + n), std::move(l), std::move(k));
    if (ids) {
      for (size_t i = 0; i < n; ++i) {
        if (!ids[i]) throw sysrisk::Error("null bank id");
        system.bank_ids[i] = ids[i];
      }
    }
    sysrisk::require_valid(system);
    *out = new sysrisk_system{std::move(system)};
    return SYSRISK_OK;
  });
}

sysrisk_status sysrisk_system_load_csv(const char* banks_path, const char* exposures_path, sysrisk_system** out) {
  REQUIRE(out && banks_path && exposures_path, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new sysrisk_system{sysrisk::load_network(banks_path, exposures_path)};
    return SYSRISK_OK;
  });
}

sysrisk_status sysrisk_system_save_csv(const sysrisk_system* system, const char* banks_path,
                                       const char* exposures_path) {
  REQUIRE(system && banks_path && exposures_path, "null argument");
  return guarded([&] {
    sysrisk::save_network(system->value, banks_path, exposures_path);
    return SYSRISK_OK;
  });
}

void sysrisk_system_destroy(sysrisk_system* system) { delete system; }

size_t sysrisk_system_size(const sysrisk_system* system) { return system ? system->value.size() : 0; }

const char* sysrisk_system_bank_id(const sysrisk_system* system, size_t i) {
  if (!system || i >= system->value.size()) return nullptr;
  return system->value.bank_ids[i].c_str();
}

sysrisk_status sysrisk_system_liabilities(const sysrisk_system* system, double* out) {
  REQUIRE(system && out, "null argument");
  const auto v = system->value.liabilities.values();
  std::copy(v.begin(), v.end(), out);
  return SYSRISK_OK;
}

sysrisk_status sysrisk_validate(const sysrisk_system* system, char** report) {
  REQUIRE(system, "null argument");
  if (report) *report = nullptr;
  return guarded([&] {
    const auto r = sysrisk::validate(system->value);
    std::string text;
    for (const auto& v : r.violations) text += v.message + "\n";
    if (report) *report = copy_string(text);
    if (r.ok()) return SYSRISK_OK;
    return fail(SYSRISK_VALIDATION_ERROR, r.violations.front().message);
  });
}

sysrisk_status sysrisk_debtrank(const sysrisk_system* system, double* out) {
  REQUIRE(system && out, "null argument");
  return guarded([&] {
    sysrisk::require_valid(system->value);
    const auto r = sysrisk::debtrank_all(system->value);
    std::copy(r.begin(), r.end(), out);
    return SYSRISK_OK;
  });
}

sysrisk_status sysrisk_debtrank2(const sysrisk_system* system, double epsilon, double* out, int* converged) {
  REQUIRE(system && out, "null argument");
  return guarded([&] {
    sysrisk::require_valid(system->value);
    sysrisk::DebtRank2Options o;
    if (epsilon > 0.0) o.epsilon = epsilon;
    const auto r = sysrisk::debtrank2_all(system->value, o);
    bool all = true;
    for (size_t i = 0; i < r.size(); ++i) {
      out[i] = r[i].value;
      all = all && r[i].converged;
    }
    if (converged) *converged = all ? 1 : 0;
    return SYSRISK_OK;
  });
}

sysrisk_status sysrisk_direct_impact(const sysrisk_system* system, double* out) {
  REQUIRE(system && out, "null argument");
  return guarded([&] {
    sysrisk::require_valid(system->value);
    const auto r = sysrisk::direct_impact(system->value);
    std::copy(r.begin(), r.end(), out);
    return SYSRISK_OK;
  });
}

void sysrisk_solve_options_init(sysrisk_solve_options* options) {
  if (!options) return;
  const sysrisk::SolveOptions d;
  options->gap_tolerance = d.gap_tolerance;
  options->time_limit_seconds = d.time_limit_seconds;
  options->node_limit = d.node_limit;
  options->deterministic_tie_breaking = d.deterministic_tie_breaking ? 1 : 0;
  options->risk_sense = SYSRISK_RISK_EQUAL;
}

sysrisk_status sysrisk_optimize(const sysrisk_system* system, sysrisk_direction direction,
                                const sysrisk_solve_options* options, sysrisk_solution** out) {
  REQUIRE(system && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto dir = direction == SYSRISK_MAXIMIZE ? sysrisk::Direction::Maximize : sysrisk::Direction::Minimize;
    const auto sense = options ? risk_sense(options->risk_sense) : sysrisk::RowSense::Equal;
    auto sol = sysrisk::optimize(system->value, dir, sense, solve_options(options));
    *out = new sysrisk_solution{system->value, std::move(sol)};
    return SYSRISK_OK;
  });
}

void sysrisk_solution_destroy(sysrisk_solution* solution) { delete solution; }

sysrisk_solve_status sysrisk_solution_status(const sysrisk_solution* s) {
  if (!s) return SYSRISK_SOLVE_INFEASIBLE;
  switch (s->value.status) {
    case sysrisk::SolveStatus::Optimal: return SYSRISK_SOLVE_OPTIMAL;
    case sysrisk::SolveStatus::GapReached: return SYSRISK_SOLVE_GAP_REACHED;
    case sysrisk::SolveStatus::Infeasible: return SYSRISK_SOLVE_INFEASIBLE;
    case sysrisk::SolveStatus::LimitHit: return SYSRISK_SOLVE_LIMIT_HIT;
  }
  return SYSRISK_SOLVE_INFEASIBLE;
}

int sysrisk_solution_has_network(const sysrisk_solution* s) { return s && s->value.has_solution() ? 1 : 0; }
double sysrisk_solution_objective(const sysrisk_solution* s) { return s ? s->value.objective : 0.0; }
double sysrisk_solution_best_bound(const sysrisk_solution* s) { return s ? s->value.best_bound : 0.0; }
double sysrisk_solution_gap(const sysrisk_solution* s) { return s ? s->value.gap : 0.0; }
uint64_t sysrisk_solution_nodes(const sysrisk_solution* s) { return s ? s->value.node_count : 0; }

sysrisk_status sysrisk_solution_liabilities(const sysrisk_solution* s, double* out) {
  REQUIRE(s && out, "null argument");
  if (!s->value.has_solution()) return fail(SYSRISK_SOLVER_ERROR, "solution holds no network");
  const auto v = s->value.l_star.values();
  std::copy(v.begin(), v.end(), out);
  return SYSRISK_OK;
}

sysrisk_status sysrisk_solution_system(const sysrisk_solution* s, sysrisk_system** out) {
  REQUIRE(s && out, "null argument");
  *out = nullptr;
  if (!s->value.has_solution()) return fail(SYSRISK_SOLVER_ERROR, "solution holds no network");
  return guarded([&] {
    *out = new sysrisk_system{sysrisk::with_liabilities(s->system, s->value.l_star)};
    return SYSRISK_OK;
  });
}

sysrisk_status sysrisk_metrics_json(const sysrisk_system* system, double threshold_coverage,
                                    sysrisk_assortativity conv, char** json) {
  REQUIRE(system && json, "null argument");
  *json = nullptr;
  return guarded([&] {
    *json = copy_string(sysrisk::metrics_json(system->value, threshold_coverage, convention(conv)));
    return SYSRISK_OK;
  });
}

sysrisk_status sysrisk_export_mps(const sysrisk_system* system, sysrisk_direction direction,
                                  sysrisk_risk_sense sense, char** mps) {
  REQUIRE(system && mps, "null argument");
  *mps = nullptr;
  return guarded([&] {
    const auto dir = direction == SYSRISK_MAXIMIZE ? sysrisk::Direction::Maximize : sysrisk::Direction::Minimize;
    *mps = copy_string(sysrisk::export_mps(sysrisk::presolve(sysrisk::build_problem(system->value, dir, risk_sense(sense)))));
    return SYSRISK_OK;
  });
}

void sysrisk_synth_options_init(sysrisk_synth_options* o) {
  if (!o) return;
  const sysrisk::SynthParams d;
  o->n = d.n;
  o->density = d.target_density;
  o->uniform_weights = 0;
  o->weight_a = d.weight_mu;
  o->weight_b = d.weight_sigma;
  o->lognormal_equity = 0;
  o->equity_a = d.equity_fraction;
  o->equity_b = d.equity_sigma;
  o->leverage_kappa = 0;
  o->seed = d.seed;
}

sysrisk_status sysrisk_generate(const sysrisk_synth_options* o, sysrisk_system** out) {
  REQUIRE(o && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    sysrisk::SynthParams p;
    p.n = o->n;
    p.target_density = o->density;
    if (o->uniform_weights) {
      p.weights = sysrisk::WeightDistribution::Uniform;
      p.weight_lo = o->weight_a;
      p.weight_hi = o->weight_b;
    } else {
      p.weight_mu = o->weight_a;
      p.weight_sigma = o->weight_b;
    }
    if (o->lognormal_equity) {
      p.equity = sysrisk::EquityRule::LogNormal;
      p.equity_mu = o->equity_a;
      p.equity_sigma = o->equity_b;
    } else {
      p.equity_fraction = o->equity_a;
    }
    p.kappa = o->leverage_kappa ? sysrisk::KappaRule::Leverage : sysrisk::KappaRule::Constant;
    p.seed = o->seed;
    *out = new sysrisk_system{sysrisk::generate(p)};
    return SYSRISK_OK;
  });
}

void sysrisk_pipeline_options_init(sysrisk_pipeline_options* o) {
  if (!o) return;
  const sysrisk::PipelineOptions d;
  sysrisk_solve_options_init(&o->solve);
  o->threshold_coverage = d.threshold_coverage;
  o->debtrank2_epsilon = d.debtrank2.epsilon;
  o->convention = SYSRISK_ASSORT_SOURCE_OUT_TARGET_IN;
  o->include_timings = 0;
  o->run_label = nullptr;
}

sysrisk_status sysrisk_pipeline(const sysrisk_system* system, const sysrisk_pipeline_options* o, char** json,
                                char** long_csv) {
  REQUIRE(system, "null argument");
  if (json) *json = nullptr;
  if (long_csv) *long_csv = nullptr;
  return guarded([&] {
    sysrisk::PipelineOptions p;
    if (o) {
      p.solve = solve_options(&o->solve);
      p.risk_sense = risk_sense(o->solve.risk_sense);
      p.threshold_coverage = o->threshold_coverage;
      if (o->debtrank2_epsilon > 0.0) p.debtrank2.epsilon = o->debtrank2_epsilon;
      p.convention = convention(o->convention);
      p.include_timings = o->include_timings != 0;
      if (o->run_label) p.run_label = o->run_label;
    }
    for (char c : p.run_label)
      if (c == ',' || c == '\n' || c == '\r' || c == '"') throw sysrisk::Error("run label may not contain , \" or newlines");
    const auto report = sysrisk::run_pipeline(system->value, p);
    std::unique_ptr<char, decltype(&std::free)> j(json ? copy_string(sysrisk::report_json(report)) : nullptr, &std::free);
    char* csv = long_csv ? copy_string(sysrisk::report_long_csv(report)) : nullptr;
    if (json) *json = j.release();
    if (long_csv) *long_csv = csv;
    return SYSRISK_OK;
  });
}

}  // extern "C"
