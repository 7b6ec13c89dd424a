#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "support.hpp"
#include "sysrisk/io.hpp"
#include "sysrisk/pipeline.hpp"
#include "sysrisk/synth.hpp"

using namespace sysrisk;
using doctest::Approx;
using nlohmann::json;

namespace {

BankingSystem family(double t) {
  SquareMatrix l(3);
  l(0, 1) = t;
  l(0, 2) = 6 - t;
  l(1, 0) = 6 - t;
  l(1, 2) = t;
  l(2, 0) = t;
  l(2, 1) = 6 - t;
  return make_system({4, 4, 4}, l);
}

}  // namespace

TEST_CASE("three-bank family: impact falls from 1.5 to 1.0") {
  const auto r = run_pipeline(family(3));
  CHECK(r.networks.at("empirical").objective == Approx(27));
  CHECK(r.networks.at("minimized").objective == Approx(18));
  CHECK(r.networks.at("maximized").objective == Approx(27));
  CHECK(r.networks.at("empirical").risk.direct_impact_total == Approx(1.5));
  CHECK(r.networks.at("minimized").risk.direct_impact_total == Approx(1.0));
  REQUIRE(r.impact_reduction_factor.has_value());
  CHECK(*r.impact_reduction_factor == Approx(1.5));
  REQUIRE(r.reduction_factor.has_value());
  CHECK(r.sandwich_holds);
  CHECK(r.networks.at("minimized").topology.links == 3);
}

TEST_CASE("empty market: every measure is zero and no factor is reported") {
  const auto r = run_pipeline(make_system({1, 1, 1}, SquareMatrix(3)));
  for (const auto& [name, n] : r.networks) {
    CHECK(n.risk.debtrank_total == 0.0);
    CHECK(n.risk.direct_impact_total == 0.0);
    CHECK(n.objective == 0.0);
  }
  CHECK_FALSE(r.reduction_factor.has_value());
  CHECK_FALSE(r.impact_reduction_factor.has_value());
  const auto doc = json::parse(report_json(r));
  CHECK(doc["reduction_factor"].is_null());
}

TEST_CASE("report document carries the schema tag and the sandwich") {
  SynthParams p;
  p.n = 6;
  p.seed = 5;
  const auto s = generate(p);
  const auto r = run_pipeline(s);
  const auto doc = json::parse(report_json(r));
  CHECK(doc["schema"] == kReportSchema);
  CHECK(doc["input_digest"] == input_digest(s));
  CHECK(doc["n_banks"] == 6);
  for (const char* name : {"empirical", "minimized", "maximized", "thresholded"}) {
    REQUIRE(doc["networks"].contains(name));
    CHECK(doc["networks"][name]["liabilities"].size() == 6);
  }
  const auto& sw = doc["objective_sandwich"];
  CHECK(sw["minimized"].get<double>() <= sw["empirical"].get<double>() + 1e-9);
  CHECK(sw["empirical"].get<double>() <= sw["maximized"].get<double>() + 1e-9);
  CHECK(sw["holds"] == true);
  CHECK_FALSE(doc["solver"]["minimize"].contains("wall_time_seconds"));
}

TEST_CASE("timings appear only on request") {
  PipelineOptions opt;
  opt.include_timings = true;
  const auto doc = json::parse(report_json(run_pipeline(family(2), opt)));
  CHECK(doc["solver"]["minimize"].contains("wall_time_seconds"));
}

TEST_CASE("reports are reproducible") {
  SynthParams p;
  p.n = 7;
  p.seed = 8;
  const auto s = generate(p);
  CHECK(report_json(run_pipeline(s)) == report_json(run_pipeline(s)));
  CHECK(report_long_csv(run_pipeline(s)) == report_long_csv(run_pipeline(s)));
}

TEST_CASE("long CSV lists every network") {
  const auto csv = report_long_csv(run_pipeline(family(3)));
  CHECK(csv.rfind("run,network_type,metric,value\n", 0) == 0);
  for (const char* name : {"empirical", "minimized", "maximized", "thresholded"})
    CHECK(csv.find(std::string("run,") + name + ",debtrank_total,") != std::string::npos);
  CHECK(csv.find("run,system,impact_reduction_factor,1.5") != std::string::npos);
}

TEST_CASE("metrics document covers empirical and thresholded networks") {
  const auto doc = json::parse(metrics_json(family(3), 0.9));
  CHECK(doc["networks"].contains("empirical"));
  CHECK(doc["networks"].contains("thresholded"));
}
