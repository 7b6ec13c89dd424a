// Runs the command-line tool as a subprocess and checks outputs and exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SYSRISK_CLI_PATH
#error "SYSRISK_CLI_PATH must name the command-line tool"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SYSRISK_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("sysrisk_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string at(const char* name) const { return "\"" + (dir / name).string() + "\""; }
  std::string inputs() const { return "--banks " + at("banks.csv") + " --exposures " + at("exposures.csv"); }
  void write(const char* name, const std::string& text) const { std::ofstream(dir / name) << text; }
};

void chain(const Workspace& w) {
  w.write("banks.csv", "bank_id,equity\nA,10\nB,10\nC,10\n");
  w.write("exposures.csv", "debtor_id,creditor_id,amount\nA,B,5\nB,C,5\n");
}

}  // namespace

TEST_CASE("validate accepts a well-formed network and rejects a self-loop with exit code 2") {
  Workspace w;
  chain(w);
  const auto ok = cli("validate " + w.inputs());
  CHECK(ok.code == 0);
  CHECK(ok.out == "ok: 3 banks\n");
  w.write("exposures.csv", "debtor_id,creditor_id,amount\nA,A,5\n");
  CHECK(cli("validate " + w.inputs()).code == 2);
  w.write("banks.csv", "bank_id,equity\nA,-1\n");
  w.write("exposures.csv", "debtor_id,creditor_id,amount\n");
  CHECK(cli("validate " + w.inputs()).code == 2);
}

TEST_CASE("usage and missing files give exit code 1") {
  Workspace w;
  CHECK(cli("").code == 1);
  CHECK(cli("no-such-command").code == 1);
  CHECK(cli("validate --banks " + w.at("none.csv") + " --exposures " + w.at("none2.csv")).code == 1);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("debtrank prints per-bank values and a total row") {
  Workspace w;
  chain(w);
  const auto r = cli("debtrank " + w.inputs());
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "bank_id,debtrank,direct_impact\n"
        "A,0.375,0.25\n"
        "B,0.25,0.25\n"
        "C,0,0\n"
        "TOTAL,0.625,0.5\n");
  const auto r2 = cli("debtrank --variant dr2 " + w.inputs());
  REQUIRE(r2.code == 0);
  CHECK(r2.out.rfind("bank_id,debtrank2,direct_impact\nA,0.375", 0) == 0);
  CHECK(cli("debtrank --variant other " + w.inputs()).code == 1);
}

TEST_CASE("optimize finds both extremes of the three-bank ring and writes the network") {
  Workspace w;
  w.write("banks.csv", "bank_id,equity\nA,4\nB,4\nC,4\n");
  w.write("exposures.csv", "debtor_id,creditor_id,amount\nA,B,2\nA,C,4\nB,A,4\nB,C,2\nC,A,2\nC,B,4\n");
  const auto mn = cli("optimize --direction min --out-banks " + w.at("ob.csv") + " --out-exposures " +
                      w.at("oe.csv") + " " + w.inputs());
  REQUIRE(mn.code == 0);
  CHECK(mn.out.find("status: optimal\nobjective: 18\n") == 0);
  const auto links = slurp(w.dir / "oe.csv");
  int lines = 0;
  for (char c : links) lines += c == '\n';
  CHECK(lines == 4);  // header and three links
  const auto mx = cli("optimize --direction max --risk-sense geq " + w.inputs());
  REQUIRE(mx.code == 0);
  CHECK(mx.out.find("objective: 27\n") != std::string::npos);
  CHECK(cli("optimize --direction sideways " + w.inputs()).code == 1);
}

TEST_CASE("gen-synth, metrics, export-mps and pipeline work end to end") {
  Workspace w;
  REQUIRE(cli("gen-synth --n 6 --density 0.5 --seed 3 --out-banks " + w.at("banks.csv") + " --out-exposures " +
              w.at("exposures.csv"))
              .code == 0);
  const auto first = slurp(w.dir / "exposures.csv");
  REQUIRE(cli("gen-synth --n 6 --density 0.5 --seed 3 --out-banks " + w.at("b2.csv") + " --out-exposures " +
              w.at("e2.csv"))
              .code == 0);
  CHECK(first == slurp(w.dir / "e2.csv"));
  CHECK(cli("gen-synth --n 6 --density 2 --out-banks " + w.at("x.csv") + " --out-exposures " + w.at("y.csv")).code ==
        1);

  const auto m = cli("metrics " + w.inputs());
  REQUIRE(m.code == 0);
  CHECK(m.out.find("\"thresholded\"") != std::string::npos);

  const auto mps = cli("export-mps --direction max " + w.inputs());
  REQUIRE(mps.code == 0);
  CHECK(mps.out.find("OBJSENSE") != std::string::npos);
  CHECK(mps.out.find("ENDATA") != std::string::npos);

  const auto p1 = cli("pipeline --label t " + w.inputs());
  const auto p2 = cli("pipeline --label t " + w.inputs() + " --long-csv " + w.at("long.csv"));
  REQUIRE(p1.code == 0);
  REQUIRE(p2.code == 0);
  CHECK(p1.out == p2.out);
  CHECK(p1.out.find("\"schema\": \"sysrisk-report/1\"") != std::string::npos);
  CHECK(slurp(w.dir / "long.csv").rfind("run,network_type,metric,value\nt,", 0) == 0);
}
