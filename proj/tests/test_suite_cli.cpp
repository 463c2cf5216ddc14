#include <sys/wait.h>

#include <cstdio>
#include <string>

#include "baire/suite.hpp"
#include "doctest.h"

using namespace baire;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(CLI_BINARY) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("property suite is deterministic per seed and passes") {
  SuiteReport a = run_suite(42, 25);
  SuiteReport b = run_suite(42, 25);
  CHECK(a.all_ok());
  for (const SuiteCheck& c : a.checks) {
    INFO(c.module, "/", c.name);
    CHECK(c.failures == 0);
  }
  nlohmann::json ja = a, jb = b;
  CHECK(ja.dump() == jb.dump());

  SuiteReport c = run_suite(7, 25);
  nlohmann::json jc = c;
  CHECK(ja.dump() != jc.dump());
  CHECK(c.all_ok());
}

TEST_CASE("cli: suite output is byte-identical for a fixed seed") {
  RunResult first = run_cli("suite --seed 42 --trials 10");
  RunResult second = run_cli("suite --seed 42 --trials 10");
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(!first.out.empty());
  nlohmann::json j = nlohmann::json::parse(first.out);
  CHECK(j.at("all_ok") == true);
  CHECK(j.at("seed") == 42);
}

TEST_CASE("cli: classification of the narrow cylinder") {
  RunResult r = run_cli("classify --tree cylinder:0 --depth 5 --width 5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("laver: confirmed-at-depth") != std::string::npos);
  CHECK(r.out.find("complete-laver: refuted") != std::string::npos);

  RunResult j = run_cli("--json classify --tree cylinder:0 --depth 5 --width 5");
  nlohmann::json parsed = nlohmann::json::parse(j.out);
  CHECK(parsed.at("verdicts").size() == 6);
}

TEST_CASE("cli: fusion certificates and exit codes") {
  RunResult r = run_cli("fuse --tree full --mode miller --stages 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("retention") != std::string::npos);

  RunResult g = run_cli("--json gdelta --tree full --mode miller --stages 3");
  CHECK(g.exit_code == 0);
  nlohmann::json parsed = nlohmann::json::parse(g.out);
  CHECK(parsed.at("all_hold") == true);

  // a tree refuting the requested mode is an invocation failure, not a parse error
  RunResult bad = run_cli("fuse --tree bounded:2 --mode miller --stages 2");
  CHECK(bad.exit_code == 1);
}

TEST_CASE("cli: oracle witnesses") {
  RunResult r = run_cli("oracle avoid --tree full --kind complete-laver --set cylinder:0");
  CHECK(r.exit_code == 0);
  nlohmann::json parsed = nlohmann::json::parse(r.out);
  CHECK(parsed.at("outcome") == "disjoint-witness");

  RunResult ex = run_cli("oracle avoid --tree cylinder:0 --kind laver --set cylinder:0");
  CHECK(ex.exit_code == 1);
}

TEST_CASE("cli: parse failures exit with 2") {
  CHECK(run_cli("classify --depth nonsense").exit_code == 2);
  CHECK(run_cli("mystery-subcommand").exit_code == 2);
  CHECK(run_cli("classify --tree not-a-recipe").exit_code == 2);
  CHECK(run_cli("oracle avoid --set 'basic:oops'").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli: exact rationals by default, approximations on request") {
  RunResult exact = run_cli("sumset --part 0:1/8 --part 1/2:5/8");
  CHECK(exact.exit_code == 0);
  CHECK(exact.out.find("1/4") != std::string::npos);
  CHECK(exact.out.find("0.25") == std::string::npos);

  RunResult approx = run_cli("--decimal sumset --part 0:1/8 --part 1/2:5/8");
  CHECK(approx.out.find("approx") != std::string::npos);
  CHECK(approx.out.find("0.250000") != std::string::npos);

  RunResult summed = run_cli("--json sumset --part 0:1/8 --part 1/2:5/8 --add 0:1/8");
  nlohmann::json parsed = nlohmann::json::parse(summed.out);
  CHECK(parsed.at("sum_measure") == "1/2");
}

TEST_CASE("cli: embeddings dominate their selectors") {
  RunResult r = run_cli("--json embed --selector '(3,1,4)'");
  CHECK(r.exit_code == 0);
  nlohmann::json parsed = nlohmann::json::parse(r.out);
  CHECK(parsed.at("dominates") == true);
  CHECK(parsed.at("image").size() == 3);

  RunResult ad = run_cli("adtree --depth 2 --width 2 --selector '(1,2,0)' --selector '(1,3,0)'");
  CHECK(ad.exit_code == 0);
  nlohmann::json window = nlohmann::json::parse(ad.out);
  CHECK(window.at("window").at("nodes").size() == 7);
  CHECK(window.at("ed_matrix")[0].at("agreements") == 1);
}
