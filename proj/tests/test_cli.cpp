#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>
#include <sys/wait.h>

#include "hypersack/semilinear.hpp"

using namespace hypersack;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs the installed binary with stderr folded into stdout so report
// lines are visible to the assertions too.
RunResult run(const std::string& args) {
  std::string cmd = std::string(HYPERSACK_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data_path(const std::string& rel) {
  return std::string(HYPERSACK_DATA_DIR) + "/" + rel;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("decide answers yes with a verified witness and no otherwise") {
  auto yes = run("decide -g F2 -e \"[a b a^-1]^x a b^-5 a^-1\"");
  CHECK(yes.exit_code == 0);
  CHECK(contains(yes.out, "yes"));
  CHECK(contains(yes.out, "x=5"));

  auto no = run("decide -g F2 -e \"a^x b\"");
  CHECK(no.exit_code == 1);
  CHECK(contains(no.out, "no"));
}

TEST_CASE("decide can be pinned to either route") {
  auto a = run("decide --route a -g Z -e \"a^x a^-4\"");
  auto b = run("decide --route b --bound 6 -g Z -e \"a^x a^-4\"");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(contains(b.out, "x=4"));

  // The bounded route also handles instances the solver declines: in the
  // free product below, a b has infinite order.
  std::string fp_group = "-g \"(Z/2) * finite:z2b.table\" --tables " +
                         data_path("tables");
  auto fp = run("decide --route b --bound 5 " + fp_group +
                " -e \"[a b]^x b a b a\"");
  CHECK(fp.exit_code == 0);
  CHECK(contains(fp.out, "x=2"));

  auto unsupported = run("decide " + fp_group + " -e \"[a b]^x b a b a\"");
  CHECK(unsupported.exit_code == 2);
}

TEST_CASE("solve prints a set that reparses to the same thing") {
  auto r = run("solve -g Z -e \"a^x a^y a^-7\"");
  CHECK(r.exit_code == 0);
  auto set = SemilinearSet::from_text(r.out);
  CHECK(set.vars() == std::vector<std::string>{"x", "y"});
  CHECK(set.member({{"x", 3}, {"y", 4}}));
  CHECK_FALSE(set.member({{"x", 3}, {"y", 3}}));

  auto empty = run("solve -g F2 -e \"a^x b\"");
  CHECK(empty.exit_code == 1);
}

TEST_CASE("oracle lists box solutions in lexicographic order") {
  auto r = run("oracle -g Z --box 6 -e \"a^x a^y a^-4\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "x=0,y=4\nx=1,y=3\nx=2,y=2\nx=3,y=1\nx=4,y=0\n");

  auto none = run("oracle -g Z --box 3 -e \"a^x a^-9\"");
  CHECK(none.exit_code == 1);
}

TEST_CASE("system conjoins equations over shared variables") {
  auto r = run(
      "system -g Z -e \"a^x a^y a^-5\" -e \"a^x [a^-1]^y a^-1\"");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "sat"));
  CHECK(contains(r.out, "x=3,y=2"));

  auto u = run("system -g Z -e \"a^x a^-1\" -e \"a^x a^-2\"");
  CHECK(u.exit_code == 1);
  CHECK(contains(u.out, "unsat"));
}

TEST_CASE("nfa-member and parikh consume the shipped JSON examples") {
  auto member =
      run("nfa-member -g F2 --nfa " + data_path("nfa/cancel_pair.json"));
  CHECK(member.exit_code == 0);
  CHECK(contains(member.out, "yes"));

  auto parikh = run("parikh --nfa " + data_path("nfa/count_ladder.json"));
  CHECK(parikh.exit_code == 0);
  auto set = SemilinearSet::from_text(parikh.out);
  CHECK(set.member({{"x", 1}, {"y", 1}}));
  CHECK(set.member({{"x", 1}, {"y", 4}}));
  CHECK(set.member({{"x", 0}, {"y", 2}}));
  CHECK_FALSE(set.member({{"x", 1}, {"y", 0}}));
  CHECK_FALSE(set.member({{"x", 2}, {"y", 2}}));
}

TEST_CASE("bench runs a corpus file and reports per-instance verdicts") {
  auto r = run("bench --corpus " + data_path("corpus/torsion.corpus"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "verdict=ok"));
  CHECK_FALSE(contains(r.out, "MISMATCH"));
}

TEST_CASE("reports go to stderr as single-line JSON") {
  auto r = run("decide --report -g Z -e \"a^x a^-3\"");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "\"answer\":\"yes\""));
  CHECK(contains(r.out, "\"witness\":{\"x\":3}"));
  CHECK(contains(r.out, "\"timings_ms\""));
}

TEST_CASE("usage errors and bad input exit with status 2") {
  CHECK(run("decide -g Z").exit_code == 2);          // missing expression
  CHECK(run("decide -e \"a^x\"").exit_code == 2);    // missing group
  CHECK(run("solve -g Z -e \"a^\"").exit_code == 2); // parse failure
  CHECK(run("frobnicate").exit_code == 2);           // unknown subcommand
  CHECK(run("parikh --nfa no_such.json").exit_code == 2);
}
