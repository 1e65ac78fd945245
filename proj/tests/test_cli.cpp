#include "fixtures.hpp"

#include "statcert/cli.hpp"
#include "statcert/report.hpp"

#include <doctest.h>

#include <sstream>

using namespace statcert;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "statcert");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::runCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char *name) { return fixtures::dataPath(name); }

bool has(const std::string &text, const std::string &part) {
  return text.find(part) != std::string::npos;
}

} // namespace

TEST_CASE("check on the degenerate example") {
  auto r = run({"check", "--input", data("degenerate_mpcc.json"), "--concept", "all"});
  CHECK(r.code == 0);
  CHECK(has(r.out, "summary: S:✗  B(oracle):✗  QM:✗  Q:✗  M:✓"));
  CHECK(has(r.out, "multiplier g = (1, 3)"));
}

TEST_CASE("single concepts and partitions") {
  auto m = run({"check", "--input", data("degenerate_mpcc.json"), "--concept", "m"});
  CHECK(m.code == 0);
  CHECK(has(m.out, "summary: M:✓"));
  auto q = run({"check", "--input", data("degenerate_mpcc.json"), "--concept", "q", "--partition",
                "1"});
  CHECK(q.code == 0);
  CHECK(has(q.out, "Q ({1}, {})"));
  CHECK_FALSE(has(q.out, "Q ({}, {1})"));
  auto bad = run({"check", "--input", data("degenerate_mpcc.json"), "--concept", "q",
                  "--partition", "3"});
  CHECK(bad.code == 2);
}

TEST_CASE("JSON output parses back") {
  auto r = run({"check", "--input", data("degenerate_mpcc.json"), "--format", "json"});
  REQUIRE(r.code == 0);
  Report rep = reportFromJson(r.out);
  CHECK(rep.kind == model::ProblemKind::Mpcc);
  CHECK(rep.auditViolations.empty());
  CHECK_FALSE(rep.certificates.empty());
}

TEST_CASE("error exit codes") {
  auto malformed = run({"check", "--input", data("malformed.json")});
  CHECK(malformed.code == 2);
  CHECK(has(malformed.err, "error: "));
  auto infeasible = run({"check", "--input", data("infeasible_mpcc.json")});
  CHECK(infeasible.code == 3);
  CHECK(has(infeasible.err, "pair 1"));
  auto noMultiplier = run({"check", "--input", data("ge_infeasible.json")});
  CHECK(noMultiplier.code == 3);
  CHECK(has(noMultiplier.err, "GeInfeasibleAtPoint"));
  CHECK(run({"check", "--input", data("nonsingular_mpcc.json"), "--cap", "1"}).code == 4);
  CHECK(run({"check", "--input", data("no_such_file.json")}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"qual", "--input", data("degenerate_mpcc.json")}).code == 2);
  CHECK(run({"qual", "--input", data("degenerate_mpcc.json"), "--qual", "thm7"}).code == 2);
}

TEST_CASE("qualification subcommand") {
  auto a3 = run({"qual", "--input", data("nonsingular_mpcc.json"), "--qual", "a3"});
  CHECK(a3.code == 0);
  CHECK(has(a3.out, "a3"));
  CHECK(has(a3.out, "✗"));
  auto cor5 = run({"qual", "--input", data("nonsingular_mpcc.json"), "--qual", "cor5", "--format",
                   "json"});
  REQUIRE(cor5.code == 0);
  auto rep = reportFromJson(cor5.out);
  REQUIRE(rep.qualifications.size() == 2);
  for (const auto &q : rep.qualifications)
    CHECK(q.holds);
  CHECK(run({"qual", "--input", data("degenerate_mpcc.json"), "--qual", "licq"}).code == 0);
  auto thm11 = run({"qual", "--input", data("ge_line_down.json"), "--qual", "thm11"});
  CHECK(thm11.code == 0);
}

TEST_CASE("equation instances with branch data") {
  auto r = run({"check", "--input", data("ge_line_down.json"), "--concept", "qm",
                "--nd-branches", data("ge_line_branches.json")});
  CHECK(r.code == 0);
  CHECK(has(r.out, "summary: QM:✓"));
  auto plain = run({"check", "--input", data("ge_line_down.json"), "--concept", "qm"});
  CHECK(plain.code == 0);
  CHECK(has(plain.out, "QM:unavailable"));
  CHECK(run({"check", "--input", data("ge_line_down.json"), "--concept", "m"}).code == 2);
}

TEST_CASE("oracle and generate subcommands") {
  auto o = run({"oracle", "--input", data("degenerate_mpcc.json")});
  CHECK(o.code == 0);
  CHECK(has(o.out, "descent_direction = (0, 1, 1)"));
  for (const char *kind : {"mpcc", "mpvc", "ge"}) {
    auto a = run({"generate", "--kind", kind, "--seed", "17"});
    auto b = run({"generate", "--kind", kind, "--seed", "17"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(has(a.out, std::string("\"kind\": \"") + kind + "\""));
    CHECK(model::parseInstance(a.out) == model::parseInstance(b.out));
  }
}
