#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "common.h"
#include "qva/cli.h"

using qva::test::fixture;
namespace cli = qva::cli;

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "qva");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const Invocation& r) { return nlohmann::json::parse(r.out); }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST(Cli, ValidateAcceptsAndRejects) {
  EXPECT_EQ(run({"validate", fixture("sl2-affine")}).code, 0);
  const Invocation bad = run({"validate", fixture("sl2-mutated")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(parse(bad)["status"], "fail");
}

TEST(Cli, HalfCurrentQybToOrderEight) {
  const Invocation r = run({"check-qyb", fixture("sl2-halfcurrent"), "--order", "8"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(parse(r)["command"]["params"]["order"], 8);
}

TEST(Cli, ProbeReportsTheKernelWitness) {
  const Invocation r = run({"probe-z", fixture("cx-derivation"), "--n", "2", "--level", "2"});
  EXPECT_EQ(r.code, 1);
  const auto j = parse(r);
  ASSERT_EQ(j["checks"].size(), 1u);
  const auto& w = j["checks"][0]["witnesses"];
  ASSERT_FALSE(w.empty());
  EXPECT_EQ(w[0],
            "Z((1/1) t (x) 1 (x) (x1-x2)^-1 + (-1/1) 1 (x) t (x) (x1-x2)^-1 + (-1/1) 1 (x) 1 (x) 1) = 0  [closed form, "
            "verified]");
}

TEST(Cli, SuiteExitCodes) {
  EXPECT_EQ(run({"run-suite", fixture("heisenberg-rank1")}).code, 0);
  const Invocation zf = run({"run-suite", fixture("zf-nilpotent")});
  EXPECT_EQ(zf.code, 0);
  bool saw_gr = false;
  const auto zj = parse(zf);
  for (const auto& c : zj["checks"])
    if (c["name"] == "gr-dims") {
      saw_gr = true;
      EXPECT_EQ(c["status"], "pass");
    }
  EXPECT_TRUE(saw_gr);
  // an invalid spec stops the suite at validation
  const Invocation bad = run({"run-suite", fixture("sl2-mutated")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(parse(bad)["checks"].size(), 1u);
  EXPECT_EQ(parse(bad)["checks"][0]["name"], "validate");
}

TEST(Cli, UsageErrorsExitThree) {
  EXPECT_EQ(run({"no-such-verb", fixture("sl2-affine")}).code, 3);
  EXPECT_EQ(run({"validate", "/nonexistent/spec.alg"}).code, 3);
  EXPECT_EQ(run({"check-qyb", fixture("sl2-affine"), "--order", "x"}).code, 3);
  EXPECT_EQ(run({"find-slocality", fixture("sl2-affine"), "--a", "zz"}).code, 3);
}

TEST(Cli, ReportsAreByteStable) {
  const std::vector<std::string> args{"check-relations", fixture("heisenberg-rank1"), "--level", "2", "--window", "2"};
  const Invocation a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(parse(a).count("timings"), 0u);
}

TEST(Cli, OutFileHasTheSameBytes) {
  const auto path = (std::filesystem::temp_directory_path() / "qva_cli_out_test.json").string();
  const Invocation r = run({"gr-dims", fixture("heisenberg-rank1"), "--out", path});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(slurp(path), r.out);
  std::filesystem::remove(path);
}

TEST(Cli, TimingsAreOptIn) {
  const Invocation r = run({"gr-dims", fixture("heisenberg-rank1"), "--timings"});
  EXPECT_EQ(parse(r).count("timings"), 1u);
}

TEST(Cli, DefaultWindowFromTheEnvironment) {
  ::setenv("QVA_DEFAULT_WINDOW", "2", 1);
  const Invocation r = run({"check-relations", fixture("heisenberg-rank1"), "--level", "1"});
  ::unsetenv("QVA_DEFAULT_WINDOW");
  EXPECT_EQ(parse(r)["command"]["params"]["window"], 2);
  EXPECT_EQ(cli::default_window(), 4);
  // an explicit flag wins
  ::setenv("QVA_DEFAULT_WINDOW", "2", 1);
  const Invocation f = run({"check-relations", fixture("heisenberg-rank1"), "--level", "1", "--window", "3"});
  ::unsetenv("QVA_DEFAULT_WINDOW");
  EXPECT_EQ(parse(f)["command"]["params"]["window"], 3);
}

TEST(Cli, SpecHash) {
  EXPECT_EQ(cli::fnv1a64(""), "cbf29ce484222325");
  EXPECT_EQ(cli::fnv1a64("a"), "af63dc4c8601ec8c");
  const Invocation r = run({"validate", fixture("sl2-affine")});
  EXPECT_EQ(parse(r)["spec"]["hash"], "fnv1a64:" + cli::fnv1a64(slurp(fixture("sl2-affine"))));
}

TEST(Cli, EveryVerbRunsOnHeisenberg) {
  for (const auto& verb : cli::verbs()) {
    if (verb == "run-suite") continue;
    const Invocation r = run({verb, fixture("heisenberg-rank1")});
    EXPECT_TRUE(r.code == 0 || r.code == 2) << verb << " " << r.code << " " << r.err;
    EXPECT_EQ(parse(r)["command"]["verb"], verb);
  }
}
