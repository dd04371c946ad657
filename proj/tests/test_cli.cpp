#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "critsat/dimacs.hpp"
#include "critsat/report.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(CRITSAT_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kSamples = CRITSAT_SAMPLES_DIR;

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("critsat_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, SolveIntroFormula) {
  const CliRun r = run("solve " + kSamples + "/intro.cnf");
  EXPECT_EQ(r.code, 10);
  EXPECT_EQ(r.out, "s SATISFIABLE\nv -1 2 3 4 0\n");
}

TEST(Cli, SolveUnsatExitsTwenty) {
  const fs::path p = scratch_dir() / "unsat.cnf";
  critsat::atomic_write(p, "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n");
  const CliRun r = run("solve " + p.string());
  EXPECT_EQ(r.code, 20);
  EXPECT_EQ(r.out, "s UNSATISFIABLE\n");
}

TEST(Cli, GenerateIsReproducible) {
  const CliRun a = run("generate --n 4 --m 5 --k 2 --seed 7");
  const CliRun b = run("generate --n 4 --m 5 --k 2 --seed 7");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const critsat::CnfFormula phi = critsat::parse_dimacs(a.out);
  EXPECT_EQ(phi.n_vars(), 4);
  EXPECT_EQ(phi.size(), 5u);
  EXPECT_NE(a.out, run("generate --n 4 --m 5 --k 2 --seed 8").out);
}

TEST(Cli, SweepWithMissingConfigWritesNothing) {
  const fs::path dir = scratch_dir() / "missing";
  fs::create_directories(dir);
  const CliRun r = run("sweep --config " + (dir / "missing.json").string() + " --out " + (dir / "out.csv").string());
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Cli, SweepFromConfigIsReproducible) {
  const fs::path dir = scratch_dir();
  const std::string base = "sweep --quiet --config " + kSamples + "/sweep_small.json --trials 50 ";
  const CliRun a = run(base + "--out " + (dir / "a.csv").string() + " --plot " + (dir / "a.svg").string());
  const CliRun b = run(base + "--workers 3 --out " + (dir / "b.csv").string());
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(critsat::read_file(dir / "a.csv"), critsat::read_file(dir / "b.csv"));
  const critsat::SweepTable t = critsat::import_csv(dir / "a.csv");
  EXPECT_EQ(t.rows.size(), 12u);  // 2 n values x (baseline + 5 q values)
  EXPECT_TRUE(fs::exists(dir / "a.svg"));
  EXPECT_TRUE(fs::exists(dir / "a.csv.config.json"));
}

TEST(Cli, PropagateEmitsOneLinePerRound) {
  const CliRun r = run("propagate " + kSamples + "/intro.cnf --fix -3");
  EXPECT_EQ(r.code, 0);
  std::vector<nlohmann::json> lines;
  std::size_t start = 0;
  for (auto pos = r.out.find('\n'); pos != std::string::npos; pos = r.out.find('\n', start)) {
    lines.push_back(nlohmann::json::parse(r.out.substr(start, pos - start)));
    start = pos + 1;
  }
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0]["round"], 1);
  EXPECT_EQ(lines.back()["outcome"], "CONTRADICTION");
  EXPECT_EQ(lines.back()["satisfiable"], false);
}

TEST(Cli, TheorySubcommands) {
  const CliRun p = run("probs --n 4 --f 2 --enumerate");
  ASSERT_EQ(p.code, 0);
  const auto j = nlohmann::json::parse(p.out);
  EXPECT_EQ(j["counts"]["m1"], 8);
  EXPECT_EQ(j["probs"]["p0"]["exact"], "1/24");
  const CliRun b = run("budget --n 1000000 --q 0.4");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(nlohmann::json::parse(b.out)["rounds"], 218);
  const CliRun g = run("gw --x0 0 --gen 5 --trials 100");
  ASSERT_EQ(g.code, 0);
  EXPECT_EQ(nlohmann::json::parse(g.out)["survivors"], 0);
}

TEST(Cli, FixAppendsUnits) {
  const CliRun r = run("fix " + kSamples + "/intro.cnf --fix -3,4");
  ASSERT_EQ(r.code, 0);
  const auto body = r.out.substr(r.out.find('\n') + 1);
  const critsat::CnfFormula phi = critsat::parse_dimacs(body);
  EXPECT_EQ(phi.size(), 7u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 64);
  EXPECT_EQ(run("frobnicate").code, 64);
  EXPECT_EQ(run("generate --n 4").code, 64);
  EXPECT_EQ(run("generate --n 1 --m 3").code, 64);
  EXPECT_EQ(run("fix " + kSamples + "/intro.cnf --fix 1,-1").code, 64);
  EXPECT_EQ(run("solve /definitely/not/here.cnf").code, 74);
}

TEST(Cli, HelpForEverySubcommand) {
  for (const char* sub : {"generate", "solve", "fix", "propagate", "probs", "gw", "budget", "sweep", "window",
                          "trajectory", "distcheck"}) {
    const CliRun r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
  EXPECT_EQ(run("--help").code, 0);
}
