#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kCli = CORRGEN_CLI;
const std::string kFixtures = CORRGEN_FIXTURES;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("corrgen_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }
  static std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

  CliRun run(const std::string& args, const std::string& env = "") const {
    const std::string err_file = tmp("stderr.txt");
    const std::string cmd = env + " '" + kCli + "' " + args + " 2> '" + err_file + "'";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_file);
    return r;
  }

  // Last stdout line as JSON.
  static Json last_json(const std::string& out) {
    std::istringstream in(out);
    std::string line, last;
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    return Json::parse(last);
  }

  std::string generate_cylinder(const std::string& extra = "") const {
    return "generate --cloud " + fixture("cylinder.csv") + " --path " + fixture("straight.json") +
           " --wrapper-radius 2 --degree 3 --out " + tmp("c.json") + " " + extra;
  }

 private:
  fs::path dir_;
};

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_F(CliTest, GenerateWritesReportAndCorridor) {
  const CliRun r = run(generate_cylinder("--mesh " + tmp("c.obj")));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json rep = last_json(r.out);
  for (const char* key : {"status", "dim", "degree", "formulation", "objective", "volume", "solve_ms", "assembly_ms",
                          "constraints", "points", "min_point_value", "iterations", "out"}) {
    EXPECT_TRUE(rep.contains(key)) << key;
  }
  EXPECT_EQ(rep["status"], "optimal");
  EXPECT_NEAR(rep["volume"].get<double>(), M_PI, 0.02 * M_PI);
  const Json corridor = Json::parse(slurp(tmp("c.json")));
  EXPECT_EQ(corridor["dim"], 3);
  EXPECT_EQ(corridor["basis"], "chebyshev");
  EXPECT_EQ(corridor["e11"].size(), 4u);
  EXPECT_TRUE(fs::exists(tmp("c.obj")));
}

TEST_F(CliTest, GenerateInputErrors) {
  CliRun r = run("generate --cloud " + fixture("cylinder.csv") + " --path " + fixture("straight.json") +
              " --degree 3 --out " + tmp("c.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--wrapper-radius"), std::string::npos) << r.err;
  r = run("generate --cloud " + tmp("missing.csv") + " --path " + fixture("straight.json") +
          " --wrapper-radius 2 --out " + tmp("c.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.csv"), std::string::npos) << r.err;
  r = run("generate --cloud " + fixture("cylinder.csv") + " --path " + fixture("straight.json") +
          " --wrapper-radius 2 --degree 30 --samples 100 --out " + tmp("c.json"));
  EXPECT_EQ(r.code, 1);
  r = run("frobnicate");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, SweepRowCounts) {
  const std::string base = "sweep --cloud " + fixture("mixed.csv") + " --path " + fixture("mixed_path.json") +
                           " --wrapper-radius 2 --jobs 4 --out ";
  CliRun r = run(base + tmp("s.csv") + " --degrees 3:25");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(tmp("s.csv"));
  EXPECT_EQ(count_lines(csv), 47u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "degree,formulation,volume,solve_ms,assembly_ms,constraints");
  EXPECT_EQ(csv.find("nan"), std::string::npos);
  r = run(base + tmp("one.csv") + " --degrees 5:5");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(slurp(tmp("one.csv"))), 3u);
  EXPECT_EQ(run(base + tmp("bad.csv") + " --degrees 5:3").code, 1);
}

TEST_F(CliTest, CheckClosedLoopAndViolation) {
  ASSERT_EQ(run(generate_cylinder()).code, 0);
  CliRun r = run("check --corridor " + tmp("c.json") + " --cloud " + fixture("cylinder.csv"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(last_json(r.out)["violations"], 0);

  std::ofstream(tmp("bad.csv")) << slurp(fixture("cylinder.csv")) << "0.5,0,0\n";
  r = run("check --corridor " + tmp("c.json") + " --cloud " + tmp("bad.csv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(last_json(r.out)["violations"], 1);

  r = run("check --corridor " + tmp("c.json") + " --cloud " + fixture("channel.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("dimension"), std::string::npos) << r.err;
}

TEST_F(CliTest, PlanarGenerateAndCheck) {
  CliRun r = run("generate --dim 2 --cloud " + fixture("channel.csv") + " --path " + fixture("channel_path.json") +
              " --degree 9 --out " + tmp("p.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(last_json(r.out)["volume"].get<double>(), 0.8, 1e-4);
  r = run("check --corridor " + tmp("p.json") + " --cloud " + fixture("channel.csv"));
  EXPECT_EQ(r.code, 0) << r.err;
  r = run("check --corridor " + tmp("p.json") + " --cloud " + fixture("cylinder.csv"));
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, SynthIsDeterministic) {
  CliRun r = run("synth --kind cylinder --out-cloud " + tmp("a.csv") + " --out-path " + tmp("a.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(last_json(r.out)["points"], 3200);
  EXPECT_EQ(count_lines(slurp(tmp("a.csv"))), 3201u);
  ASSERT_EQ(run("synth --kind mixed --seed 9 --out-cloud " + tmp("m1.csv")).code, 0);
  ASSERT_EQ(run("synth --kind mixed --seed 9 --out-cloud " + tmp("m2.csv")).code, 0);
  EXPECT_EQ(slurp(tmp("m1.csv")), slurp(tmp("m2.csv")));
  ASSERT_EQ(run("synth --kind mixed --seed 9 --binary --out-cloud " + tmp("m.bin")).code, 0);
  EXPECT_EQ(slurp(tmp("m.bin")).substr(0, 8), "CRGNPCD1");
  EXPECT_EQ(run("synth --kind forest --out-cloud " + tmp("f.csv")).code, 1);
}

TEST_F(CliTest, ExportMesh) {
  ASSERT_EQ(run(generate_cylinder()).code, 0);
  const CliRun r = run("export --corridor " + tmp("c.json") + " --out " + tmp("m.obj") + " --stations 10 --ring 12");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string obj = slurp(tmp("m.obj"));
  std::size_t v = 0, f = 0;
  std::istringstream in(obj);
  for (std::string line; std::getline(in, line);) {
    v += line.rfind("v ", 0) == 0;
    f += line.rfind("f ", 0) == 0;
  }
  EXPECT_EQ(v, 120u);
  EXPECT_EQ(f, 2u * 9u * 12u);
  EXPECT_EQ(run("export --corridor " + tmp("missing.json") + " --out " + tmp("m.obj")).code, 1);
}

TEST_F(CliTest, SolverToleranceOverride) {
  CliRun r = run(generate_cylinder(), "CORRGEN_SOLVER_TOL=1e-4");
  ASSERT_EQ(r.code, 0) << r.err;
  const double loose = last_json(r.out)["gap_bound"].get<double>();
  r = run(generate_cylinder());
  ASSERT_EQ(r.code, 0) << r.err;
  const double tight = last_json(r.out)["gap_bound"].get<double>();
  EXPECT_LE(tight, loose);
  EXPECT_EQ(run(generate_cylinder(), "CORRGEN_SOLVER_TOL=abc").code, 1);
}
