#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plap/cli.hpp"

using namespace plap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("plap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(path("square.json")) << R"({"kind":"polygon","vertices":[[0,0],[1,0],[1,1],[0,1]]})";
    std::ofstream(path("tri.json")) << R"({"kind":"polygon","vertices":[[0,0],[1,0],[0,1]]})";
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  Outcome run(std::vector<std::string> args, const std::string& manifest = "manifest.json") {
    args.insert(args.begin(), {"plap", "--manifest", path(manifest)});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  json load(const std::string& name) const { return json::parse(io::read_file(path(name))); }

  fs::path dir;
};

}  // namespace

TEST_F(CliTest, RadialEigenPrintsLambda) {
  const Outcome r = run({"radial", "--task", "eigen", "--p", "2", "--out", path("prof.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(r.out), 2.891592, 1e-5);
  EXPECT_TRUE(fs::exists(path("prof.csv")));
}

TEST_F(CliTest, CheegerReport) {
  const Outcome r = run({"cheeger", "--domain", path("square.json"), "--report", path("c.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json c = load("c.json");
  EXPECT_NEAR(c["h"].get<double>(), (4.0 - std::numbers::pi) / (2.0 - std::sqrt(std::numbers::pi)), 1e-6);
  EXPECT_NEAR(c["r"].get<double>() * c["h"].get<double>(), 1.0, 1e-9);
  EXPECT_TRUE(c["innerPolygon"].is_object());
}

TEST_F(CliTest, ConfigurationErrorsExitTwo) {
  EXPECT_EQ(run({"solve", "--domain", path("square.json")}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"solve", "--domain", path("nope.json"), "--out", path("u.csv")}).code, 2);
  std::ofstream(path("bad.json")) << R"({"kind":"disc","radius":1})";
  const Outcome r = run({"cheeger", "--domain", path("bad.json"), "--report", path("c.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("domain.center"), std::string::npos);
  EXPECT_EQ(run({"reproduce", "--figure", "fig9", "--out-dir", path("out")}).code, 2);
  EXPECT_EQ(run({"solve", "--domain", path("square.json"), "--out", path("u.csv"), "--p", "1", "--grid", "16"}).code, 2);
}

TEST_F(CliTest, NumericalFailureExitsOne) {
  auto g = build_grid(Domain::unit_square(), 16);
  io::write_field_csv(path("zero.csv"), ScalarField(g));
  const Outcome r = run({"flow", "--domain", path("square.json"), "--grid", "16", "--init", "file", "--init-file",
                     path("zero.csv"), "--trace", path("t.csv"), "--report", path("f.json"), "--tEnd", "0.05"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(load("f.json").contains("error"));
  EXPECT_EQ(load("manifest.json")["exitCode"], 1);
}

TEST_F(CliTest, SolveWritesFieldAndManifest) {
  const Outcome r = run({"solve", "--problem", "torsion", "--p", "2", "--domain", path("square.json"), "--grid", "16",
                     "--out", path("u.csv"), "--report", path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto back = io::read_field_csv(path("u.csv"), build_grid(Domain::unit_square(), 16));
  EXPECT_GT(back.max(), 0.05);
  EXPECT_TRUE(load("s.json").contains("supGap"));
  const json m = load("manifest.json");
  EXPECT_EQ(m["subcommand"], "solve");
  EXPECT_EQ(m["exitCode"], 0);
  EXPECT_EQ(m["config"]["grid"], "16");
  EXPECT_EQ(m["config"]["problem"], "torsion");
  ASSERT_EQ(m["inputs"].size(), 1u);
  EXPECT_EQ(m["inputs"][0]["sha256"], io::sha256_hex(io::read_file(path("square.json"))));
  EXPECT_EQ(m["artifacts"].size(), 2u);
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(m["argv"].is_array());
}

TEST_F(CliTest, RunsAreDeterministic) {
  auto once = [&](const std::string& tag) {
    const Outcome r = run({"--seed", "7", "eigen", "--type", "neumann", "--p", "4", "--domain", path("square.json"),
                       "--grid", "16", "--out", path(tag + ".csv"), "--report", path(tag + ".json")});
    EXPECT_EQ(r.code, 0) << r.err;
    return io::read_file(path(tag + ".csv"));
  };
  EXPECT_EQ(once("a"), once("b"));
  EXPECT_EQ(load("a.json"), load("b.json"));
}

TEST_F(CliTest, ReplayReproducesArtifacts) {
  const Outcome r = run({"solve", "--problem", "harmonic", "--data", "aronsson", "--p", "6", "--domain",
                     path("square.json"), "--grid", "16", "--out", path("u.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string first = io::read_file(path("u.csv"));
  fs::copy_file(path("manifest.json"), path("saved.json"));
  fs::remove(path("u.csv"));
  EXPECT_EQ(run({"replay", path("saved.json")}, "replay_manifest.json").code, 0);
  EXPECT_EQ(io::read_file(path("u.csv")), first);
  std::ofstream(path("broken.json")) << "{}";
  EXPECT_EQ(run({"replay", path("broken.json")}).code, 2);
}

TEST_F(CliTest, CheckCases) {
  ASSERT_EQ(run({"check", "--case", "kink", "--lambda", "1", "--report", path("k.json")}).code, 0);
  EXPECT_TRUE(load("k.json")["pass"].get<bool>());
  ASSERT_EQ(run({"check", "--case", "kink", "--lambda", "0.5", "--report", path("k.json")}).code, 0);
  EXPECT_FALSE(load("k.json")["pass"].get<bool>());
  ASSERT_EQ(run({"check", "--case", "neumann-limit", "--lambda", "1", "--report", path("n.json")}).code, 0);
  EXPECT_TRUE(load("n.json")["fits"].get<bool>());
  ASSERT_EQ(run({"check", "--case", "neumann-limit", "--lambda", "0.7071067811865476", "--report", path("n.json")}).code, 0);
  EXPECT_FALSE(load("n.json")["fits"].get<bool>());
}

TEST_F(CliTest, SweepReportsTargets) {
  const Outcome r = run({"sweep", "--problem", "dirichlet", "--p-list", "2,4", "--domain", path("square.json"), "--grid",
                     "16", "--report", path("w.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json w = load("w.json");
  ASSERT_EQ(w["entries"].size(), 2u);
  EXPECT_NEAR(w["entries"][0]["target"].get<double>(), 2.0, 1e-12);
  EXPECT_EQ(run({"sweep", "--problem", "dirichlet", "--p-list", "2,x", "--domain", path("square.json"), "--report",
                 path("w.json")}).code, 2);
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }
