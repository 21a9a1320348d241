#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace redattack::cli {
namespace {

namespace fs = std::filesystem;

const std::string kFixtures = REDATTACK_FIXTURE_DIR;

int run_args(std::vector<std::string> args, std::string* out_text = nullptr,
             std::string* err_text = nullptr) {
  args.insert(args.begin(), "red-attack");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("redattack_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Each tag gets its own directory so reports can share a file name.
  std::vector<std::string> attack_args(const std::string& tag) const {
    fs::create_directories(dir_ / tag);
    return {"attack",       "--source",  kFixtures + "/source.pgm",
            "--reference",  kFixtures + "/reference.pgm",
            "--oracle",     "mlp:" + kFixtures + "/pattern_mlp.json",
            "--max-queries", "300",
            "--seed",       "5",
            "--out",        (dir_ / tag / "adv.pgm").string(),
            "--report",     (dir_ / tag / "run.json").string()};
  }

  fs::path dir_;
};

TEST_F(Cli, AttackWritesArtifactsDeterministically) {
  std::string out;
  ASSERT_EQ(run_args(attack_args("a"), &out), 0);
  EXPECT_NE(out.find("succeeded=true"), std::string::npos);
  ASSERT_EQ(run_args(attack_args("b")), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "run.trace.csv"), slurp(dir_ / "b" / "run.trace.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "adv.pgm"), slurp(dir_ / "b" / "adv.pgm"));
  EXPECT_EQ(slurp(dir_ / "a" / "run.json"), slurp(dir_ / "b" / "run.json"));

  const auto doc = nlohmann::json::parse(slurp(dir_ / "a" / "run.json"));
  EXPECT_EQ(doc["queries_used"], 300);
  EXPECT_EQ(doc["config"]["delta_min"], 0.01);
  EXPECT_EQ(doc["config"]["n_pixels"], 20);
  EXPECT_EQ(doc["config"]["theta"], 0.0196);
  EXPECT_EQ(doc["config"]["seed"], 5);
}

TEST_F(Cli, BoundaryAlgorithmAndModes) {
  auto args = attack_args("w");
  args.insert(args.end(), {"--algorithm", "boundary", "--mode", "targeted:1", "--step-orth", "0.02"});
  ASSERT_EQ(run_args(args), 0);
  const auto doc = nlohmann::json::parse(slurp(dir_ / "w" / "run.json"));
  EXPECT_EQ(doc["config"]["algorithm"], "boundary");
  EXPECT_EQ(doc["config"]["mode"], "targeted");
  EXPECT_EQ(doc["config"]["step_orth"], 0.02);
}

TEST_F(Cli, ExitCodes) {
  auto failed = attack_args("f");
  failed[std::find(failed.begin(), failed.end(), "300") - failed.begin()] = "2";
  EXPECT_EQ(run_args(failed), 2);

  std::string err;
  auto same = attack_args("s");
  same[4] = kFixtures + "/source.pgm";  // reference == source class
  EXPECT_EQ(run_args(same, nullptr, &err), 1);
  EXPECT_NE(err.find("label"), std::string::npos);

  EXPECT_EQ(run_args({"attack", "--source", "x.pgm"}), 1);
  EXPECT_EQ(run_args({"bogus"}), 1);
  auto bad_mode = attack_args("m");
  bad_mode.insert(bad_mode.end(), {"--mode", "sideways"});
  EXPECT_EQ(run_args(bad_mode), 1);
  auto bad_oracle = attack_args("o");
  bad_oracle[6] = "onnx:model";
  EXPECT_EQ(run_args(bad_oracle), 1);
}

TEST_F(Cli, SeedFallsBackToEnvironment) {
  auto args = attack_args("e");
  const auto it = std::find(args.begin(), args.end(), "--seed");
  args.erase(it, it + 2);
  ::setenv("RED_ATTACK_SEED", "5", 1);
  ASSERT_EQ(run_args(args), 0);
  ::unsetenv("RED_ATTACK_SEED");
  ASSERT_EQ(run_args(attack_args("ref")), 0);
  EXPECT_EQ(slurp(dir_ / "e" / "run.trace.csv"), slurp(dir_ / "ref" / "run.trace.csv"));
}

TEST_F(Cli, ExternalOracle) {
  const auto one = dir_ / "one.pgm";
  const auto zero = dir_ / "zero.pgm";
  std::ofstream(one, std::ios::binary) << std::string("P5\n2 1\n255\n") + '\xff' + '\x00';
  std::ofstream(zero, std::ios::binary) << std::string("P5\n2 1\n255\n") + '\x00' + '\x00';
  std::string out;
  const int rc = run_args({"attack", "--source", zero.string(), "--reference", one.string(), "--oracle",
                           "exec:python3 " + kFixtures + "/threshold_oracle.py", "--num-classes", "2",
                           "--n-pixels", "1", "--max-queries", "40"},
                          &out);
  EXPECT_EQ(rc, 0);
  EXPECT_NE(out.find("queries=40"), std::string::npos);
}

TEST_F(Cli, SweepGrid) {
  std::string out;
  const int rc = run_args({"sweep", "--source", kFixtures + "/source.pgm", "--reference",
                           kFixtures + "/reference.pgm", "--oracle", "mlp:" + kFixtures + "/pattern_mlp.json",
                           "--n-pixels", "5,20", "--delta-min", "0.01", "--seed", "0,1", "--max-queries",
                           "100", "--out-dir", (dir_ / "grid").string()},
                          &out);
  ASSERT_EQ(rc, 0);
  std::istringstream summary(slurp(dir_ / "grid" / "summary.csv"));
  std::string line;
  std::getline(summary, line);
  EXPECT_EQ(line, "delta_min,n,theta,seed,final_norm,ssim,cc,queries_used,succeeded,trace");
  int rows = 0;
  while (std::getline(summary, line)) ++rows;
  EXPECT_EQ(rows, 4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_TRUE(fs::exists(dir_ / "grid" / ("cell_" + std::to_string(i) + ".trace.csv")));
  }
}

TEST_F(Cli, SweepSingletonMatchesAttack) {
  ASSERT_EQ(run_args({"sweep", "--source", kFixtures + "/source.pgm", "--reference",
                      kFixtures + "/reference.pgm", "--oracle", "mlp:" + kFixtures + "/pattern_mlp.json",
                      "--seed", "5", "--max-queries", "300", "--out-dir", (dir_ / "one").string()}),
            0);
  ASSERT_EQ(run_args(attack_args("single")), 0);
  EXPECT_EQ(slurp(dir_ / "one" / "cell_0.trace.csv"), slurp(dir_ / "single" / "run.trace.csv"));
}

TEST_F(Cli, SweepRejectsEmptyLists) {
  std::string err;
  EXPECT_EQ(run_args({"sweep", "--source", "a", "--reference", "b", "--oracle", "mlp:c", "--theta", "",
                      "--out-dir", dir_.string()},
                     nullptr, &err),
            1);
  EXPECT_NE(err.find("usage"), std::string::npos);
  EXPECT_EQ(run_args({"sweep", "--source", "a", "--reference", "b", "--oracle", "mlp:c", "--n-pixels",
                      "5,,20", "--out-dir", dir_.string()}),
            1);
}

TEST(ParseMode, Grammar) {
  AttackConfig c;
  parse_mode("targeted:3", c);
  EXPECT_EQ(c.mode, AttackMode::kTargeted);
  EXPECT_EQ(c.target, Label{3});
  parse_mode("targeted", c);
  EXPECT_FALSE(c.target.has_value());
  parse_mode("untargeted", c);
  EXPECT_EQ(c.mode, AttackMode::kUntargeted);
  EXPECT_THROW(parse_mode("targeted:x", c), std::invalid_argument);
  EXPECT_THROW(parse_mode("targetedx", c), std::invalid_argument);
  EXPECT_EQ(parse_real_list("0.1,2"), (std::vector<double>{0.1, 2.0}));
  EXPECT_THROW(parse_real_list(""), std::invalid_argument);
  EXPECT_THROW(parse_real_list("1,"), std::invalid_argument);
}

}  // namespace
}  // namespace redattack::cli
