#include <gtest/gtest.h>

#include <filesystem>

#include "json.hpp"
#include "dtnav/checkpoint.hpp"
#include "dtnav/run_config.hpp"
#include "dtnav/world_io.hpp"
#include "support/process.hpp"

using namespace dtnav;
using dtnav::testing::run_process;
using dtnav::testing::slurp;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

const std::string kCli = DTNAV_CLI_PATH;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dtnav_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), kCli);
    return run_process(args, dir_ / "log.txt");
  }
  std::string log() const { return slurp(dir_ / "log.txt"); }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  /// Small, quick training overrides.
  static std::vector<std::string> tiny(std::vector<std::string> args) {
    for (const char* s : {"td3.hidden=[16,16]", "train.warmup_steps=100", "train.batch_size=32", "env.step_budget=80"}) {
      args.push_back("--set");
      args.push_back(s);
    }
    return args;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run({}), 1); }

TEST_F(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(run({"fly"}), 1); }

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run({"train", "--help"}), 0); }

TEST_F(Cli, DryRunValidatesWithoutWriting) {
  EXPECT_EQ(run({"train", "--dry-run", "--out", out("never")}), 0);
  EXPECT_FALSE(fs::exists(out("never")));
}

TEST_F(Cli, UnknownConfigKeyIsNamed) {
  EXPECT_EQ(run({"train", "--dry-run", "--set", "td3.gama=0.9"}), 1);
  EXPECT_NE(log().find("td3.gama"), std::string::npos);
}

TEST_F(Cli, InvalidValueIsUsageError) {
  EXPECT_EQ(run({"train", "--dry-run", "--set", "td3.gamma=1.5"}), 1);
  EXPECT_EQ(run({"train", "--dry-run", "--config", out("missing.json")}), 1);
}

TEST_F(Cli, ConfigFileRoundTrip) {
  RunConfig c;
  c.td3.gamma = 0.95;
  c.seed = 77;
  save_config(c, out("c.json"));
  ASSERT_EQ(run({"train", "--config", out("c.json"), "--steps", "0", "--out", out("run")}), 0);
  const RunConfig back = load_config(out("run") + "/config.json");
  EXPECT_EQ(back.td3.gamma, 0.95);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.train.total_steps, 0);
}

TEST_F(Cli, ZeroStepTrainThenEval) {
  ASSERT_EQ(run(tiny({"train", "--steps", "0", "--out", out("t")})), 0) << log();
  for (const char* f : {"checkpoint.bin", "replay.bin", "episodes.csv", "updates.csv", "config.json", "summary.json"}) {
    EXPECT_TRUE(fs::exists(out("t") + "/" + f)) << f;
  }
  ASSERT_EQ(run(tiny({"eval", "--checkpoint", out("t") + "/checkpoint.bin", "--episodes", "4", "--out", out("e")})), 0)
      << log();
  const auto metrics = nlohmann::json::parse(slurp(out("e") + "/metrics.json"));
  EXPECT_EQ(metrics.at("episodes"), 4);
  EXPECT_EQ(metrics.at("success_rate").get<double>() + metrics.at("collision_rate").get<double>() +
                metrics.at("timeout_rate").get<double>(),
            1.0);
  ASSERT_EQ(run({"plot", out("e") + "/trajectories.csv", "--out", out("p.svg")}), 0);
  EXPECT_NE(slurp(out("p.svg")).find("<svg"), std::string::npos);
}

TEST_F(Cli, FixedSeedIsByteIdentical) {
  ASSERT_EQ(run(tiny({"train", "--steps", "300", "--seed", "5", "--out", out("a")})), 0) << log();
  ASSERT_EQ(run(tiny({"train", "--steps", "300", "--seed", "5", "--out", out("b")})), 0) << log();
  for (const char* f : {"checkpoint.bin", "episodes.csv", "updates.csv", "replay.bin"}) {
    EXPECT_EQ(slurp(out("a") + "/" + f), slurp(out("b") + "/" + f)) << f;
  }
  ASSERT_EQ(run(tiny({"train", "--steps", "300", "--seed", "6", "--out", out("c")})), 0);
  EXPECT_NE(slurp(out("a") + "/checkpoint.bin"), slurp(out("c") + "/checkpoint.bin"));
}

TEST_F(Cli, ArchitectureMismatchIsRuntimeError) {
  ASSERT_EQ(run(tiny({"train", "--steps", "0", "--out", out("t")})), 0);
  EXPECT_EQ(run({"eval", "--checkpoint", out("t") + "/checkpoint.bin", "--episodes", "1", "--out", out("e")}), 2);
}

TEST_F(Cli, MissingCheckpointFlagIsUsageError) { EXPECT_EQ(run({"eval"}), 1); }

TEST_F(Cli, BadInjectionIsUsageError) {
  World w;
  w.bounds = {0, 0, 10, 10};
  w.goal = {5, 5};
  save_world_file(w, out("w.json"));
  EXPECT_EQ(run({"physical", "--dry-run", "--world", out("w.json"), "--inject-obstacle", "1,2@3"}), 1);
  EXPECT_EQ(run({"physical", "--dry-run", "--world", out("w.json"), "--inject-obstacle", "1,2,1,1@3"}), 0);
}

TEST_F(Cli, TwinWithoutServerIsRuntimeError) {
  ASSERT_EQ(run(tiny({"train", "--steps", "0", "--out", out("t")})), 0);
  // Port 9 on loopback is closed; the client gives up after its connect timeout.
  EXPECT_EQ(run(tiny({"twin", "--checkpoint", out("t") + "/checkpoint.bin", "--endpoint", "127.0.0.1:9", "--set",
                      "twin.io_timeout_ms=300", "--out", out("tw")})),
            2);
}
