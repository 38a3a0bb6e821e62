#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "support.hpp"

#ifndef RAUGNN_BIN
#error "RAUGNN_BIN must point at the raugnn executable"
#endif

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(RAUGNN_BIN) + " -q " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, EndToEndPipeline) {
  rau::test::TempDir dir("cli");
  const std::string d = dir.path.string();
  ASSERT_EQ(run("synth --n-users 150 --feature-dim 4 --seed 2 --out " + d + "/data"), 0);
  ASSERT_EQ(run("ingest " + d + "/data --out " + d + "/graph.bin"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir.path / "node_index.csv"));

  const std::string model = " --heads 2 --embed-dim 8 --epochs 2 --batch-size 32";
  ASSERT_EQ(run("train --graph " + d + "/graph.bin --out " + d + "/ckpt" + model), 0);
  for (const char* f : {"weights.bin", "meta.json", "loss_trajectory.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir.path / "ckpt" / f)) << f;
  EXPECT_EQ(run("eval --graph " + d + "/graph.bin --ckpt " + d + "/ckpt"), 0);
  EXPECT_EQ(run("eval --graph " + d + "/data --ckpt " + d + "/ckpt --all-labeled"), 0);

  ASSERT_EQ(run("experiment --graph " + d + "/graph.bin --train-pcts 20 --seeds 1 --variants full,pa --out " + d +
                "/res.csv" + model),
            0);
  for (const char* f : {"res.csv", "res.summary.csv", "res.timings.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir.path / f)) << f;
}

TEST(Cli, GradcheckPasses) { EXPECT_EQ(run("gradcheck --seed 1"), 0); }

TEST(Cli, ValidationErrorsExitWithOne) {
  rau::test::TempDir dir("cli_bad");
  const std::string d = dir.path.string();
  EXPECT_EQ(run("train --graph " + d + "/missing --out " + d + "/ckpt"), 1);
  EXPECT_EQ(run("ingest " + d + " --out " + d + "/g.bin"), 1);
  EXPECT_EQ(run("synth --out " + d + "/s --anomaly-frac 1.5"), 1);
  EXPECT_EQ(run("train --graph x --out y --variant gat"), 1);
  EXPECT_EQ(run("train --no-such-flag"), 1);
  EXPECT_EQ(run("eval --graph " + d + " --ckpt " + d), 1);
}

TEST(Cli, HelpExitsCleanly) { EXPECT_EQ(run("--help"), 0); }
