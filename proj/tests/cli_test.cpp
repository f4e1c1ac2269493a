#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sys/wait.h>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "quanvnext_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QUANVNEXT_CLI_PATH) + " " + args + " > " +
                          (kWork / "last_stdout.txt").string() + " 2> " + (kWork / "last_stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

std::size_t count_with_extension(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

class CliTest : public testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_F(CliTest, HelpDocumentsEveryOption) {
  quanvnext::cli::RunConfig config;
  const auto app = quanvnext::cli::build_app(config);
  std::vector<const CLI::App*> apps{app.get()};
  for (const auto* sub : app->get_subcommands([](const CLI::App*) { return true; })) apps.push_back(sub);
  EXPECT_EQ(apps.size(), 7u);
  for (const auto* a : apps) {
    const std::string help = a->help();
    for (const auto* opt : a->get_options()) {
      if (opt->get_name() == "--help") continue;
      EXPECT_FALSE(opt->get_description().empty()) << a->get_name() << " " << opt->get_name();
      for (const auto& name : opt->get_lnames()) {
        EXPECT_NE(help.find("--" + name), std::string::npos) << a->get_name() << " --" << name;
      }
    }
  }
  for (const std::string sub : {"synth-data", "train", "eval", "uncertainty", "explain", "selfcheck"}) {
    EXPECT_EQ(run_cli(sub + " --help"), 0) << sub;
  }
}

TEST_F(CliTest, WorkedExamplesAndReproducibility) {
  const auto data = kWork / "data";
  ASSERT_EQ(run_cli("synth-data --subjects 6 --channels 4 --fs 250 --seconds 40 --seed 7 --out " + data.string()), 0)
      << slurp(kWork / "last_stderr.txt");
  EXPECT_TRUE(fs::exists(data / "manifest.json"));
  EXPECT_EQ(count_with_extension(data, ".f32"), 12u);

  const std::string train = "train --preset dataset-2 --manifest " + (data / "manifest").string() +
                            " --seed 1 --epochs 3 --batch-size 32 --out ";
  const auto r1 = kWork / "runs" / "r1", r2 = kWork / "runs" / "r2";
  ASSERT_EQ(run_cli(train + r1.string()), 0) << slurp(kWork / "last_stderr.txt");
  for (int e = 1; e <= 3; ++e) EXPECT_TRUE(fs::exists(r1 / ("epoch_" + std::to_string(e) + ".ckpt"))) << e;
  EXPECT_EQ(count_lines(r1 / "metrics.csv"), 4u);
  EXPECT_TRUE(fs::exists(r1 / "run_train.json"));

  ASSERT_EQ(run_cli(train + r2.string()), 0);
  EXPECT_EQ(slurp(r1 / "metrics.csv"), slurp(r2 / "metrics.csv"));
  EXPECT_EQ(slurp(r1 / "epoch_3.ckpt"), slurp(r2 / "epoch_3.ckpt"));

  const auto u1 = kWork / "u1", u2 = kWork / "u2";
  const std::string unc = "uncertainty --ckpt " + (r1 / "epoch_3.ckpt").string() + " --manifest " +
                          (data / "manifest").string() + " --eps 0.1,0.05,0.01 --n 4 --out ";
  ASSERT_EQ(run_cli(unc + u1.string()), 0) << slurp(kWork / "last_stderr.txt");
  ASSERT_EQ(run_cli(unc + u2.string()), 0);
  EXPECT_EQ(count_lines(u1 / "uncertainty.csv"), 4u);
  EXPECT_EQ(slurp(u1 / "uncertainty.csv"), slurp(u2 / "uncertainty.csv"));

  const auto e1 = kWork / "e1";
  ASSERT_EQ(run_cli("eval --ckpt " + (r1 / "epoch_3.ckpt").string() + " --manifest " + data.string() +
                    " --out " + e1.string()),
            0);
  EXPECT_TRUE(fs::exists(e1 / "eval.csv"));
  EXPECT_TRUE(fs::exists(e1 / "predictions.csv"));
}

TEST_F(CliTest, InvalidConfigurationFailsCleanly) {
  const auto data = kWork / "small";
  ASSERT_EQ(run_cli("synth-data --subjects 3 --channels 4 --fs 32 --seconds 12 --seed 1 --out " + data.string()), 0);
  // Width 6 cannot be split into the shuffle groups.
  const auto bad = kWork / "bad_run";
  const int code = run_cli("train --manifest " + data.string() + " --width 6 --epochs 1 --window-s 3 --out " + bad.string());
  EXPECT_EQ(code, 2);
  EXPECT_FALSE(fs::exists(bad) && !fs::is_empty(bad));
  const auto err = slurp(kWork / "last_stderr.txt");
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1) << err;

  EXPECT_NE(run_cli("train --out " + bad.string()), 0);  // no data source
  EXPECT_NE(run_cli("train --manifest " + data.string() + " --synth-subjects 3 --out " + bad.string()), 0);
  EXPECT_NE(run_cli("train --manifest " + data.string() + " --preset dataset-9 --out " + bad.string()), 0);
  EXPECT_NE(run_cli("eval --ckpt " + (kWork / "missing.ckpt").string() + " --manifest " + data.string()), 0);
  EXPECT_NE(run_cli("frobnicate"), 0);
}

TEST_F(CliTest, SynthTrainingAndConfigFile) {
  const auto out = kWork / "cfg_run";
  std::ofstream(kWork / "run.toml") << "[train]\nepochs = 1\nbatch-size = 8\n";
  ASSERT_EQ(run_cli("--config " + (kWork / "run.toml").string() +
                    " train --synth-subjects 3 --synth-fs 32 --synth-seconds 12 --window-s 3 --epochs 2 --out " +
                    out.string()),
            0)
      << slurp(kWork / "last_stderr.txt");
  EXPECT_EQ(count_lines(out / "metrics.csv"), 3u);  // flag wins over the file

  ASSERT_EQ(run_cli("explain --ckpt " + (out / "best.ckpt").string() +
                    " --synth-subjects 3 --synth-fs 32 --synth-seconds 12 --max-samples 4 --stft-window 8 --stft-hop 2"),
            0)
      << slurp(kWork / "last_stderr.txt");
  EXPECT_TRUE(fs::exists(out / "embeddings.csv"));
  EXPECT_TRUE(fs::exists(out / "activations_block_1.csv"));
  EXPECT_EQ(run_cli("selfcheck --cases 3"), 0) << slurp(kWork / "last_stdout.txt");
}
