#pragma once

#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace quanvnext::cli {

struct SynthSource {
  int subjects = 0;  // per class; 0 means "use --manifest"
  int channels = 4;
  int fs = 250;
  double seconds = 40.0;
  double noise = 0.35;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::string command;
  std::string manifest;
  SynthSource synth;
  std::string preset = "dataset-2";
  std::string model_config;
  int width = 0;  // 0 keeps the preset's width
  std::uint64_t seed = 0;
  int epochs = 300;
  std::size_t batch_size = 64;
  double learning_rate = 0.0;  // 0 picks the preset default
  std::string out;
  bool no_skip = false;
  bool no_aggregation = false;
  bool no_shuffle = false;
  std::string select = "val";
  double window_s = 8.0;
  double overlap = 0.9;
  double train_fraction = 0.7;
  double validation_fraction = 0.2;
  std::string checkpoint;
  std::string subset = "test";
  std::vector<double> epsilons{0.1, 0.05, 0.01};
  int perturbations = 50;
  std::string stage = "all";
  std::size_t max_samples = 64;
  std::size_t stft_window = 64;
  std::size_t stft_hop = 8;
  std::size_t cases = 100;
  std::size_t threads = 0;
};

// The full command tree bound to `config`; exposed so tests can inspect it.
std::unique_ptr<CLI::App> build_app(RunConfig& config);

// Runs a parsed configuration. Returns the process exit status.
int run(const RunConfig& config);

// Entry point: parse, run, and turn exceptions into one-line diagnostics.
int main(int argc, char** argv);

}  // namespace quanvnext::cli
