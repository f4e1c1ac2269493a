#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quanvnext/data/recording.hpp"
#include "quanvnext/tensor.hpp"

namespace quanvnext::data {

struct Window {
  std::string subject_id;
  int label = 0;
  Tensor signal;  // (channels, window_len)
};

struct ZScoreStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct WindowedDataset {
  std::vector<Window> windows;
  std::size_t window_len = 0;
  ZScoreStats stats;

  std::size_t size() const noexcept { return windows.size(); }
  std::size_t count_label(int label) const;
};

inline constexpr double kStdFloor = 1e-8;

// Windows of W = window_s * fs samples with hop round(W * (1 - overlap)),
// starting at 0 and kept only while fully inside the signal. A recording
// shorter than one window yields no windows and a warning on stderr.
std::vector<Window> window_signal(const SubjectRecording& rec, double window_s = 8.0,
                                  double overlap = 0.9);

struct SubjectInfo {
  std::string subject_id;
  int label = 0;
};

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Label-stratified subject split. round(fraction * n) subjects go to train,
// apportioned across classes by largest remainder (ties broken by the seed),
// keeping at least one subject per class on each side. Throws ConfigError if a
// class has fewer than two subjects.
Split subject_split(std::vector<SubjectInfo> subjects, double train_fraction, std::uint64_t seed);

// Randomly drops majority-class windows until both classes have the minority
// count. Relative order of kept windows is unchanged. Throws ConfigError if a
// class is absent.
std::vector<Window> undersample(const std::vector<Window>& windows, std::uint64_t seed);

// Per-channel mean/std pooled over every window and time step.
ZScoreStats zscore_fit(const std::vector<Window>& train);
std::vector<Window> zscore_apply(const std::vector<Window>& windows, const ZScoreStats& stats);
Tensor zscore_apply(const Tensor& signal, const ZScoreStats& stats);

struct PipelineOptions {
  double window_s = 8.0;
  double overlap = 0.9;
  double train_fraction = 0.7;
  // Fraction of train subjects held out for checkpoint selection (0 disables).
  double validation_fraction = 0.0;
  std::uint64_t seed = 0;
};

struct PreparedData {
  WindowedDataset train;
  WindowedDataset validation;
  WindowedDataset test;
  Split split;
};

// split -> window -> undersample -> z-score (train statistics only).
// Recordings are sorted by subject id first so the result does not depend on
// input order.
PreparedData prepare(std::vector<SubjectRecording> recordings, const PipelineOptions& options);

}  // namespace quanvnext::data
