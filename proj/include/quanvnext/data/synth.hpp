#pragma once

#include <cstdint>
#include <vector>

#include "quanvnext/data/recording.hpp"

namespace quanvnext::data {

struct SynthOptions {
  int subjects_per_class = 6;
  int channels = 4;
  int sampling_rate_hz = 250;
  double duration_s = 40.0;
  // Standard-deviation scale of the pink background relative to the rhythms.
  double noise_scale = 0.35;
  std::uint64_t seed = 0;
};

// EEG-like recordings. Every channel carries 1/f-ish background noise; class 0
// adds a strong 10 Hz rhythm, class 1 a strong 4 Hz rhythm and an attenuated
// 10 Hz one. Phases are random per channel, amplitudes vary ±20% per subject.
// Subjects are named hc_XX / mdd_XX.
std::vector<SubjectRecording> synth_generate(const SynthOptions& options);

}  // namespace quanvnext::data
