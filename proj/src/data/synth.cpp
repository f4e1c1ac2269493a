#include "quanvnext/data/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "quanvnext/error.hpp"

namespace quanvnext::data {
namespace {

constexpr double kStrongRhythm = 1.5;
constexpr double kWeakRhythm = 0.4;

// Paul Kellet's economy pink filter over white noise.
class PinkNoise {
 public:
  double next(double white) {
    b0_ = 0.99765 * b0_ + white * 0.0990460;
    b1_ = 0.96300 * b1_ + white * 0.2965164;
    b2_ = 0.57000 * b2_ + white * 1.0526913;
    return b0_ + b1_ + b2_ + white * 0.1848;
  }

 private:
  double b0_ = 0.0, b1_ = 0.0, b2_ = 0.0;
};

std::string subject_name(int label, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%02d", label == 0 ? "hc" : "mdd", index);
  return buf;
}

}  // namespace

std::vector<SubjectRecording> synth_generate(const SynthOptions& o) {
  if (o.subjects_per_class < 1 || o.channels < 1 || o.sampling_rate_hz < 1 || !(o.duration_s > 0.0) ||
      !(o.noise_scale >= 0.0)) {
    throw ArgumentError("synth_generate: all counts must be positive");
  }
  const auto samples = static_cast<std::size_t>(std::llround(o.duration_s * o.sampling_rate_hz));
  const auto channels = static_cast<std::size_t>(o.channels);
  const double fs = o.sampling_rate_hz;
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> white(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  std::vector<SubjectRecording> out;
  for (int label = 0; label < 2; ++label) {
    for (int s = 0; s < o.subjects_per_class; ++s) {
      SubjectRecording rec{subject_name(label, s), label, o.sampling_rate_hz, Tensor(channels, samples)};
      const double alpha_amp = (label == 0 ? kStrongRhythm : kWeakRhythm) * jitter(rng);
      const double theta_amp = (label == 1 ? kStrongRhythm : 0.0) * jitter(rng);
      const double noise_amp = o.noise_scale * jitter(rng);
      for (std::size_t c = 0; c < channels; ++c) {
        const double phase10 = phase(rng);
        const double phase4 = phase(rng);
        PinkNoise pink;
        auto row = rec.signal.row(c);
        for (std::size_t t = 0; t < samples; ++t) {
          const double time = static_cast<double>(t) / fs;
          row[t] = noise_amp * pink.next(white(rng)) +
                   alpha_amp * std::sin(2.0 * std::numbers::pi * 10.0 * time + phase10) +
                   theta_amp * std::sin(2.0 * std::numbers::pi * 4.0 * time + phase4);
        }
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace quanvnext::data
