#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "quanvnext/data/pipeline.hpp"
#include "quanvnext/model/quanvnext.hpp"
#include "quanvnext/tensor.hpp"

namespace quanvnext::eval {

// Stage names: "embedding", "block_1" .. "block_N", "projection".
std::vector<std::string> activation_stages(const model::Model& model);

struct ClassActivation {
  int label = 0;
  std::size_t count = 0;
  Tensor mean;    // (channels, length)
  Tensor stddev;  // population std over the class's samples
};

struct ActivationExport {
  std::string stage;
  std::vector<Tensor> samples;  // one (channels, length) tensor per input
  std::vector<ClassActivation> classes;  // labels present, ascending
  // Channel whose values vary most across samples (time-averaged variance).
  std::size_t representative_channel = 0;
};

// Throws ArgumentError for an unknown stage or an empty sample list.
ActivationExport export_activations(const model::Model& model,
                                    const std::vector<data::Window>& samples,
                                    const std::string& stage);

// Index of the channel with the largest across-sample variance averaged over
// time. All tensors must share a shape.
std::size_t highest_variance_channel(const std::vector<Tensor>& samples);

// Hann-windowed (periodic) STFT magnitudes: (frames, window/2 + 1) with
// frames = floor((L - window) / hop) + 1. Throws ArgumentError if L < window.
Tensor stft_spectrogram(std::span<const double> signal, std::size_t window = 64,
                        std::size_t hop = 8);

// Projects centred rows onto the top principal axes. Each axis is signed so
// that its largest-magnitude loading is positive. Missing components
// (fewer samples or features than requested) are zero.
Tensor pca(const Tensor& rows, std::size_t components = 2);

struct EmbeddingExport {
  std::vector<std::string> subject_ids;
  std::vector<int> labels;
  Tensor features;  // (samples, projection channels * length)
  Tensor coords;    // (samples, 2)
};

EmbeddingExport export_embeddings(const model::Model& model, const std::vector<data::Window>& data);

// CSV writers; every float uses 9 significant digits. Throws std::runtime_error
// on I/O failure.
//   activations:  sample,subject_id,label,channel,t0..t{L-1}
//   summary:      label,statistic,channel,t0..   (statistic = mean|std)
//   spectrogram:  label,frame,bin0..bin{W/2}    (selected channel's class mean)
//   embeddings:   subject_id,label,f0..f{D-1},pc1,pc2
void write_activations_csv(const std::filesystem::path& path, const ActivationExport& a,
                           const std::vector<data::Window>& samples);
void write_activation_summary_csv(const std::filesystem::path& path, const ActivationExport& a);
void write_spectrogram_csv(const std::filesystem::path& path, const ActivationExport& a,
                           std::size_t window = 64, std::size_t hop = 8);
void write_embeddings_csv(const std::filesystem::path& path, const EmbeddingExport& e);

}  // namespace quanvnext::eval
