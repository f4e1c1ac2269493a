#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "quanvnext/tensor.hpp"

namespace quanvnext::data {

// Labels: 0 = healthy control (HC), 1 = major depressive disorder (MDD).
struct SubjectRecording {
  std::string subject_id;
  int label = 0;
  int sampling_rate_hz = 0;
  Tensor signal;  // (channels, samples)

  std::size_t channels() const noexcept { return signal.rows(); }
  std::size_t samples() const noexcept { return signal.cols(); }
};

// One line of the dataset manifest. data_file is relative to the manifest's
// directory unless absolute.
struct ManifestEntry {
  std::string subject_id;
  int label = 0;
  int sampling_rate_hz = 0;
  int channels = 0;
  int samples = 0;
  std::string data_file;
};

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> subjects;
};

// Accepts the manifest file itself, a directory holding manifest.json, or a
// path that becomes valid once ".json" is appended.
std::filesystem::path resolve_manifest_path(const std::filesystem::path& path);

Manifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

// Reads raw little-endian float32, channel-major. Throws ParseError naming the
// field on size mismatch, bad label, or non-finite samples.
SubjectRecording load_subject(const ManifestEntry& entry, const std::filesystem::path& base_dir);
std::vector<SubjectRecording> load_all(const Manifest& manifest);

// Writes the data file and returns the matching manifest entry.
ManifestEntry write_subject(const SubjectRecording& rec, const std::filesystem::path& base_dir,
                            const std::string& data_file);

}  // namespace quanvnext::data
