#include "quanvnext/data/recording.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "quanvnext/error.hpp"

namespace quanvnext::data {

namespace fs = std::filesystem;

fs::path resolve_manifest_path(const fs::path& path) {
  if (fs::is_directory(path)) return path / "manifest.json";
  if (fs::exists(path)) return path;
  fs::path with_ext = path;
  with_ext += ".json";
  if (fs::exists(with_ext)) return with_ext;
  return path;
}

Manifest load_manifest(const fs::path& path) {
  const fs::path file = resolve_manifest_path(path);
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open manifest: " + file.string());
  Manifest m;
  m.base_dir = file.parent_path();
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + file.string() + ": " + e.what());
  }
  if (!j.contains("subjects") || !j["subjects"].is_array()) {
    throw ParseError("manifest " + file.string() + ": missing 'subjects' array");
  }
  for (const auto& s : j["subjects"]) {
    ManifestEntry e;
    auto field = [&](const char* name) -> const nlohmann::json& {
      if (!s.contains(name)) throw ParseError("manifest entry: missing field '" + std::string(name) + "'");
      return s[name];
    };
    try {
      e.subject_id = field("subject_id").get<std::string>();
      e.label = field("label").get<int>();
      e.sampling_rate_hz = field("sampling_rate_hz").get<int>();
      e.channels = field("channels").get<int>();
      e.samples = field("samples").get<int>();
      e.data_file = field("data_file").get<std::string>();
    } catch (const nlohmann::json::type_error& err) {
      throw ParseError("manifest entry '" + e.subject_id + "': " + err.what());
    }
    m.subjects.push_back(std::move(e));
  }
  return m;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  nlohmann::ordered_json j;
  j["format"] = "quanvnext-eeg-manifest";
  j["version"] = 1;
  j["subjects"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    j["subjects"].push_back({{"subject_id", e.subject_id},
                             {"label", e.label},
                             {"sampling_rate_hz", e.sampling_rate_hz},
                             {"channels", e.channels},
                             {"samples", e.samples},
                             {"data_file", e.data_file}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
}

SubjectRecording load_subject(const ManifestEntry& entry, const fs::path& base_dir) {
  const std::string who = "subject '" + entry.subject_id + "'";
  if (entry.label != 0 && entry.label != 1) throw ParseError(who + ": field 'label' must be 0 or 1");
  if (entry.sampling_rate_hz <= 0) throw ParseError(who + ": field 'sampling_rate_hz' must be positive");
  if (entry.channels <= 0) throw ParseError(who + ": field 'channels' must be positive");
  if (entry.samples <= 0) throw ParseError(who + ": field 'samples' must be positive");

  fs::path file = entry.data_file;
  if (file.is_relative()) file = base_dir / file;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError(who + ": field 'data_file' does not name a readable file: " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  const auto rows = static_cast<std::size_t>(entry.channels);
  const auto cols = static_cast<std::size_t>(entry.samples);
  if (bytes.size() != rows * cols * 4) {
    throw ParseError(who + ": field 'channels'/'samples' declares " + std::to_string(rows) + " x " +
                     std::to_string(cols) + " floats but data file holds " +
                     std::to_string(bytes.size()) + " bytes");
  }
  SubjectRecording rec{entry.subject_id, entry.label, entry.sampling_rate_hz, Tensor(rows, cols)};
  auto dst = rec.signal.flat();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, bytes.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    const float v = std::bit_cast<float>(bits);
    if (!std::isfinite(v)) {
      throw ParseError(who + ": field 'data_file' has a non-finite sample at channel " +
                       std::to_string(i / cols) + ", index " + std::to_string(i % cols));
    }
    dst[i] = v;
  }
  return rec;
}

std::vector<SubjectRecording> load_all(const Manifest& manifest) {
  std::vector<SubjectRecording> out;
  out.reserve(manifest.subjects.size());
  for (const auto& e : manifest.subjects) out.push_back(load_subject(e, manifest.base_dir));
  return out;
}

ManifestEntry write_subject(const SubjectRecording& rec, const fs::path& base_dir,
                            const std::string& data_file) {
  const fs::path file = base_dir / data_file;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write data file: " + file.string());
  std::string bytes(rec.signal.size() * 4, '\0');
  for (std::size_t i = 0; i < rec.signal.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(rec.signal.flat()[i]));
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    std::memcpy(bytes.data() + 4 * i, &bits, 4);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing data file: " + file.string());
  return {rec.subject_id,
          rec.label,
          rec.sampling_rate_hz,
          static_cast<int>(rec.channels()),
          static_cast<int>(rec.samples()),
          data_file};
}

}  // namespace quanvnext::data
