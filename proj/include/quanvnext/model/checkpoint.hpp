#pragma once

#include <filesystem>
#include <string>

#include "quanvnext/model/quanvnext.hpp"

namespace quanvnext::model {

// Self-describing model container; byte layout in docs/checkpoint_format.md.
// `metadata` is a free-form JSON object stored alongside the model (training
// seed, epoch, split parameters, ...).
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const std::string& metadata_json = "{}");

struct LoadedCheckpoint {
  Model model;
  std::string metadata_json;
};

// Throws ParseError naming the offending record on malformed input.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace quanvnext::model
