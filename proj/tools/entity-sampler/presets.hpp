#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "entity_sampler/dataset.hpp"

namespace entity_sampler::cli {

// Column layout of a known benchmark export, plus a synthetic stand-in of
// the same shape for when the original file is not available.
struct Preset {
  std::string name;
  std::string description;
  CsvSchema schema;
  std::size_t default_rows = 0;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

// Schema read off a file header: id, entity, value, f<j>... and text
// columns as written by write_dataset_csv.
CsvSchema detect_schema(const std::filesystem::path& path);

// Synthetic stand-in for a preset. Rows are approximate for the text
// presets, which are generated per entity.
Dataset synthesize(const Preset& preset, std::size_t rows, std::uint64_t seed);

}  // namespace entity_sampler::cli
