#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "entity_sampler/experiment.hpp"

namespace entity_sampler {

struct ReportOptions {
  std::string prefix = "report";
  // CSV with columns fraction,accuracy (optionally dup_rate) holding an
  // externally computed comparison method; joined into the figure file.
  std::optional<std::filesystem::path> baseline_csv;
};

// Per-cell table. Timings are left out so that equal specs and seeds give
// byte-identical output.
void write_cells_csv(std::ostream& out, const SampleReport& report);

// Mean error laid out as dup rate (rows) by fraction (columns).
void write_grid_csv(std::ostream& out, const SampleReport& report);

// Figure data: error, accuracy = 1 - error, bound and optional baseline.
void write_figure_csv(std::ostream& out, const SampleReport& report,
                      const std::optional<std::filesystem::path>& baseline_csv = std::nullopt);

std::string summary_json(const SampleReport& report);

// Inverse of summary_json. Throws ConfigError on malformed input.
SampleReport report_from_json(const std::string& text);

// Writes <prefix>_cells.csv, <prefix>_grid.csv, <prefix>_figure.csv and
// <prefix>.json into `dir`. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const SampleReport& report,
                                               const std::filesystem::path& dir,
                                               const ReportOptions& opts = {});

}  // namespace entity_sampler
