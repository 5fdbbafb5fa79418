#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace entity_sampler {

// Column roles for CSV ingestion. At least one of feature_columns or
// text_column must be set.
struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::optional<std::string> text_column;    // shingled into a token set
  std::optional<std::string> entity_column;  // ground-truth entity label
  std::optional<std::string> value_column;   // aggregation column for the error metric
  std::optional<std::string> id_column;
  char delimiter = ',';
  std::size_t shingle_size = 3;
};

// Raw columns used to build a Dataset. Optional columns are left empty.
struct DatasetColumns {
  std::size_t dim = 0;
  std::vector<double> features;                     // row-major, rows x dim
  std::vector<std::vector<std::uint64_t>> tokens;   // per-row token hashes
  std::vector<std::string> texts;                   // source text of the tokens
  std::vector<std::string> entity_labels;
  std::vector<double> values;
  std::vector<std::string> ids;
};

// An immutable set of records. Each record has an id, a feature vector
// and/or token set, an optional ground-truth entity label and a value.
//
// Two partitions of the records are precomputed:
//  - content classes: records with identical features and tokens;
//  - entities: the ground-truth label when present, else the content class.
// Estimators that must not see ground truth (balanced, gmm) only use the
// content classes or the raw features.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(DatasetColumns columns);

  std::size_t size() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }
  std::size_t dim() const noexcept { return dim_; }
  bool has_vectors() const noexcept { return dim_ > 0; }
  bool has_tokens() const noexcept { return !tokens_.empty(); }
  bool has_labels() const noexcept { return has_labels_; }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  std::span<const double> feature_matrix() const noexcept { return features_; }
  std::span<const std::uint64_t> tokens(std::size_t i) const;
  const std::string& text(std::size_t i) const;
  bool has_text() const noexcept { return !texts_.empty(); }
  double value(std::size_t i) const { return values_.empty() ? 0.0 : values_[i]; }
  std::string id(std::size_t i) const;

  std::uint32_t entity_of(std::size_t i) const { return entity_[i]; }
  std::size_t entity_count() const noexcept { return entity_names_.size(); }
  const std::string& entity_name(std::uint32_t e) const { return entity_names_[e]; }
  std::span<const std::uint32_t> entity_index() const noexcept { return entity_; }

  std::uint32_t content_class_of(std::size_t i) const { return content_[i]; }
  std::size_t content_class_count() const noexcept { return content_count_; }
  std::span<const std::uint32_t> content_index() const noexcept { return content_; }

  // Content classes whose records carry more than one entity label.
  const std::vector<std::uint32_t>& conflicting_content_classes() const noexcept {
    return conflicts_;
  }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Copies of the given rows, in order, keeping entity and content identity.
  // Repeated rows get ids suffixed "#1", "#2", ... so ids stay unique. The
  // result always carries entity labels, so ground truth survives even when
  // the source defined entities by content.
  Dataset select_rows(std::span<const std::size_t> rows) const;

  // Index of the record with the given id, or nullopt.
  std::optional<std::size_t> find_id(std::string_view id) const;

 private:
  void compute_partitions(std::vector<std::string> labels);

  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> features_;
  std::vector<std::vector<std::uint64_t>> tokens_;
  std::vector<std::string> texts_;
  std::vector<double> values_;
  std::vector<std::string> ids_;
  bool has_labels_ = false;
  std::vector<std::uint32_t> entity_;
  std::vector<std::string> entity_names_;
  std::vector<std::uint32_t> content_;
  std::size_t content_count_ = 0;
  std::vector<std::uint32_t> conflicts_;
  std::vector<std::string> warnings_;
};

// Per-entity frequencies of a dataset. Entities are indexed as in
// Dataset::entity_of.
struct EntityTable {
  std::vector<std::string> entities;
  std::vector<std::size_t> freq;
  std::vector<double> prob;
  std::size_t n = 0;

  static EntityTable from(const Dataset& data);

  std::size_t size() const noexcept { return entities.size(); }
  double min_prob() const;  // eta
  double max_prob() const;  // eta_1
};

// Mean of the value column over entities (each entity counted once, valued
// at the mean of its records). This is the clean-data average.
double entity_mean_value(const Dataset& data);

// Hashes of the k-character shingles of `text` (after lowercasing and
// collapsing whitespace). Sorted, unique.
std::vector<std::uint64_t> shingle_hashes(std::string_view text, std::size_t k = 3);

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);

// Schema matching the layout produced by write_dataset_csv for `data`.
CsvSchema default_schema(const Dataset& data);

// Writes the dataset as CSV with columns id, entity (if labelled), value,
// f0..f{d-1} and text (if present); ingest_csv with default_schema() reads it back.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace entity_sampler
