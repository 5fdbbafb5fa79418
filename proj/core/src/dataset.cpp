#include "entity_sampler/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "entity_sampler/csv.hpp"
#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

namespace {

std::uint64_t hash_row(std::span<const double> f, std::span<const std::uint64_t> t) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (double v : f) {
    if (v == 0.0) v = 0.0;  // fold -0.0 onto 0.0
    h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
  }
  h = mix64(h ^ (0xa5a5a5a5ULL + t.size()));
  for (std::uint64_t x : t) h = mix64(h ^ x);
  return h;
}

}  // namespace

Dataset::Dataset(DatasetColumns c) {
  dim_ = c.dim;
  if (dim_ > 0) {
    if (c.features.size() % dim_ != 0) throw ConfigError("feature matrix size is not a multiple of dim");
    n_ = c.features.size() / dim_;
  } else if (!c.features.empty()) {
    throw ConfigError("features given with dim = 0");
  } else {
    n_ = std::max({c.tokens.size(), c.values.size(), c.entity_labels.size(), c.ids.size()});
  }
  auto check = [&](std::size_t sz, const char* what) {
    if (sz != 0 && sz != n_)
      throw ConfigError(std::string(what) + " column has " + std::to_string(sz) +
                        " rows, expected " + std::to_string(n_));
  };
  check(c.tokens.size(), "token");
  check(c.texts.size(), "text");
  check(c.values.size(), "value");
  check(c.entity_labels.size(), "entity");
  check(c.ids.size(), "id");
  for (std::size_t i = 0; i < c.features.size(); ++i)
    if (!std::isfinite(c.features[i])) throw DataError("non-finite feature value", i / dim_ + 1);
  for (std::size_t i = 0; i < c.values.size(); ++i)
    if (!std::isfinite(c.values[i])) throw DataError("non-finite value", i + 1);

  features_ = std::move(c.features);
  tokens_ = std::move(c.tokens);
  for (auto& t : tokens_) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  texts_ = std::move(c.texts);
  values_ = std::move(c.values);
  ids_ = std::move(c.ids);
  compute_partitions(std::move(c.entity_labels));
}

void Dataset::compute_partitions(std::vector<std::string> labels) {
  content_.assign(n_, 0);
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  buckets.reserve(n_);
  std::vector<std::size_t> representative;
  for (std::size_t i = 0; i < n_; ++i) {
    const auto f = features(i);
    const auto t = tokens(i);
    auto& bucket = buckets[hash_row(f, t)];
    std::uint32_t cls = UINT32_MAX;
    for (std::uint32_t cand : bucket) {
      const std::size_t r = representative[cand];
      const auto rf = features(r);
      const auto rt = tokens(r);
      if (std::equal(f.begin(), f.end(), rf.begin(), rf.end()) &&
          std::equal(t.begin(), t.end(), rt.begin(), rt.end())) {
        cls = cand;
        break;
      }
    }
    if (cls == UINT32_MAX) {
      cls = static_cast<std::uint32_t>(representative.size());
      representative.push_back(i);
      bucket.push_back(cls);
    }
    content_[i] = cls;
  }
  content_count_ = representative.size();

  entity_.assign(n_, 0);
  entity_names_.clear();
  if (!labels.empty()) {
    has_labels_ = true;
    std::unordered_map<std::string, std::uint32_t> index;
    index.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (labels[i].empty()) throw DataError("missing entity label", i + 1);
      auto [it, inserted] = index.try_emplace(labels[i], static_cast<std::uint32_t>(entity_names_.size()));
      if (inserted) entity_names_.push_back(labels[i]);
      entity_[i] = it->second;
    }
    // Identical content carrying different labels.
    std::vector<std::uint32_t> first_label(content_count_, UINT32_MAX);
    std::vector<char> flagged(content_count_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      auto& fl = first_label[content_[i]];
      if (fl == UINT32_MAX) {
        fl = entity_[i];
      } else if (fl != entity_[i] && !flagged[content_[i]]) {
        flagged[content_[i]] = 1;
        conflicts_.push_back(content_[i]);
      }
    }
    if (!conflicts_.empty()) {
      warnings_.push_back(std::to_string(conflicts_.size()) +
                          " group(s) of identical records carry different entity labels; "
                          "entities follow the labels");
    }
  } else {
    has_labels_ = false;
    entity_ = content_;
    entity_names_.resize(content_count_);
    for (std::size_t c = 0; c < content_count_; ++c) entity_names_[c] = id(representative[c]);
  }
}

std::span<const std::uint64_t> Dataset::tokens(std::size_t i) const {
  if (tokens_.empty()) return {};
  return tokens_[i];
}

const std::string& Dataset::text(std::size_t i) const {
  static const std::string kEmpty;
  return texts_.empty() ? kEmpty : texts_[i];
}

std::string Dataset::id(std::size_t i) const {
  return ids_.empty() ? std::to_string(i) : ids_[i];
}

std::optional<std::size_t> Dataset::find_id(std::string_view key) const {
  for (std::size_t i = 0; i < n_; ++i)
    if (id(i) == key) return i;
  return std::nullopt;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out;
  out.n_ = rows.size();
  out.dim_ = dim_;
  out.features_.reserve(rows.size() * dim_);
  if (!tokens_.empty()) out.tokens_.reserve(rows.size());
  if (!texts_.empty()) out.texts_.reserve(rows.size());
  if (!values_.empty()) out.values_.reserve(rows.size());
  out.ids_.reserve(rows.size());

  std::vector<std::uint32_t> copies(n_, 0);
  std::vector<std::uint32_t> entity_map(entity_names_.size(), UINT32_MAX);
  std::vector<std::uint32_t> content_map(content_count_, UINT32_MAX);
  for (std::size_t r : rows) {
    if (r >= n_) throw ConfigError("select_rows: row index out of range");
    entity_map[entity_[r]] = 0;
    content_map[content_[r]] = 0;
  }
  std::uint32_t next = 0;
  for (std::size_t e = 0; e < entity_map.size(); ++e) {
    if (entity_map[e] == 0) {
      entity_map[e] = next++;
      out.entity_names_.push_back(entity_names_[e]);
    }
  }
  next = 0;
  for (auto& c : content_map)
    if (c == 0) c = next++;
  out.content_count_ = next;

  out.entity_.reserve(rows.size());
  out.content_.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto f = features(r);
    out.features_.insert(out.features_.end(), f.begin(), f.end());
    if (!tokens_.empty()) out.tokens_.push_back(tokens_[r]);
    if (!texts_.empty()) out.texts_.push_back(texts_[r]);
    if (!values_.empty()) out.values_.push_back(values_[r]);
    const std::uint32_t k = copies[r]++;
    out.ids_.push_back(k == 0 ? id(r) : id(r) + "#" + std::to_string(k));
    out.entity_.push_back(entity_map[entity_[r]]);
    out.content_.push_back(content_map[content_[r]]);
  }
  out.has_labels_ = true;
  for (std::uint32_t c : conflicts_)
    if (content_map[c] != UINT32_MAX) out.conflicts_.push_back(content_map[c]);
  out.warnings_ = warnings_;
  return out;
}

EntityTable EntityTable::from(const Dataset& data) {
  EntityTable t;
  t.n = data.size();
  t.entities.resize(data.entity_count());
  for (std::uint32_t e = 0; e < data.entity_count(); ++e) t.entities[e] = data.entity_name(e);
  t.freq.assign(data.entity_count(), 0);
  for (std::uint32_t e : data.entity_index()) ++t.freq[e];
  t.prob.resize(t.freq.size());
  for (std::size_t e = 0; e < t.freq.size(); ++e)
    t.prob[e] = static_cast<double>(t.freq[e]) / static_cast<double>(t.n);
  return t;
}

double EntityTable::min_prob() const {
  if (prob.empty()) throw DomainError("empty entity table");
  return *std::min_element(prob.begin(), prob.end());
}

double EntityTable::max_prob() const {
  if (prob.empty()) throw DomainError("empty entity table");
  return *std::max_element(prob.begin(), prob.end());
}

double entity_mean_value(const Dataset& data) {
  if (data.empty()) throw DomainError("entity mean of an empty dataset");
  std::vector<double> sum(data.entity_count(), 0.0);
  std::vector<std::size_t> cnt(data.entity_count(), 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    sum[data.entity_of(i)] += data.value(i);
    ++cnt[data.entity_of(i)];
  }
  double total = 0.0;
  for (std::size_t e = 0; e < sum.size(); ++e) total += sum[e] / static_cast<double>(cnt[e]);
  return total / static_cast<double>(sum.size());
}

std::vector<std::uint64_t> shingle_hashes(std::string_view text, std::size_t k) {
  if (k == 0) throw ConfigError("shingle size must be positive");
  std::string norm;
  norm.reserve(text.size());
  bool space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      space = !norm.empty();
      continue;
    }
    if (space) norm.push_back(' ');
    space = false;
    norm.push_back(static_cast<char>(std::tolower(c)));
  }
  std::vector<std::uint64_t> out;
  if (norm.empty()) return out;
  if (norm.size() < k) {
    out.push_back(std::hash<std::string>{}(norm));
  } else {
    out.reserve(norm.size() - k + 1);
    for (std::size_t i = 0; i + k <= norm.size(); ++i) {
      std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
      for (std::size_t j = 0; j < k; ++j) {
        h ^= static_cast<unsigned char>(norm[i + j]);
        h *= 0x100000001b3ULL;
      }
      out.push_back(mix64(h));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  if (schema.feature_columns.empty() && !schema.text_column)
    throw ConfigError("schema declares neither feature columns nor a text column");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  csv::Reader reader(in, schema.delimiter);
  auto header = reader.next();
  if (!header) throw DataError("missing header row");

  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header->begin(), header->end(), name);
    if (it == header->end()) throw ConfigError("declared column '" + name + "' not found in " + path.string());
    return static_cast<std::size_t>(it - header->begin());
  };
  std::vector<std::size_t> feat_idx;
  for (const auto& f : schema.feature_columns) feat_idx.push_back(column(f));
  const auto text_idx = schema.text_column ? std::optional(column(*schema.text_column)) : std::nullopt;
  const auto ent_idx = schema.entity_column ? std::optional(column(*schema.entity_column)) : std::nullopt;
  const auto val_idx = schema.value_column ? std::optional(column(*schema.value_column)) : std::nullopt;
  const auto id_idx = schema.id_column ? std::optional(column(*schema.id_column)) : std::nullopt;

  DatasetColumns cols;
  cols.dim = feat_idx.size();
  std::size_t row = 0;
  while (auto rec = reader.next()) {
    ++row;
    if (rec->size() != header->size())
      throw DataError("expected " + std::to_string(header->size()) + " fields, found " +
                          std::to_string(rec->size()),
                      row);
    for (std::size_t j : feat_idx) {
      auto v = csv::parse_double((*rec)[j]);
      if (!v) throw DataError("non-numeric feature '" + (*rec)[j] + "' in column " + (*header)[j], row);
      cols.features.push_back(*v);
    }
    if (text_idx) {
      cols.tokens.push_back(shingle_hashes((*rec)[*text_idx], schema.shingle_size));
      cols.texts.push_back((*rec)[*text_idx]);
    }
    if (ent_idx) {
      if ((*rec)[*ent_idx].empty()) throw DataError("empty entity label", row);
      cols.entity_labels.push_back((*rec)[*ent_idx]);
    }
    if (val_idx) {
      auto v = csv::parse_double((*rec)[*val_idx]);
      if (!v) throw DataError("non-numeric value '" + (*rec)[*val_idx] + "'", row);
      cols.values.push_back(*v);
    }
    if (id_idx) cols.ids.push_back((*rec)[*id_idx]);
  }
  if (row == 0) throw DataError("no data rows in " + path.string());
  return Dataset(std::move(cols));
}

CsvSchema default_schema(const Dataset& data) {
  CsvSchema s;
  s.id_column = "id";
  if (data.has_labels()) s.entity_column = "entity";
  s.value_column = "value";
  for (std::size_t j = 0; j < data.dim(); ++j) s.feature_columns.push_back("f" + std::to_string(j));
  if (data.has_text()) s.text_column = "text";
  return s;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  const CsvSchema s = default_schema(data);
  std::vector<std::string> row{"id"};
  if (data.has_labels()) row.push_back("entity");
  row.push_back("value");
  for (const auto& f : s.feature_columns) row.push_back(f);
  if (data.has_text()) row.push_back("text");
  csv::write_row(out, row);
  for (std::size_t i = 0; i < data.size(); ++i) {
    row.clear();
    row.push_back(data.id(i));
    if (data.has_labels()) row.push_back(data.entity_name(data.entity_of(i)));
    row.push_back(csv::format_double(data.value(i)));
    for (double v : data.features(i)) row.push_back(csv::format_double(v));
    if (data.has_text()) row.push_back(data.text(i));
    csv::write_row(out, row);
  }
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace entity_sampler
