#include "presets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "entity_sampler/csv.hpp"
#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"
#include "entity_sampler/synthetic.hpp"

namespace entity_sampler::cli {

namespace {

CsvSchema numeric(std::vector<std::string> features, std::string value,
                  std::optional<std::string> id = std::nullopt) {
  CsvSchema s;
  s.feature_columns = std::move(features);
  s.value_column = std::move(value);
  s.id_column = std::move(id);
  return s;
}

CsvSchema text(std::string text_col, std::string entity, std::optional<std::string> value,
               std::string id) {
  CsvSchema s;
  s.text_column = std::move(text_col);
  s.entity_column = std::move(entity);
  s.value_column = std::move(value);
  s.id_column = std::move(id);
  return s;
}

// Intel-lab style readings: a few sensors, each a tight cluster in
// (temperature, humidity, light, voltage).
Dataset sensor_standin(std::size_t rows, std::uint64_t seed) {
  const std::size_t sensors = std::max<std::size_t>(1, std::min<std::size_t>(54, rows / 20));
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> centers;
  for (std::size_t s = 0; s < sensors; ++s) {
    centers.push_back(18.0 + 8.0 * uniform01(rng));
    centers.push_back(30.0 + 20.0 * uniform01(rng));
    centers.push_back(100.0 + 400.0 * uniform01(rng));
    centers.push_back(2.3 + 0.4 * uniform01(rng));
  }
  DatasetColumns c;
  c.dim = 4;
  const double spread[4] = {0.5, 1.5, 20.0, 0.02};
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t s = uniform_index(rng, sensors);
    for (std::size_t t = 0; t < 4; ++t) c.features.push_back(centers[s * 4 + t] + spread[t] * g(rng));
    c.values.push_back(c.features[i * 4]);
  }
  return Dataset(std::move(c));
}

// Exactly `duplicates` entities get one extra perturbed copy, as in the
// Fodors-Zagat file (864 rows, 112 duplicate pairs).
Dataset restaurants_standin(std::size_t rows, std::uint64_t seed) {
  const std::size_t duplicates = rows * 112 / 864;
  const std::size_t entities = rows - duplicates;
  Rng rng(seed);
  std::vector<std::size_t> order(entities);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> dup(entities, false);
  for (std::size_t i = 0; i < duplicates; ++i) dup[order[i]] = true;
  DatasetColumns c;
  for (std::size_t e = 0; e < entities; ++e) {
    const auto base = synthetic::random_text(6, derive_seed(seed, {e}));
    const double value = std::floor(uniform01(rng) * 5.0) + 1.0;
    for (std::size_t t = 0; t < (dup[e] ? 2u : 1u); ++t) {
      const auto txt = t == 0 ? base : synthetic::perturb_text(base, 2, derive_seed(seed, {e, 1}));
      c.tokens.push_back(shingle_hashes(txt));
      c.texts.push_back(txt);
      c.entity_labels.push_back("r" + std::to_string(e));
      c.values.push_back(value);
    }
  }
  return Dataset(std::move(c));
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"tpch", "TPC-H lineitem: orderkey and extended price, value = l_extendedprice",
       numeric({"l_orderkey", "l_extendedprice"}, "l_extendedprice"), 1000000},
      {"sensor", "Intel lab readings: temperature, humidity, light, voltage; value = temperature",
       numeric({"temperature", "humidity", "light", "voltage"}, "temperature"), 20000},
      {"publications", "DBLP-Scholar style: title text, cluster id, value = year",
       text("title", "cluster_id", "year", "id"), 5000},
      {"products1", "Abt-Buy style: product name text, cluster id, value = price",
       text("name", "cluster_id", "price", "id"), 2000},
      {"products2", "Amazon-Google style: title text, cluster id, value = price",
       text("title", "cluster_id", "price", "id"), 4000},
      {"restaurants", "Fodors-Zagat style: name and address text, class id, value = rating",
       text("name", "class", "rating", "id"), 864},
  };
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset '" + name + "' (" + known + ")");
}

CsvSchema detect_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("missing header row");
  CsvSchema s;
  for (const auto& h : *header) {
    if (h == "id") s.id_column = h;
    else if (h == "entity") s.entity_column = h;
    else if (h == "value") s.value_column = h;
    else if (h == "text") s.text_column = h;
    else if (h.size() > 1 && h[0] == 'f' &&
             std::all_of(h.begin() + 1, h.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      s.feature_columns.push_back(h);
  }
  if (s.feature_columns.empty() && !s.text_column)
    throw ConfigError(path.string() + " has neither f<j> nor text columns; pass --schema");
  return s;
}

Dataset synthesize(const Preset& preset, std::size_t rows, std::uint64_t seed) {
  if (rows == 0) throw ConfigError("row count must be positive");
  if (preset.name == "tpch") return synthetic::table(rows, seed);
  if (preset.name == "sensor") return sensor_standin(rows, seed);
  if (preset.name == "restaurants") return restaurants_standin(rows, seed);
  // Text catalogs: mostly singletons with some entities repeated.
  const std::vector<double> copies{0.7, 0.2, 0.1};
  const std::size_t entities = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                            static_cast<double>(rows) / 1.4));
  return synthetic::text_corpus(entities, copies, 7, 2, seed);
}

}  // namespace entity_sampler::cli
