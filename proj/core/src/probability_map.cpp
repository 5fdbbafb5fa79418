#include "entity_sampler/probability_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

#include "entity_sampler/csv.hpp"
#include "entity_sampler/error.hpp"

namespace entity_sampler {

ProbabilityMap::ProbabilityMap(std::vector<double> phat, std::string source,
                               std::vector<std::uint32_t> cluster_ids)
    : phat_(std::move(phat)), clusters_(std::move(cluster_ids)), source_(std::move(source)) {
  if (phat_.empty()) throw CoverageError("empty probability map");
  if (!clusters_.empty() && clusters_.size() != phat_.size())
    throw CoverageError("cluster ids do not match the probability map size");
  floor_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phat_.size(); ++i) {
    const double p = phat_[i];
    if (!(p > 0.0) || !(p <= 1.0))
      throw CoverageError("invalid probability " + csv::format_double(p) + " at record " +
                          std::to_string(i));
    floor_ = std::min(floor_, p);
  }
}

void ProbabilityMap::check_covers(const Dataset& data) const {
  if (phat_.size() != data.size())
    throw CoverageError("probability map has " + std::to_string(phat_.size()) +
                        " entries for " + std::to_string(data.size()) + " records");
}

ProbabilityMap exact_probability_map(const Dataset& data) {
  const auto table = EntityTable::from(data);
  std::vector<double> phat(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) phat[i] = table.prob[data.entity_of(i)];
  std::vector<std::uint32_t> clusters(data.entity_index().begin(), data.entity_index().end());
  return ProbabilityMap(std::move(phat), "exact", std::move(clusters));
}

void write_probability_csv(const std::filesystem::path& path, const Dataset& data,
                           const ProbabilityMap& map) {
  map.check_covers(data);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# source=" << map.source() << '\n';
  std::vector<std::string> row{"record_id", "phat"};
  if (map.has_clusters()) row.push_back("cluster");
  csv::write_row(out, row);
  for (std::size_t i = 0; i < map.size(); ++i) {
    row[0] = data.id(i);
    row[1] = csv::format_double(map[i]);
    if (map.has_clusters()) row[2] = std::to_string(map.cluster_ids()[i]);
    csv::write_row(out, row);
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

ProbabilityMap read_probability_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());

  std::string source = "file";
  {
    std::string first;
    const auto pos = in.tellg();
    if (std::getline(in, first) && first.rfind("# source=", 0) == 0) {
      source = first.substr(9);
      while (!source.empty() && (source.back() == '\r' || source.back() == ' ')) source.pop_back();
    } else {
      in.clear();
      in.seekg(pos);
    }
  }

  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() < 2 || (*header)[0] != "record_id" || (*header)[1] != "phat")
    throw DataError("probability file must start with header record_id,phat");
  const bool with_clusters = header->size() >= 3 && (*header)[2] == "cluster";

  std::vector<double> phat(data.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint32_t> clusters(with_clusters ? data.size() : 0);
  while (auto row = reader.next()) {
    if (row->size() != header->size())
      throw DataError("expected " + std::to_string(header->size()) + " fields", reader.line());
    const auto idx = data.find_id((*row)[0]);
    if (!idx) throw CoverageError("record id '" + (*row)[0] + "' is not in the dataset");
    const auto p = csv::parse_double((*row)[1]);
    if (!p) throw DataError("bad probability '" + (*row)[1] + "'", reader.line());
    phat[*idx] = *p;
    if (with_clusters) {
      const auto c = csv::parse_double((*row)[2]);
      if (!c || *c < 0) throw DataError("bad cluster id '" + (*row)[2] + "'", reader.line());
      clusters[*idx] = static_cast<std::uint32_t>(*c);
    }
  }
  for (std::size_t i = 0; i < phat.size(); ++i)
    if (std::isnan(phat[i])) throw CoverageError("no probability for record '" + data.id(i) + "'");
  return ProbabilityMap(std::move(phat), source, std::move(clusters));
}

}  // namespace entity_sampler
