#include "entity_sampler/report.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "entity_sampler/csv.hpp"
#include "entity_sampler/error.hpp"

namespace entity_sampler {

namespace {

using csv::format_double;

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

std::string key(double v) { return format_double(v); }

// (dup_rate or "", fraction) -> accuracy
std::map<std::pair<std::string, std::string>, double> read_baseline(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open baseline " + p.string());
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("empty baseline file");
  int fi = -1, ai = -1, di = -1;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if ((*header)[i] == "fraction") fi = static_cast<int>(i);
    if ((*header)[i] == "accuracy") ai = static_cast<int>(i);
    if ((*header)[i] == "dup_rate") di = static_cast<int>(i);
  }
  if (fi < 0 || ai < 0) throw DataError("baseline needs fraction and accuracy columns");
  std::map<std::pair<std::string, std::string>, double> out;
  while (auto row = reader.next()) {
    if (row->size() != header->size()) throw DataError("ragged baseline row", reader.line());
    const auto f = csv::parse_double((*row)[fi]);
    const auto a = csv::parse_double((*row)[ai]);
    if (!f || !a) throw DataError("bad number in baseline", reader.line());
    std::string d;
    if (di >= 0) {
      const auto dv = csv::parse_double((*row)[di]);
      if (!dv) throw DataError("bad dup_rate in baseline", reader.line());
      d = key(*dv);
    }
    out[{d, key(*f)}] = *a;
  }
  return out;
}

}  // namespace

void write_cells_csv(std::ostream& out, const SampleReport& report) {
  csv::write_row(out, {"method", "dup_rate", "fraction", "m", "repeats", "ok_repeats",
                       "mean_error", "stderr_error", "mean_accuracy", "mean_naive_error",
                       "mean_tv", "mean_acceptance", "mean_trials_per_accept", "mean_bound",
                       "failures"});
  const std::string method = to_string(report.spec.method);
  for (const auto& c : report.cells) {
    csv::write_row(out, {method, format_double(c.dup_rate), format_double(c.fraction),
                         std::to_string(c.m), std::to_string(report.spec.repeats),
                         std::to_string(c.ok_repeats), format_double(c.mean_error),
                         format_double(c.stderr_error), format_double(1.0 - c.mean_error),
                         format_double(c.mean_naive_error), format_double(c.mean_tv),
                         format_double(c.mean_acceptance), format_double(c.mean_trials_per_accept),
                         format_double(c.mean_bound), std::to_string(c.failures)});
  }
}

void write_grid_csv(std::ostream& out, const SampleReport& report) {
  std::vector<std::string> row{"dup_rate"};
  for (double f : report.spec.fractions) row.push_back(format_double(f));
  csv::write_row(out, row);
  for (std::size_t d = 0; d < report.spec.dup_rates.size(); ++d) {
    row.assign(1, format_double(report.spec.dup_rates[d]));
    for (std::size_t f = 0; f < report.spec.fractions.size(); ++f)
      row.push_back(format_double(report.cell(d, f).mean_error));
    csv::write_row(out, row);
  }
}

void write_figure_csv(std::ostream& out, const SampleReport& report,
                      const std::optional<std::filesystem::path>& baseline_csv) {
  std::map<std::pair<std::string, std::string>, double> base;
  if (baseline_csv) base = read_baseline(*baseline_csv);
  std::vector<std::string> header{"dup_rate", "fraction", "error", "accuracy", "bound"};
  if (baseline_csv) header.push_back("baseline_accuracy");
  csv::write_row(out, header);
  for (const auto& c : report.cells) {
    std::vector<std::string> row{format_double(c.dup_rate), format_double(c.fraction),
                                 format_double(c.mean_error), format_double(1.0 - c.mean_error),
                                 format_double(c.mean_bound)};
    if (baseline_csv) {
      auto it = base.find({key(c.dup_rate), key(c.fraction)});
      if (it == base.end()) it = base.find({"", key(c.fraction)});
      row.push_back(it == base.end() ? "" : format_double(it->second));
    }
    csv::write_row(out, row);
  }
}

std::string summary_json(const SampleReport& report) {
  nlohmann::json j;
  j["spec"] = nlohmann::json::parse(experiment_to_json(report.spec));
  j["clean_size"] = report.clean_size;
  j["clean_mean"] = report.clean_mean;
  j["seconds"] = report.seconds;
  j["failures"] = report.total_failures();
  auto cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json x;
    x["dup_rate"] = c.dup_rate;
    x["fraction"] = c.fraction;
    x["m"] = c.m;
    x["ok_repeats"] = c.ok_repeats;
    x["mean_error"] = c.mean_error;
    x["stderr_error"] = c.stderr_error;
    x["mean_naive_error"] = c.mean_naive_error;
    x["mean_tv"] = c.mean_tv;
    x["mean_acceptance"] = c.mean_acceptance;
    x["mean_trials_per_accept"] = c.mean_trials_per_accept;
    x["mean_bound"] = c.mean_bound;
    x["seconds"] = c.seconds;
    x["failures"] = c.failures;
    x["errors"] = c.errors;
    cells.push_back(std::move(x));
  }
  j["cells"] = std::move(cells);
  return j.dump(2);
}

SampleReport report_from_json(const std::string& text) {
  SampleReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.spec = parse_experiment_json(j.at("spec").dump());
    r.clean_size = j.at("clean_size").get<std::size_t>();
    r.clean_mean = j.at("clean_mean").get<double>();
    r.seconds = j.value("seconds", 0.0);
    for (const auto& x : j.at("cells")) {
      CellResult c;
      c.dup_rate = x.at("dup_rate").get<double>();
      c.fraction = x.at("fraction").get<double>();
      c.m = x.at("m").get<std::size_t>();
      c.ok_repeats = x.at("ok_repeats").get<std::size_t>();
      c.mean_error = x.at("mean_error").get<double>();
      c.stderr_error = x.at("stderr_error").get<double>();
      c.mean_naive_error = x.at("mean_naive_error").get<double>();
      c.mean_tv = x.at("mean_tv").get<double>();
      c.mean_acceptance = x.at("mean_acceptance").get<double>();
      c.mean_trials_per_accept = x.at("mean_trials_per_accept").get<double>();
      c.mean_bound = x.at("mean_bound").get<double>();
      c.seconds = x.value("seconds", 0.0);
      c.failures = x.at("failures").get<std::size_t>();
      c.errors = x.value("errors", std::vector<std::string>{});
      r.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid report JSON: ") + e.what());
  }
  if (r.cells.size() != r.spec.fractions.size() * r.spec.dup_rates.size())
    throw ConfigError("report JSON has " + std::to_string(r.cells.size()) +
                      " cells; the sweep needs " +
                      std::to_string(r.spec.fractions.size() * r.spec.dup_rates.size()));
  return r;
}

std::vector<std::filesystem::path> emit_report(const SampleReport& report,
                                               const std::filesystem::path& dir,
                                               const ReportOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, auto&& fn) {
    const auto p = dir / name;
    auto out = open_out(p);
    fn(out);
    if (!out) throw ConfigError("write failed: " + p.string());
    written.push_back(p);
  };
  emit(opts.prefix + "_cells.csv", [&](std::ostream& o) { write_cells_csv(o, report); });
  emit(opts.prefix + "_grid.csv", [&](std::ostream& o) { write_grid_csv(o, report); });
  emit(opts.prefix + "_figure.csv",
       [&](std::ostream& o) { write_figure_csv(o, report, opts.baseline_csv); });
  emit(opts.prefix + ".json", [&](std::ostream& o) { o << summary_json(report) << '\n'; });
  return written;
}

}  // namespace entity_sampler
