#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace entity_sampler::csv {

// Minimal RFC-4180 style reader: quoted fields, doubled quotes, CRLF.
// Lines starting with '#' outside a quoted field are skipped.
class Reader {
 public:
  explicit Reader(std::istream& in, char delimiter = ',') : in_(in), delim_(delimiter) {}

  // Next record, or nullopt at end of input. Throws DataError on an
  // unterminated quote.
  std::optional<std::vector<std::string>> next();

  // 1-based physical line number of the last record returned.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  char delim_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

// Locale-independent, exact round-trip formatting of doubles.
std::string format_double(double v);

// Parses a whole field as a double; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view s);

}  // namespace entity_sampler::csv
