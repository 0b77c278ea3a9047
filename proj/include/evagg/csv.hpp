#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace evagg {

/// RFC 4180 field. `quoted` records whether the source wrapped it in quotes,
/// which is how an empty string is told apart from a missing value.
struct CsvField {
  std::string text;
  bool quoted = false;
};

/// Appends one field, quoting when needed or when `force_quote` is set.
void append_csv_field(std::string& line, std::string_view text, bool force_quote = false);

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads one record, which may span lines inside quotes. Returns false at
  /// end of input. Throws IoError on an unterminated quote.
  bool next(std::vector<CsvField>& row);

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace evagg
