#include "evagg/csv.hpp"

#include "evagg/errors.hpp"

namespace evagg {

void append_csv_field(std::string& line, std::string_view text, bool force_quote) {
  const bool quote = force_quote || text.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!quote) {
    line.append(text);
    return;
  }
  line.push_back('"');
  for (char c : text) {
    if (c == '"') line.push_back('"');
    line.push_back(c);
  }
  line.push_back('"');
}

bool CsvReader::next(std::vector<CsvField>& row) {
  row.clear();
  std::string raw;
  if (!std::getline(in_, raw)) return false;
  ++line_;
  const std::size_t start_line = line_;

  CsvField field;
  bool in_quotes = false;
  bool after_quote = false;
  std::size_t i = 0;
  for (;;) {
    if (i >= raw.size()) {
      if (in_quotes) {
        if (!std::getline(in_, raw)) {
          throw IoError("unterminated quoted field starting on line " + std::to_string(start_line));
        }
        ++line_;
        field.text.push_back('\n');
        i = 0;
        continue;
      }
      break;
    }
    char c = raw[i++];
    if (in_quotes) {
      if (c == '"') {
        if (i < raw.size() && raw[i] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.text.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      row.push_back(std::move(field));
      field = CsvField{};
      after_quote = false;
    } else if (c == '"' && field.text.empty() && !field.quoted) {
      field.quoted = true;
      in_quotes = true;
    } else if (c == '\r' && i == raw.size()) {
      // CRLF line ending
    } else if (after_quote) {
      throw IoError("unexpected character after closing quote on line " + std::to_string(line_));
    } else {
      field.text.push_back(c);
    }
  }
  row.push_back(std::move(field));
  return true;
}

}  // namespace evagg
