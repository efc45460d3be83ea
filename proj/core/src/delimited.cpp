#include "delimited.h"

#include <fstream>
#include <sstream>

#include "multisiam/errors.h"

namespace multisiam::detail {

std::vector<DelimitedRow> parse_delimited(std::string_view content, char delimiter) {
  std::vector<DelimitedRow> rows;
  DelimitedRow row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  row.line = 1;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row = DelimitedRow{};
    row.line = line;
  };

  // Skip a UTF-8 byte order mark.
  std::size_t i = content.substr(0, 3) == "\xEF\xBB\xBF" ? 3 : 0;
  for (; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      // handled with the following '\n'
    } else if (c == '\n') {
      ++line;
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field starting on line " + std::to_string(row.line));
  if (field_started || !field.empty() || !row.fields.empty()) end_row();
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("error reading '" + path + "'");
  return buf.str();
}

}  // namespace multisiam::detail
