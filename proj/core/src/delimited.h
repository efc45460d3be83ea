#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace multisiam::detail {

struct DelimitedRow {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the row starts
};

/// RFC-4180 style reader: fields may be wrapped in double quotes, quotes are
/// escaped by doubling, quoted fields may contain the delimiter and newlines.
/// CRLF and LF line endings are both accepted; blank lines are skipped.
std::vector<DelimitedRow> parse_delimited(std::string_view content, char delimiter);

std::string read_file(const std::string& path);

}  // namespace multisiam::detail
