#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dchoice {

// Header plus rectangular body of text cells.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t row_count() const { return rows.size(); }
  // Index of a named column, or npos.
  std::size_t find_column(std::string_view name) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
// quoted fields may hold commas and line breaks. Accepts LF or CRLF record
// endings and a leading UTF-8 byte-order mark; wholly empty lines are
// skipped. Throws ParseError on empty input, a ragged record (reporting its
// 1-based record number, header = 1) or an unterminated quote.
RawTable parse_csv(std::string_view text);
RawTable read_csv_file(const std::string& path);

// A single field, quoted if it holds a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

// Writes a table that parse_csv reads back cell-for-cell. Fields are quoted
// only when they contain a comma, quote, CR or LF. Records end in LF.
void write_csv(std::ostream& out, const RawTable& table);

}  // namespace dchoice
