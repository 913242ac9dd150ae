#include "dchoice/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "dchoice/errors.hpp"

namespace dchoice {

std::size_t RawTable::find_column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  return npos;
}

RawTable parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  if (text.empty()) throw ParseError("CSV input is empty");

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes "" (one empty field) from a blank line

  auto end_record = [&] {
    if (field_started || !record.empty()) {
      record.push_back(std::move(field));
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("CSV input ends inside a quoted field", records.size() + 1);
  end_record();

  if (records.empty()) throw ParseError("CSV input has no header record");

  RawTable table;
  table.columns = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.columns.size()) {
      std::ostringstream msg;
      msg << "CSV record " << r + 1 << " has " << records[r].size() << " fields, header has "
          << table.columns.size();
      throw ParseError(msg.str(), r + 1);
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

RawTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open data file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.row());
  }
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

void write_record(std::ostream& out, const std::vector<std::string>& record) {
  for (std::size_t c = 0; c < record.size(); ++c) {
    if (c) out << ',';
    out << csv_escape(record[c]);
  }
  // A lone empty field would otherwise read back as a skipped blank line.
  if (record.size() == 1 && record[0].empty()) out << "\"\"";
  out << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const RawTable& table) {
  write_record(out, table.columns);
  for (const auto& row : table.rows) write_record(out, row);
}

}  // namespace dchoice
