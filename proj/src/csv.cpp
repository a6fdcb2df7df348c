#include "tweetlab/csv.hpp"

#include "tweetlab/common.hpp"

namespace tweetlab::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Writer::Writer(const std::vector<std::string>& header) : width_(header.size()) { row(header); }

Writer& Writer::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_)
    throw Error("InternalError", ErrorCategory::internal, "csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) buffer_.push_back(',');
    buffer_ += escape(fields[i]);
  }
  buffer_.push_back('\n');
  return *this;
}

void Writer::save(const std::filesystem::path& path) const { write_text_file(path, buffer_); }

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DataError("csv column missing: " + std::string(name));
}

Table parse(std::string_view text) {
  Table table;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  auto finish_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (table.header.empty())
      table.header = std::move(record);
    else
      table.rows.push_back(std::move(record));
    record.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',': record.push_back(std::move(field)); field.clear(); any = true; break;
      case '\r': break;
      case '\n': finish_record(); break;
      default: field.push_back(c); any = true;
    }
  }
  if (quoted) throw DataError("csv: unterminated quoted field");
  if (any || !field.empty() || !record.empty()) finish_record();
  for (const auto& r : table.rows)
    if (r.size() != table.header.size()) throw DataError("csv: ragged row");
  return table;
}

Table load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

}  // namespace tweetlab::csv
