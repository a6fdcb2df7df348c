#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tweetlab::csv {

/// Accumulates an RFC 4180 style table; fields are quoted only when needed.
class Writer {
public:
  explicit Writer(const std::vector<std::string>& header);

  Writer& row(const std::vector<std::string>& fields);
  const std::string& str() const { return buffer_; }
  void save(const std::filesystem::path& path) const;

private:
  std::size_t width_;
  std::string buffer_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws DataError if absent.
  std::size_t column(std::string_view name) const;
};

Table parse(std::string_view text);
Table load(const std::filesystem::path& path);

std::string escape(std::string_view field);

}  // namespace tweetlab::csv
