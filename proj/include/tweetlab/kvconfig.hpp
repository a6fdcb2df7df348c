#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tweetlab {

/// `key = value` lines; `#` starts a comment line. Later keys override
/// earlier ones. Unknown keys are reported by `unused_keys()` so callers can
/// reject typos.
class KeyValueConfig {
public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text, std::filesystem::path base_dir = {});
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list, entries trimmed, empties dropped.
  std::vector<std::string> get_list(const std::string& key) const;
  /// Relative paths resolve against the directory of the config file.
  std::optional<std::filesystem::path> get_path(const std::string& key) const;
  std::vector<std::filesystem::path> get_path_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  std::vector<std::string> unused_keys() const;

private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> touched_;
  std::filesystem::path base_dir_;
};

}  // namespace tweetlab
