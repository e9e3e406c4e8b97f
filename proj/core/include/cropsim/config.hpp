#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cropsim {

/// Raised for any invalid configuration value, missing file or unknown key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration.
///
/// Lines starting with `#` and blank lines are ignored; later assignments
/// override earlier ones. Every typed read marks the key as consumed so that
/// callers can reject keys nobody asked for (typos in config files).
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Parses `key=value` as given on a command line.
  void set_assignment(const std::string& assignment);
  /// Values in `other` win.
  void merge(const Config& other);

  bool contains(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

  double get(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  /// Keys never read through a typed getter.
  std::vector<std::string> unused_keys() const;
  /// Throws ConfigError naming every unused key.
  void require_all_used() const;

  /// Serializes back to `key = value` lines (sorted by key).
  std::string to_string() const;

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace cropsim
