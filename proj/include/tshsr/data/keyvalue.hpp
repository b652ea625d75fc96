#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tshsr::data {

/// Ordered "key: value" document. Blank lines and lines starting with '#' are
/// ignored; the value is everything after the first ':' with surrounding
/// whitespace trimmed. Keys may repeat.
class KeyValueDoc {
 public:
  using Entry = std::pair<std::string, std::string>;

  static KeyValueDoc parse(const std::string& text);
  /// Throws LoadError if the file cannot be read or a line has no ':'.
  static KeyValueDoc load(const std::filesystem::path& path);

  void add(std::string key, std::string value);
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
  /// Shortest round-trip decimal form.
  void add(std::string key, double value);
  void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }
  template <class T>
  void add(std::string key, T value) { add(std::move(key), std::to_string(value)); }

  std::string str() const;
  /// Throws LoadError on I/O failure.
  void save(const std::filesystem::path& path) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::optional<std::string> find(const std::string& key) const;
  std::vector<std::string> all(const std::string& key) const;

  /// First value of `key`; LoadError naming the key if absent.
  std::string require(const std::string& key) const;
  /// Decimal unsigned integer value; LoadError naming the key if absent or malformed.
  std::uint64_t require_uint(const std::string& key) const;

 private:
  std::vector<Entry> entries_;
};

std::string format_double(double value);
std::uint64_t parse_uint(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);

}  // namespace tshsr::data
