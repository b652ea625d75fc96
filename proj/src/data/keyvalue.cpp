#include "tshsr/data/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tshsr/errors.hpp"

namespace tshsr::data {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(const std::string& text) {
  KeyValueDoc doc;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) {
      throw LoadError("line " + std::to_string(lineno) + ": expected 'key: value', got '" + t + "'");
    }
    doc.entries_.emplace_back(trim(t.substr(0, colon)), trim(t.substr(colon + 1)));
  }
  return doc;
}

KeyValueDoc KeyValueDoc::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void KeyValueDoc::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

void KeyValueDoc::add(std::string key, double value) { add(std::move(key), format_double(value)); }

std::string KeyValueDoc::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + ": " + v + "\n";
  return out;
}

void KeyValueDoc::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out << str();
  if (!out) throw LoadError("failed writing " + path.string());
}

std::optional<std::string> KeyValueDoc::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<std::string> KeyValueDoc::all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::string KeyValueDoc::require(const std::string& key) const {
  auto v = find(key);
  if (!v) throw LoadError("missing field '" + key + "'");
  return *v;
}

std::uint64_t KeyValueDoc::require_uint(const std::string& key) const {
  const std::string v = require(key);
  try {
    return parse_uint(v, key);
  } catch (const ConfigError& e) {
    throw LoadError(e.what());
  }
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::uint64_t parse_uint(const std::string& text, const std::string& what) {
  std::uint64_t out = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError("field '" + what + "': expected a non-negative integer, got '" + text + "'");
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  double out = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError("field '" + what + "': expected a number, got '" + text + "'");
  }
  return out;
}

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw ConfigError("field '" + what + "': expected true/false, got '" + text + "'");
}

}  // namespace tshsr::data
