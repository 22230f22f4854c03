// SPDX-License-Identifier: Apache-2.0
//
// Small text I/O helpers: header-checked CSV reading, number formatting,
// atomic file replacement and the flat `key = value` config format.

#ifndef MSRL_IO_HPP_
#define MSRL_IO_HPP_

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "msrl/common.hpp"

namespace msrl {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

// Shortest round-trip representation of a double.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Fixed 17 significant digits, used by the checkpoint format.
inline std::string fmt_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Row-by-row CSV reader that validates the header against `expected`.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::vector<std::string> expected)
      : in_(in), expected_(std::move(expected)) {
    std::string header;
    if (!std::getline(in_, header)) {
      throw ParseError("missing header, expected " + joined(), 1);
    }
    line_ = 1;
    if (split(trim(header), ',') != expected_) {
      throw ParseError("bad header '" + std::string(trim(header)) +
                           "', expected " + joined(),
                       1);
    }
  }

  // Next non-empty row; false at end of input.
  bool next(std::vector<std::string>& fields) {
    std::string row;
    while (std::getline(in_, row)) {
      ++line_;
      if (trim(row).empty()) continue;
      fields = split(row, ',');
      if (fields.size() != expected_.size()) {
        throw ParseError("expected " + std::to_string(expected_.size()) +
                             " fields, got " + std::to_string(fields.size()),
                         line_);
      }
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

  double number(const std::string& field, const char* name) const {
    auto v = parse_double(field);
    if (!v) throw ParseError(std::string("bad number for ") + name, line_);
    return *v;
  }

  long long integer(const std::string& field, const char* name) const {
    auto v = parse_int(field);
    if (!v) throw ParseError(std::string("bad integer for ") + name, line_);
    return *v;
  }

 private:
  std::string joined() const {
    std::string s;
    for (std::size_t i = 0; i < expected_.size(); ++i) {
      if (i) s += ',';
      s += expected_[i];
    }
    return s;
  }

  std::istream& in_;
  std::vector<std::string> expected_;
  std::size_t line_ = 0;
};

// Writes `content` to `path` through `path.partial` + rename, so readers never
// observe a truncated file under the final name.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Flat `key = value` configuration. `#` starts a comment.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string row;
    std::size_t line = 0;
    while (std::getline(in, row)) {
      ++line;
      auto hash = row.find('#');
      std::string_view body = trim(std::string_view(row).substr(0, hash));
      if (body.empty()) continue;
      auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError("expected 'key = value'", line);
      }
      auto key = std::string(trim(body.substr(0, eq)));
      auto value = std::string(trim(body.substr(eq + 1)));
      if (key.empty()) throw ParseError("empty key", line);
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig parse_string(const std::string& text) {
    std::istringstream ss(text);
    return parse(ss);
  }

  static KeyValueConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    try {
      return parse(in);
    } catch (const ParseError& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

  void merge(const KeyValueConfig& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto v = parse_double(it->second);
    if (!v) throw ConfigError("key '" + key + "': not a number: " + it->second);
    return *v;
  }

  long long get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto v = parse_int(it->second);
    if (!v) throw ConfigError("key '" + key + "': not an integer: " + it->second);
    return *v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto& s = it->second;
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("key '" + key + "': not a boolean: " + s);
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace msrl

#endif  // MSRL_IO_HPP_
