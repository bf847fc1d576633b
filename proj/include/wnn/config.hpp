#pragma once

// Flat experiment configuration: one `key = value` per line, dotted section prefixes
// (`graphon.family = cosine`), `#` comments. Lists are comma separated.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wnn/error.hpp"

namespace wnn {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

class Config {
 public:
  Config() = default;

  static Config parse(std::istream& is, const std::string& source = "<config>") {
    Config c;
    std::string line;
    for (int lineno = 1; std::getline(is, line); ++lineno) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = detail::trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
      c.set(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)), source + ":" + std::to_string(lineno));
    }
    return c;
  }

  static Config parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is, "<string>");
  }

  static Config from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse(is, path);
  }

  void set(const std::string& key, const std::string& value, const std::string& where = "override") {
    if (key.empty()) throw ConfigError(where + ": empty key");
    for (char ch : key)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '-'))
        throw ConfigError(where + ": invalid character in key '" + key + "'");
    values_[key] = value;
  }

  /// Applies one `key=value` override.
  void apply_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not key=value");
    set(detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)), "--set " + kv);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::vector<std::string> keys() const {
    std::vector<std::string> k;
    for (const auto& [key, v] : values_) k.push_back(key);
    return k;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(key, it->second);
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : to_uint(key, it->second);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + it->second + "'");
  }

  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : detail::split_list(it->second);
  }

  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& s : detail::split_list(it->second)) out.push_back(to_double(key, s));
    return out;
  }

  /// Positive integers; an empty list is a configuration error.
  std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& fallback) const {
    const auto it = values_.find(key);
    std::vector<std::size_t> out;
    if (it == values_.end()) {
      out = fallback;
    } else {
      for (const auto& s : detail::split_list(it->second)) out.push_back(static_cast<std::size_t>(to_uint(key, s)));
    }
    if (out.empty()) throw ConfigError(key + ": list of sizes is empty");
    for (auto n : out)
      if (n == 0) throw ConfigError(key + ": sizes must be positive");
    return out;
  }

  /// Rejects keys under the given section prefixes that are not in `known`.
  void check_known(const std::vector<std::string>& prefixes, const std::set<std::string>& known) const {
    for (const auto& [key, v] : values_)
      for (const auto& p : prefixes)
        if (key.rfind(p + ".", 0) == 0 && !known.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }

 private:
  static double to_double(const std::string& key, const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ConfigError("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected a number, got '" + s + "'");
    }
  }

  static std::uint64_t to_uint(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
    return v;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace wnn
