#pragma once

// Configuration text: flat `dotted.key = value` lines (values are numbers,
// booleans, strings or [lists]) or the equivalent JSON document. Both are
// turned into the same JSON tree.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "momc/errors.hpp"

namespace momc {

using Json = nlohmann::json;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool is_index(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline Json parse_scalar(const std::string& raw, int line) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value");
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  const char* begin = v.c_str();
  char* end = nullptr;
  if (v.find_first_of(".eE") == std::string::npos) {
    const long long i = std::strtoll(begin, &end, 10);
    if (end == begin + v.size()) return i;
  }
  const double d = std::strtod(begin, &end);
  if (end == begin + v.size()) return d;
  return v;
}

inline Json parse_value(const std::string& raw, int line) {
  const std::string v = trim(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated list");
    Json arr = Json::array();
    const std::string body = trim(v.substr(1, v.size() - 2));
    if (body.empty()) return arr;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(parse_scalar(item, line));
    return arr;
  }
  return parse_scalar(v, line);
}

inline void assign_path(Json& root, const std::string& key, Json value, int line) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    part = trim(part);
    if (part.empty()) throw ConfigError("line " + std::to_string(line) + ": malformed key '" + key + "'");
    parts.push_back(part);
  }
  if (parts.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
  Json* node = &root;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const bool last = k + 1 == parts.size();
    if (is_index(parts[k])) {
      const std::size_t idx = std::stoul(parts[k]);
      if (node->is_null()) *node = Json::array();
      if (!node->is_array()) {
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "' mixes list and table");
      }
      while (node->size() <= idx) node->push_back(nullptr);
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = Json::object();
      if (!node->is_object()) {
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "' mixes value and table");
      }
      node = &(*node)[parts[k]];
    }
    if (last) {
      if (!node->is_null()) {
        throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
      }
      *node = std::move(value);
    }
  }
}

}  // namespace detail

/// Parses flat key-value text. '#' starts a comment outside quotes.
inline Json parse_flat_config(const std::string& text) {
  Json root = Json::object();
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool quoted = false;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if ((c == '"' || c == '\'') && (!quoted || c == quote)) {
        quoted = !quoted;
        quote = c;
      } else if (c == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    detail::assign_path(root, detail::trim(line.substr(0, eq)),
                        detail::parse_value(line.substr(eq + 1), lineno), lineno);
  }
  return root;
}

/// JSON documents are recognised by a leading '{'.
inline Json parse_config_text(const std::string& text) {
  const std::string t = detail::trim(text);
  if (!t.empty() && t.front() == '{') {
    try {
      return Json::parse(t);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
  }
  return parse_flat_config(text);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

inline Json load_config(const std::string& path) { return parse_config_text(read_text_file(path)); }

}  // namespace momc
