#pragma once

// Small helpers shared by the instance and model readers: field access with
// path context and parse errors with line/column positions.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "techroute/errors.hpp"

namespace techroute::detail {

using nlohmann::json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline json parse_document(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t k = 0; k + 1 < limit; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(origin + ":" + std::to_string(line) + ":" +
                     std::to_string(column) + ": " + e.what());
  }
}

inline const json& field(const json& obj, const std::string& key,
                         const std::string& path) {
  if (!obj.is_object())
    throw ParseError("field '" + path + "': expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError("field '" + path + "." + key + "': missing");
  return *it;
}

template <typename T>
T get_as(const json& value, const std::string& path) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ParseError("field '" + path + "': " + e.what());
  }
}

template <typename T>
T read_field(const json& obj, const std::string& key, const std::string& path) {
  return get_as<T>(field(obj, key, path), path + "." + key);
}

inline void note_unknown_keys(const json& obj, const std::set<std::string>& known,
                              const std::string& path,
                              std::vector<std::string>* warnings) {
  if (!warnings || !obj.is_object()) return;
  for (const auto& item : obj.items())
    if (!known.contains(item.key()))
      warnings->push_back("unknown field '" + path + "." + item.key() +
                          "' ignored");
}

}  // namespace techroute::detail
