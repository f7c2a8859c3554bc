#pragma once

#include <fstream>
#include <functional>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "geokit/detail/numeric.hpp"
#include "geokit/error.hpp"

namespace geokit::ingest {

/// Input-file problem. `line` is 1-based, 0 when not tied to a line.
class IngestError : public Error {
 public:
  IngestError(std::string path, std::size_t line, const std::string& what)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Calls `fn(object, line_number)` for every non-blank line. Each line must
/// hold one JSON object.
inline void for_each_jsonl(const std::string& path, std::string_view content,
                           const std::function<void(const nlohmann::json&, std::size_t)>& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const auto nl = content.find('\n', pos);
    const auto end = nl == std::string_view::npos ? content.size() : nl;
    const auto line = content.substr(pos, end - pos);
    ++line_no;
    if (!geokit::detail::trim(line).empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw IngestError(path, line_no, std::string("malformed JSON: ") + e.what());
      }
      if (!j.is_object()) throw IngestError(path, line_no, "expected a JSON object");
      fn(j, line_no);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

/// First present key among `names`.
inline const nlohmann::json* find_field(const nlohmann::json& j,
                                        std::initializer_list<const char*> names) {
  for (const char* n : names) {
    const auto it = j.find(n);
    if (it != j.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

/// Strings verbatim, numbers in their JSON spelling, string arrays joined by
/// newlines (CDL fields are often stored as statement lists).
inline std::optional<std::string> text_field(const nlohmann::json& j,
                                             std::initializer_list<const char*> names,
                                             const std::string& path, std::size_t line) {
  const auto* v = find_field(j, names);
  if (!v) return std::nullopt;
  if (v->is_string()) return v->get<std::string>();
  if (v->is_number()) return v->dump();
  if (v->is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        throw IngestError(path, line, std::string("field '") + *names.begin() +
                                          "' must be a string or a list of strings");
      }
      if (i) out += '\n';
      out += (*v)[i].get<std::string>();
    }
    return out;
  }
  throw IngestError(path, line, std::string("field '") + *names.begin() + "' has the wrong type");
}

inline std::string required_text(const nlohmann::json& j, std::initializer_list<const char*> names,
                                 const std::string& path, std::size_t line) {
  auto v = text_field(j, names, path, line);
  if (!v) throw IngestError(path, line, std::string("missing field '") + *names.begin() + "'");
  return *v;
}

}  // namespace geokit::ingest
