#pragma once

// Response structure: exactly one formalization, think and answer block, in
// that order, separated only by whitespace.

#include <array>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "geokit/error.hpp"

namespace geokit::rewards {

struct TagPair {
  std::string open;
  std::string close;
};

struct Tagset {
  TagPair formalization{"<formalization>", "</formalization>"};
  TagPair think{"<think>", "</think>"};
  TagPair answer{"<answer>", "</answer>"};
  // Section headers that split a formalization block into its two CDL parts.
  std::string conscdl_marker = "consCDL:";
  std::string imgcdl_marker = "imgCDL:";

  static Tagset from_json(const nlohmann::json& j) {
    Tagset t;
    const auto read_pair = [&](const char* key, TagPair& p) {
      if (!j.contains(key)) return;
      p.open = j.at(key).at("open").get<std::string>();
      p.close = j.at(key).at("close").get<std::string>();
      if (p.open.empty() || p.close.empty()) {
        throw InvalidArgument(std::string("tagset: empty tag for ") + key);
      }
    };
    read_pair("formalization", t.formalization);
    read_pair("think", t.think);
    read_pair("answer", t.answer);
    t.conscdl_marker = j.value("conscdl_marker", t.conscdl_marker);
    t.imgcdl_marker = j.value("imgcdl_marker", t.imgcdl_marker);
    return t;
  }

  static Tagset load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open tagset '" + path + "'");
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("tagset '" + path + "': " + e.what());
    }
  }

  std::array<const std::string*, 6> all_tags() const {
    return {&formalization.open, &formalization.close, &think.open,
            &think.close,        &answer.open,         &answer.close};
  }
};

struct Blocks {
  std::string formalization;
  std::string think;
  std::string answer;

  bool operator==(const Blocks&) const = default;
};

struct FormatViolation {
  std::size_t offset = 0;
  std::string message;
};

using BlockParse = std::variant<Blocks, FormatViolation>;

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace detail

/// Returns the three inner texts, or the first structural defect.
inline BlockParse parse_blocks(std::string_view raw, const Tagset& tags = {}) {
  std::size_t pos = 0;
  const auto skip_ws = [&] {
    while (pos < raw.size() && detail::is_space(raw[pos])) ++pos;
  };

  const TagPair* order[3] = {&tags.formalization, &tags.think, &tags.answer};
  std::string* slots[3];
  Blocks out;
  slots[0] = &out.formalization;
  slots[1] = &out.think;
  slots[2] = &out.answer;

  for (int k = 0; k < 3; ++k) {
    const TagPair& pair = *order[k];
    skip_ws();
    if (raw.substr(pos, pair.open.size()) != pair.open) {
      return FormatViolation{pos, "expected " + pair.open};
    }
    const std::size_t body = pos + pair.open.size();
    const std::size_t close = raw.find(pair.close, body);
    if (close == std::string_view::npos) {
      return FormatViolation{body, "unclosed " + pair.open};
    }
    const std::string_view inner = raw.substr(body, close - body);
    for (const auto* tag : tags.all_tags()) {
      const auto hit = inner.find(*tag);
      if (hit != std::string_view::npos) {
        return FormatViolation{body + hit, "stray " + *tag + " inside " + pair.open};
      }
    }
    *slots[k] = std::string(inner);
    pos = close + pair.close.size();
  }
  skip_ws();
  if (pos != raw.size()) {
    return FormatViolation{pos, "unexpected content after " + tags.answer.close};
  }
  return out;
}

inline bool is_well_formed(const BlockParse& p) { return std::holds_alternative<Blocks>(p); }

inline double format_reward(std::string_view raw, const Tagset& tags = {}) {
  return is_well_formed(parse_blocks(raw, tags)) ? 1.0 : 0.0;
}

}  // namespace geokit::rewards
