#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "geokit/cdl.hpp"
#include "geokit/detail/numeric.hpp"
#include "geokit/rewards/blocks.hpp"
#include "geokit/rewards/levenshtein.hpp"

namespace geokit::rewards {

enum class AnswerKind { Choice, Open };

struct GoldAnswer {
  std::string answer;
  AnswerKind kind = AnswerKind::Open;
  cdl::Document conscdl{cdl::Role::Construction, {}, false};
  cdl::Document imgcdl{cdl::Role::Image, {}, false};
};

struct RolloutRecord {
  std::string raw_text;
  std::optional<Blocks> blocks;
  GoldAnswer gold;
};

inline RolloutRecord make_rollout(std::string raw_text, GoldAnswer gold, const Tagset& tags = {}) {
  RolloutRecord r{std::move(raw_text), std::nullopt, std::move(gold)};
  auto parsed = parse_blocks(r.raw_text, tags);
  if (auto* b = std::get_if<Blocks>(&parsed)) r.blocks = std::move(*b);
  return r;
}

struct RewardBreakdown {
  double format = 0.0;
  double formalization = 0.0;
  double accuracy = 0.0;
  double total = 0.0;
};

// ---------------------------------------------------------------------------
// Formalization

struct FormalizationText {
  std::string conscdl;
  std::string imgcdl;
};

/// Splits text at the consCDL/imgCDL section markers. A section runs until
/// the other marker or the end of the text; a missing marker yields "".
inline FormalizationText split_formalization(std::string_view text, const Tagset& tags = {}) {
  const auto c = text.find(tags.conscdl_marker);
  const auto i = text.find(tags.imgcdl_marker);
  const auto section = [&](std::size_t start, std::size_t marker_len, std::size_t other) {
    if (start == std::string_view::npos) return std::string();
    const std::size_t body = start + marker_len;
    const std::size_t end = (other != std::string_view::npos && other > start) ? other : text.size();
    return std::string(geokit::detail::trim(text.substr(body, end - body)));
  };
  return {section(c, tags.conscdl_marker.size(), i), section(i, tags.imgcdl_marker.size(), c)};
}

/// Canonical serialization when `text` parses, the trimmed raw text otherwise.
inline std::string normalize_prediction(std::string_view text, cdl::Role role,
                                        const cdl::SymmetryTable& table) {
  try {
    return cdl::serialize(cdl::canonicalize(cdl::parse_cdl(text, role), table));
  } catch (const cdl::ParseError&) {
    return std::string(geokit::detail::trim(text));
  }
}

/// 1 - d / max(|gold|, 1), lengths in code points. May be negative.
inline double similarity_score(std::string_view pred, std::string_view gold) {
  const double d = static_cast<double>(levenshtein(pred, gold));
  const double denom = static_cast<double>(std::max<std::size_t>(char_length(gold), 1));
  return 1.0 - d / denom;
}

inline double formalization_reward(std::string_view pred_cons, std::string_view pred_img,
                                   const cdl::Document& gold_cons, const cdl::Document& gold_img,
                                   const cdl::SymmetryTable& table) {
  const auto gc = cdl::serialize(cdl::canonicalize(gold_cons, table));
  const auto gi = cdl::serialize(cdl::canonicalize(gold_img, table));
  const auto pc = normalize_prediction(pred_cons, cdl::Role::Construction, table);
  const auto pi = normalize_prediction(pred_img, cdl::Role::Image, table);
  const double s = (similarity_score(pc, gc) + similarity_score(pi, gi)) / 2.0;
  return std::max(0.0, s);
}

// ---------------------------------------------------------------------------
// Accuracy

using Rational = boost::multiprecision::cpp_rational;

/// Parses "[+-]digits[.digits]", "[+-].digits" or "p/q" exactly. Returns
/// nullopt for anything else.
inline std::optional<Rational> parse_exact_number(std::string_view s) {
  s = geokit::detail::trim(s);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = parse_exact_number(s.substr(0, slash));
    auto den = parse_exact_number(s.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return *num / *den;
  }
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  boost::multiprecision::cpp_int mantissa = 0;
  boost::multiprecision::cpp_int scale = 1;
  std::size_t digits = 0;
  bool fraction = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.' && !fraction) {
      fraction = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    mantissa = mantissa * 10 + (c - '0');
    if (fraction) scale *= 10;
    ++digits;
  }
  if (digits == 0) return std::nullopt;
  Rational q(mantissa, scale);
  return negative ? Rational(-q) : q;
}

/// First A-D letter (case-folded) not adjacent to another letter or digit.
inline std::optional<char> extract_choice(std::string_view text) {
  text = geokit::detail::trim(text);
  const auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
    if (up < 'A' || up > 'D') continue;
    const bool left_ok = i == 0 || !alnum(text[i - 1]);
    const bool right_ok = i + 1 == text.size() || !alnum(text[i + 1]);
    if (left_ok && right_ok) return up;
  }
  return std::nullopt;
}

inline double accuracy_reward(std::string_view answer_block, std::string_view gold_answer,
                              AnswerKind kind) {
  if (kind == AnswerKind::Choice) {
    const auto got = extract_choice(answer_block);
    const auto want = extract_choice(gold_answer);
    return got && want && *got == *want ? 1.0 : 0.0;
  }
  const auto a = parse_exact_number(answer_block);
  const auto b = parse_exact_number(gold_answer);
  if (a && b) return *a == *b ? 1.0 : 0.0;
  return geokit::detail::trim(answer_block) == geokit::detail::trim(gold_answer) ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------

/// Accuracy is gated on format; a malformed response is scored for
/// formalization over its whole raw text.
inline RewardBreakdown total_reward(const RolloutRecord& rec, const Tagset& tags,
                                    const cdl::SymmetryTable& table) {
  RewardBreakdown out;
  const auto parsed = parse_blocks(rec.raw_text, tags);
  const auto* blocks = std::get_if<Blocks>(&parsed);
  out.format = blocks ? 1.0 : 0.0;

  const auto sections = split_formalization(blocks ? std::string_view(blocks->formalization)
                                                   : std::string_view(rec.raw_text),
                                            tags);
  out.formalization = formalization_reward(sections.conscdl, sections.imgcdl, rec.gold.conscdl,
                                           rec.gold.imgcdl, table);
  out.accuracy = blocks ? accuracy_reward(blocks->answer, rec.gold.answer, rec.gold.kind) : 0.0;
  out.total = out.format + out.formalization + out.accuracy;
  return out;
}

inline RewardBreakdown total_reward(const RolloutRecord& rec) {
  return total_reward(rec, Tagset{}, cdl::SymmetryTable::defaults());
}

}  // namespace geokit::rewards
