#pragma once

// Corpus-free (single-segment) BLEU over CDL text.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geokit/error.hpp"

namespace geokit::metrics {

enum class BleuSmoothing {
  None,
  // Orders n >= 2 whose clipped match count is zero use 1 / (candidate n-grams + 1).
  // Unigram precision is never smoothed, so zero unigram overlap still scores 0.
  AddOneOnZero,
};

struct BleuConfig {
  int max_n = 4;
  BleuSmoothing smoothing = BleuSmoothing::AddOneOnZero;
};

/// Identifiers, numbers and single punctuation characters; whitespace and
/// newlines are dropped.
inline std::vector<std::string> cdl_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const auto is_alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
  const auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  const auto is_ident = [&](char c) { return is_alpha(c) || is_digit(c) || c == '_'; };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (is_alpha(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident(text[j])) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else if (is_digit(c)) {
      std::size_t j = i;
      while (j < text.size() && is_digit(text[j])) ++j;
      if (j + 1 < text.size() && text[j] == '.' && is_digit(text[j + 1])) {
        ++j;
        while (j < text.size() && is_digit(text[j])) ++j;
      }
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else {
      out.emplace_back(1, c);
      ++i;
    }
  }
  return out;
}

namespace detail {

using NgramCounts = std::map<std::vector<std::string>, int>;

inline NgramCounts count_ngrams(const std::vector<std::string>& toks, int n) {
  NgramCounts counts;
  const auto len = static_cast<int>(toks.size());
  for (int i = 0; i + n <= len; ++i) {
    ++counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  }
  return counts;
}

}  // namespace detail

/// Geometric mean of clipped n-gram precisions (orders with no candidate
/// n-grams are left out) times the brevity penalty against the closest
/// reference length.
inline double bleu(std::string_view pred, const std::vector<std::string>& refs,
                   const BleuConfig& cfg = {}) {
  if (refs.empty()) throw InvalidArgument("bleu: empty reference list");
  if (cfg.max_n < 1) throw InvalidArgument("bleu: max_n must be >= 1");

  const auto cand = cdl_tokenize(pred);
  std::vector<std::vector<std::string>> ref_toks;
  for (const auto& r : refs) ref_toks.push_back(cdl_tokenize(r));

  const auto c = static_cast<long>(cand.size());
  long r = -1;
  for (const auto& rt : ref_toks) {
    const auto len = static_cast<long>(rt.size());
    if (r < 0 || std::labs(len - c) < std::labs(r - c) ||
        (std::labs(len - c) == std::labs(r - c) && len < r)) {
      r = len;
    }
  }
  if (c == 0) return r == 0 ? 1.0 : 0.0;

  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= cfg.max_n; ++n) {
    const auto cand_counts = detail::count_ngrams(cand, n);
    long total = 0;
    for (const auto& [g, k] : cand_counts) total += k;
    if (total == 0) continue;

    detail::NgramCounts max_ref;
    for (const auto& rt : ref_toks) {
      for (const auto& [g, k] : detail::count_ngrams(rt, n)) {
        auto& slot = max_ref[g];
        slot = std::max(slot, k);
      }
    }
    long matched = 0;
    for (const auto& [g, k] : cand_counts) {
      const auto it = max_ref.find(g);
      if (it != max_ref.end()) matched += std::min(k, it->second);
    }

    double p = 0.0;
    if (matched > 0) {
      p = static_cast<double>(matched) / static_cast<double>(total);
    } else if (n >= 2 && cfg.smoothing == BleuSmoothing::AddOneOnZero) {
      p = 1.0 / static_cast<double>(total + 1);
    } else {
      return 0.0;
    }
    log_sum += std::log(p);
    ++orders;
  }

  const double bp = c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum / orders);
}

inline double bleu4(std::string_view pred, const std::vector<std::string>& refs,
                    BleuSmoothing smoothing = BleuSmoothing::AddOneOnZero) {
  return bleu(pred, refs, BleuConfig{4, smoothing});
}

}  // namespace geokit::metrics
