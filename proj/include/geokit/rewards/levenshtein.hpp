#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "geokit/detail/numeric.hpp"

namespace geokit::rewards {

/// Unit-cost insert/delete/substitute edit distance over any two sequences
/// with comparable elements. O(|a|·|b|) time, O(min) memory.
template <typename Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
  const Seq& s = a.size() < b.size() ? b : a;  // longer
  const Seq& t = a.size() < b.size() ? a : b;  // shorter, indexes the row
  std::vector<std::size_t> row(t.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= s.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (s[i - 1] == t[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[t.size()];
}

/// Distance between two UTF-8 strings counted in code points.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  return edit_distance(geokit::detail::utf8_decode(a), geokit::detail::utf8_decode(b));
}

/// Code-point length of a UTF-8 string.
inline std::size_t char_length(std::string_view s) { return geokit::detail::utf8_decode(s).size(); }

}  // namespace geokit::rewards
