#pragma once

// Geometry semantic matching scores: statement-set agreement between a
// predicted and a gold CDL document, aggregated into AA/PA per role and a
// combined CI-PA.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "geokit/cdl.hpp"
#include "geokit/error.hpp"

namespace geokit::metrics {

struct MatchResult {
  std::size_t matched = 0;
  std::size_t total = 0;      // gold statement count
  std::size_t predicted = 0;  // predicted statement count after dedup
  bool perfect = false;

  bool operator==(const MatchResult&) const = default;
};

/// Both documents are canonicalized with `table` before comparison, so
/// callers may pass raw parses.
inline MatchResult gsms_match(const cdl::Document& pred, const cdl::Document& gt,
                              const cdl::SymmetryTable& table) {
  if (pred.role != gt.role) {
    throw InvalidArgument("gsms_match: role mismatch (" + std::string(cdl::to_string(pred.role)) +
                          " vs " + std::string(cdl::to_string(gt.role)) + ")");
  }
  const auto cp = cdl::canonicalize(pred, table);
  const auto cg = cdl::canonicalize(gt, table);

  std::vector<std::string> ps, gs;
  for (const auto& s : cp.statements) ps.push_back(cdl::serialize(s));
  for (const auto& s : cg.statements) gs.push_back(cdl::serialize(s));
  // canonical documents are sorted and deduplicated
  std::vector<std::string> common;
  std::set_intersection(ps.begin(), ps.end(), gs.begin(), gs.end(), std::back_inserter(common));

  MatchResult r;
  r.total = gs.size();
  r.predicted = ps.size();
  r.matched = r.total == 0 ? 0 : common.size();
  r.perfect = r.total == 0 ? r.predicted == 0 : (r.matched == r.total && r.predicted == r.total);
  return r;
}

struct GsmsSample {
  std::string id;
  MatchResult cons;
  MatchResult img;
};

struct GsmsReport {
  double c_aa = 0, c_pa = 0, i_aa = 0, i_pa = 0, ci_pa = 0;
  std::vector<GsmsSample> per_sample;
};

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

// An empty gold document scores 1 when the prediction is also empty, else 0.
inline Rational sample_fraction(const MatchResult& m) {
  if (m.total == 0) return Rational(m.perfect ? 1 : 0);
  return Rational(static_cast<long long>(m.matched)) / Rational(static_cast<long long>(m.total));
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace detail

/// Exact rational accumulation; the result does not depend on sample order.
inline GsmsReport gsms_aggregate(std::vector<GsmsSample> samples) {
  if (samples.empty()) throw InvalidArgument("gsms_aggregate: no samples");
  detail::Rational c_aa, i_aa;
  long long c_pa = 0, i_pa = 0, ci_pa = 0;
  for (const auto& s : samples) {
    c_aa += detail::sample_fraction(s.cons);
    i_aa += detail::sample_fraction(s.img);
    c_pa += s.cons.perfect;
    i_pa += s.img.perfect;
    ci_pa += s.cons.perfect && s.img.perfect;
  }
  const detail::Rational n(static_cast<long long>(samples.size()));
  GsmsReport r;
  r.c_aa = detail::to_double(c_aa / n);
  r.i_aa = detail::to_double(i_aa / n);
  r.c_pa = detail::to_double(detail::Rational(c_pa) / n);
  r.i_pa = detail::to_double(detail::Rational(i_pa) / n);
  r.ci_pa = detail::to_double(detail::Rational(ci_pa) / n);
  r.per_sample = std::move(samples);
  return r;
}

inline nlohmann::json to_json(const GsmsReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : r.per_sample) {
    rows.push_back({{"id", s.id},
                    {"c_matched", s.cons.matched},
                    {"c_total", s.cons.total},
                    {"c_predicted", s.cons.predicted},
                    {"c_perfect", s.cons.perfect},
                    {"i_matched", s.img.matched},
                    {"i_total", s.img.total},
                    {"i_predicted", s.img.predicted},
                    {"i_perfect", s.img.perfect}});
  }
  return {{"schema_version", 1},
          {"metric", "gsms"},
          {"aggregate",
           {{"c_aa", r.c_aa}, {"c_pa", r.c_pa}, {"i_aa", r.i_aa}, {"i_pa", r.i_pa}, {"ci_pa", r.ci_pa}}},
          {"per_sample", std::move(rows)}};
}

/// "C-AA C-PA I-AA I-PA CI-PA" as percentages with two decimals.
inline std::string percent_line(const GsmsReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.2f %.2f %.2f %.2f %.2f", 100.0 * r.c_aa, 100.0 * r.c_pa,
                100.0 * r.i_aa, 100.0 * r.i_pa, 100.0 * r.ci_pa);
  return buf;
}

}  // namespace geokit::metrics
