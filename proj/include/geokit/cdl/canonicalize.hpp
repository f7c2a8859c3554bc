#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "geokit/cdl/ast.hpp"
#include "geokit/error.hpp"

namespace geokit::cdl {

/// How a predicate's argument list may be permuted without changing meaning.
enum class Symmetry {
  None,           // argument order is significant
  SortArgs,       // arguments form a multiset; sort by serialized form
  RotateCycle,    // arguments form a cycle; pick the smallest rotation
  SortAtomChars,  // each atom is a point set written as a string (Collinear(BAC))
};

inline std::string_view to_string(Symmetry s) {
  switch (s) {
    case Symmetry::None: return "none";
    case Symmetry::SortArgs: return "sort-args";
    case Symmetry::RotateCycle: return "rotate-cycle";
    case Symmetry::SortAtomChars: return "sort-atom-chars";
  }
  return "none";
}

inline Symmetry symmetry_from_string(std::string_view s) {
  if (s == "none" || s == "sort-top-level-statements-only") return Symmetry::None;
  if (s == "sort-args") return Symmetry::SortArgs;
  if (s == "rotate-cycle") return Symmetry::RotateCycle;
  if (s == "sort-atom-chars") return Symmetry::SortAtomChars;
  throw InvalidArgument("unknown symmetry mode '" + std::string(s) + "'");
}

/// Per-predicate symmetry declarations. Predicates not listed are treated as
/// order-significant.
class SymmetryTable {
 public:
  SymmetryTable() = default;

  /// Collinear/Cocircular as point sets, Equal as a symmetric relation.
  static SymmetryTable defaults() {
    SymmetryTable t;
    t.set("Collinear", Symmetry::SortAtomChars);
    t.set("Cocircular", Symmetry::SortAtomChars);
    t.set("Equal", Symmetry::SortArgs);
    return t;
  }

  /// `{"symmetry": {"Pred": "mode", ...}}`
  static SymmetryTable from_json(const nlohmann::json& j) {
    SymmetryTable t;
    const auto& entries = j.contains("symmetry") ? j.at("symmetry") : j;
    if (!entries.is_object()) throw InvalidArgument("symmetry table must be a JSON object");
    for (const auto& [pred, mode] : entries.items()) {
      if (!mode.is_string()) {
        throw InvalidArgument("symmetry mode for '" + pred + "' must be a string");
      }
      t.set(pred, symmetry_from_string(mode.get<std::string>()));
    }
    return t;
  }

  static SymmetryTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open symmetry table '" + path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("symmetry table '" + path + "': " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json entries = nlohmann::json::object();
    for (const auto& [pred, mode] : modes_) entries[pred] = std::string(to_string(mode));
    return {{"symmetry", entries}};
  }

  void set(std::string predicate, Symmetry mode) { modes_[std::move(predicate)] = mode; }

  Symmetry lookup(std::string_view predicate) const {
    const auto it = modes_.find(std::string(predicate));
    return it == modes_.end() ? Symmetry::None : it->second;
  }

  const std::map<std::string, Symmetry>& entries() const { return modes_; }

 private:
  std::map<std::string, Symmetry> modes_;
};

namespace detail {

inline void canonicalize_statement(Statement& s, const SymmetryTable& table) {
  for (auto& a : s.args) {
    if (a.is_call()) canonicalize_statement(a.call(), table);
  }
  switch (table.lookup(s.predicate)) {
    case Symmetry::None:
      break;
    case Symmetry::SortArgs:
      std::stable_sort(s.args.begin(), s.args.end(), [](const Arg& x, const Arg& y) {
        return serialize(x) < serialize(y);
      });
      break;
    case Symmetry::RotateCycle: {
      if (s.args.size() < 2) break;
      std::vector<std::string> keys;
      keys.reserve(s.args.size());
      for (const auto& a : s.args) keys.push_back(serialize(a));
      const std::size_t n = keys.size();
      std::size_t best = 0;
      for (std::size_t r = 1; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
          const auto& cand = keys[(r + k) % n];
          const auto& cur = keys[(best + k) % n];
          if (cand != cur) {
            if (cand < cur) best = r;
            break;
          }
        }
      }
      std::rotate(s.args.begin(), s.args.begin() + static_cast<std::ptrdiff_t>(best),
                  s.args.end());
      break;
    }
    case Symmetry::SortAtomChars:
      for (auto& a : s.args) {
        if (a.is_atom() && a.atom().kind == AtomKind::Identifier) {
          std::sort(a.atom().text.begin(), a.atom().text.end());
        }
      }
      break;
  }
}

}  // namespace detail

/// Rewrites symmetric argument lists, sorts statements by serialized form and
/// drops duplicates. Idempotent.
inline Document canonicalize(Document doc, const SymmetryTable& table) {
  for (auto& s : doc.statements) detail::canonicalize_statement(s, table);

  std::vector<std::pair<std::string, Statement>> keyed;
  keyed.reserve(doc.statements.size());
  for (auto& s : doc.statements) keyed.emplace_back(serialize(s), std::move(s));
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& x, const auto& y) { return x.first == y.first; }),
              keyed.end());

  doc.statements.clear();
  for (auto& [key, s] : keyed) doc.statements.push_back(std::move(s));
  doc.canonical = true;
  return doc;
}

inline Document canonicalize(Document doc) {
  return canonicalize(std::move(doc), SymmetryTable::defaults());
}

}  // namespace geokit::cdl
