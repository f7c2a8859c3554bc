#pragma once

// JSON tree export of CDL documents for external tooling.
//
//   statement -> {"pred": "Equal", "args": [ ... ]}
//   identifier -> {"ident": "AB"}
//   number     -> {"num": "10"}

#include <string>

#include <nlohmann/json.hpp>

#include "geokit/cdl/ast.hpp"
#include "geokit/error.hpp"

namespace geokit::cdl {

inline nlohmann::json to_json(const Statement& s);

inline nlohmann::json to_json(const Arg& a) {
  if (a.is_call()) return to_json(a.call());
  const auto& atom = a.atom();
  return {{atom.kind == AtomKind::Number ? "num" : "ident", atom.text}};
}

inline nlohmann::json to_json(const Statement& s) {
  nlohmann::json args = nlohmann::json::array();
  for (const auto& a : s.args) args.push_back(to_json(a));
  return {{"pred", s.predicate}, {"args", std::move(args)}};
}

inline nlohmann::json to_json(const Document& doc) {
  nlohmann::json stmts = nlohmann::json::array();
  for (const auto& s : doc.statements) stmts.push_back(to_json(s));
  return {{"role", std::string(to_string(doc.role))},
          {"canonical", doc.canonical},
          {"statements", std::move(stmts)}};
}

inline Statement statement_from_json(const nlohmann::json& j);

inline Arg arg_from_json(const nlohmann::json& j) {
  if (j.contains("pred")) return Arg::nested(statement_from_json(j));
  if (j.contains("ident")) return Arg::identifier(j.at("ident").get<std::string>());
  if (j.contains("num")) return Arg::number(j.at("num").get<std::string>());
  throw InvalidArgument("CDL AST node has none of pred/ident/num");
}

inline Statement statement_from_json(const nlohmann::json& j) {
  Statement s;
  s.predicate = j.at("pred").get<std::string>();
  for (const auto& a : j.at("args")) s.args.push_back(arg_from_json(a));
  return s;
}

inline Document document_from_json(const nlohmann::json& j) {
  Document doc;
  const auto role = j.at("role").get<std::string>();
  if (role == "consCDL") {
    doc.role = Role::Construction;
  } else if (role == "imgCDL") {
    doc.role = Role::Image;
  } else {
    throw InvalidArgument("unknown CDL role '" + role + "'");
  }
  doc.canonical = j.value("canonical", false);
  for (const auto& s : j.at("statements")) doc.statements.push_back(statement_from_json(s));
  return doc;
}

}  // namespace geokit::cdl
