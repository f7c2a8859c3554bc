#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geokit::cdl {

/// Which CDL stream a document belongs to: construction (topology) or image
/// (measures and annotations).
enum class Role { Construction, Image };

inline std::string_view to_string(Role r) {
  return r == Role::Construction ? "consCDL" : "imgCDL";
}

struct Arg;

/// `Pred(arg, arg, ...)`. Arguments may themselves be statements.
struct Statement {
  std::string predicate;
  std::vector<Arg> args;

  bool operator==(const Statement&) const = default;
};

enum class AtomKind { Identifier, Number };

/// Leaf argument. Numbers keep their source lexeme so "12.50" survives a
/// round trip unchanged.
struct Atom {
  AtomKind kind = AtomKind::Identifier;
  std::string text;

  bool operator==(const Atom&) const = default;
};

struct Arg {
  std::variant<Atom, Statement> value;

  bool operator==(const Arg&) const = default;

  bool is_atom() const { return std::holds_alternative<Atom>(value); }
  bool is_call() const { return std::holds_alternative<Statement>(value); }
  const Atom& atom() const { return std::get<Atom>(value); }
  const Statement& call() const { return std::get<Statement>(value); }
  Atom& atom() { return std::get<Atom>(value); }
  Statement& call() { return std::get<Statement>(value); }

  static Arg identifier(std::string text) {
    return Arg{Atom{AtomKind::Identifier, std::move(text)}};
  }
  static Arg number(std::string text) {
    return Arg{Atom{AtomKind::Number, std::move(text)}};
  }
  static Arg nested(Statement s) { return Arg{std::move(s)}; }
};

struct Document {
  Role role = Role::Construction;
  std::vector<Statement> statements;
  bool canonical = false;

  bool operator==(const Document&) const = default;
};

// Serialization lives here because canonical ordering and GSMS matching are
// both defined on serialized bytes.

inline void serialize_to(const Statement& s, std::string& out);

inline void serialize_to(const Arg& a, std::string& out) {
  if (a.is_atom()) {
    out += a.atom().text;
  } else {
    serialize_to(a.call(), out);
  }
}

inline void serialize_to(const Statement& s, std::string& out) {
  out += s.predicate;
  out += '(';
  for (std::size_t i = 0; i < s.args.size(); ++i) {
    if (i) out += ',';
    serialize_to(s.args[i], out);
  }
  out += ')';
}

inline std::string serialize(const Statement& s) {
  std::string out;
  serialize_to(s, out);
  return out;
}

inline std::string serialize(const Arg& a) {
  std::string out;
  serialize_to(a, out);
  return out;
}

/// One statement per line, no trailing newline, no whitespace inside
/// statements.
inline std::string serialize(const Document& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.statements.size(); ++i) {
    if (i) out += '\n';
    serialize_to(doc.statements[i], out);
  }
  return out;
}

}  // namespace geokit::cdl
