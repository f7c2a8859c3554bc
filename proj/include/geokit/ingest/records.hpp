#pragma once

// On-disk record schemas. Field names are snake_case; the hyphenated and
// camel-case spellings used by the source dataset are accepted as aliases.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geokit/cdl.hpp"
#include "geokit/ingest/jsonl.hpp"
#include "geokit/prompting.hpp"
#include "geokit/rewards.hpp"

namespace geokit::ingest {

namespace fields {
inline constexpr std::initializer_list<const char*> kId = {"id"};
inline constexpr std::initializer_list<const char*> kTextEn = {"problem_text_en", "problem-text-en"};
inline constexpr std::initializer_list<const char*> kTextCn = {"problem_text_cn", "problem-text-cn"};
inline constexpr std::initializer_list<const char*> kConsCdl = {"conscdl", "consCDL", "cons_cdl"};
inline constexpr std::initializer_list<const char*> kImgCdl = {"imgcdl", "imgCDL", "img_cdl"};
inline constexpr std::initializer_list<const char*> kSolution = {
    "solution", "formalsss_solution", "formalSSS-Solution", "formalSSS-solution"};
inline constexpr std::initializer_list<const char*> kAnswer = {"answer"};
inline constexpr std::initializer_list<const char*> kAnswerKind = {"answer_kind", "answer-kind"};
inline constexpr std::initializer_list<const char*> kDiagramPath = {"diagram_path", "diagram-path"};
}  // namespace fields

inline rewards::AnswerKind parse_answer_kind(const std::string& s, const std::string& path,
                                             std::size_t line) {
  if (s == "choice") return rewards::AnswerKind::Choice;
  if (s == "open") return rewards::AnswerKind::Open;
  throw IngestError(path, line, "answer_kind must be 'choice' or 'open', got '" + s + "'");
}

inline void check_choice_answer(const std::string& answer, const std::string& path,
                                std::size_t line) {
  const auto a = geokit::detail::trim(answer);
  if (a.size() != 1 || a[0] < 'A' || a[0] > 'D') {
    throw IngestError(path, line, "choice answer must be one of A-D, got '" + answer + "'");
  }
}

/// The statement (separator-delimited slice of `text`) containing `offset`.
inline std::string statement_at(std::string_view text, std::size_t offset) {
  if (offset > text.size()) offset = text.size();
  std::size_t b = offset;
  while (b > 0 && text[b - 1] != '\n' && text[b - 1] != ';') --b;
  std::size_t e = offset;
  while (e < text.size() && text[e] != '\n' && text[e] != ';') ++e;
  return std::string(geokit::detail::trim(text.substr(b, e - b)));
}

/// Parses a CDL field, turning ParseError into an IngestError that names the
/// file line and the offending statement.
inline cdl::Document parse_cdl_field(const std::string& text, cdl::Role role,
                                     const std::string& field, const std::string& path,
                                     std::size_t line) {
  try {
    return cdl::parse_cdl(text, role);
  } catch (const cdl::ParseError& e) {
    throw IngestError(path, line, field + " statement '" + statement_at(text, e.statement_offset()) +
                                      "': expected " + e.expected() + ", found " + e.found());
  }
}

// ---------------------------------------------------------------------------
// Problem records

struct ProblemRecord {
  std::string id;
  std::string problem_text_en;
  std::string problem_text_cn;
  std::string conscdl;
  std::string imgcdl;
  std::string solution;
  std::string answer;
  rewards::AnswerKind answer_kind = rewards::AnswerKind::Open;
  std::optional<std::string> diagram_path;
  std::size_t line = 0;
};

inline nlohmann::json to_json(const ProblemRecord& r) {
  nlohmann::json j = {{"id", r.id},
                      {"problem_text_en", r.problem_text_en},
                      {"problem_text_cn", r.problem_text_cn},
                      {"conscdl", r.conscdl},
                      {"imgcdl", r.imgcdl},
                      {"solution", r.solution},
                      {"answer", r.answer},
                      {"answer_kind", r.answer_kind == rewards::AnswerKind::Choice ? "choice" : "open"}};
  if (r.diagram_path) j["diagram_path"] = *r.diagram_path;
  return j;
}

struct LoadOptions {
  bool lenient = false;  // skip CDL validation
};

inline std::vector<ProblemRecord> parse_problems(const std::string& path, std::string_view content,
                                                 const LoadOptions& opts = {}) {
  std::vector<ProblemRecord> out;
  std::set<std::string> seen;
  for_each_jsonl(path, content, [&](const nlohmann::json& j, std::size_t line) {
    ProblemRecord r;
    r.line = line;
    r.id = required_text(j, fields::kId, path, line);
    if (!seen.insert(r.id).second) throw IngestError(path, line, "duplicate id '" + r.id + "'");
    r.problem_text_en = text_field(j, fields::kTextEn, path, line).value_or("");
    r.problem_text_cn = text_field(j, fields::kTextCn, path, line).value_or("");
    r.conscdl = text_field(j, fields::kConsCdl, path, line).value_or("");
    r.imgcdl = text_field(j, fields::kImgCdl, path, line).value_or("");
    r.solution = text_field(j, fields::kSolution, path, line).value_or("");
    r.answer = text_field(j, fields::kAnswer, path, line).value_or("");
    r.answer_kind = parse_answer_kind(text_field(j, fields::kAnswerKind, path, line).value_or("open"),
                                      path, line);
    if (r.answer_kind == rewards::AnswerKind::Choice) check_choice_answer(r.answer, path, line);
    r.diagram_path = text_field(j, fields::kDiagramPath, path, line);
    if (!opts.lenient) {
      parse_cdl_field(r.conscdl, cdl::Role::Construction, "conscdl", path, line);
      parse_cdl_field(r.imgcdl, cdl::Role::Image, "imgcdl", path, line);
    }
    out.push_back(std::move(r));
  });
  return out;
}

inline std::vector<ProblemRecord> load_problems(const std::string& path, const LoadOptions& opts = {}) {
  return parse_problems(path, read_file(path), opts);
}

// ---------------------------------------------------------------------------
// CDL pairs (GSMS predictions and gold)

struct CdlPairRecord {
  std::string id;
  cdl::Document conscdl{cdl::Role::Construction, {}, false};
  cdl::Document imgcdl{cdl::Role::Image, {}, false};
  std::size_t line = 0;
};

/// `{"id", "conscdl", "imgcdl"}` per line. With `lenient`, unparseable CDL
/// becomes an empty document instead of an error.
inline std::vector<CdlPairRecord> load_cdl_pairs(const std::string& path, bool lenient = false) {
  std::vector<CdlPairRecord> out;
  std::set<std::string> seen;
  for_each_jsonl(path, read_file(path), [&](const nlohmann::json& j, std::size_t line) {
    CdlPairRecord r;
    r.line = line;
    r.id = required_text(j, fields::kId, path, line);
    if (!seen.insert(r.id).second) throw IngestError(path, line, "duplicate id '" + r.id + "'");
    const auto load = [&](std::initializer_list<const char*> names, cdl::Role role,
                          const char* field) {
      const auto text = text_field(j, names, path, line).value_or("");
      try {
        return parse_cdl_field(text, role, field, path, line);
      } catch (const IngestError&) {
        if (!lenient) throw;
        return cdl::Document{role, {}, false};
      }
    };
    r.conscdl = load(fields::kConsCdl, cdl::Role::Construction, "conscdl");
    r.imgcdl = load(fields::kImgCdl, cdl::Role::Image, "imgcdl");
    out.push_back(std::move(r));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Rollouts

struct RolloutInput {
  std::string id;
  std::string question_id;
  rewards::RolloutRecord record;
  std::size_t line = 0;
};

/// `{"id", "question_id", "raw_text", "gold_answer", "answer_kind",
///   "gold_conscdl", "gold_imgcdl"}` per line.
inline std::vector<RolloutInput> load_rollouts(const std::string& path,
                                               const rewards::Tagset& tags = {}) {
  std::vector<RolloutInput> out;
  for_each_jsonl(path, read_file(path), [&](const nlohmann::json& j, std::size_t line) {
    RolloutInput r;
    r.line = line;
    r.id = required_text(j, fields::kId, path, line);
    r.question_id = required_text(j, {"question_id", "question-id"}, path, line);
    rewards::GoldAnswer gold;
    gold.answer = required_text(j, {"gold_answer", "gold-answer"}, path, line);
    gold.kind = parse_answer_kind(
        text_field(j, {"answer_kind", "answer-kind"}, path, line).value_or("open"), path, line);
    if (gold.kind == rewards::AnswerKind::Choice) check_choice_answer(gold.answer, path, line);
    gold.conscdl = parse_cdl_field(
        text_field(j, {"gold_conscdl", "gold-consCDL", "gold_consCDL"}, path, line).value_or(""),
        cdl::Role::Construction, "gold_conscdl", path, line);
    gold.imgcdl = parse_cdl_field(
        text_field(j, {"gold_imgcdl", "gold-imgCDL", "gold_imgCDL"}, path, line).value_or(""),
        cdl::Role::Image, "gold_imgcdl", path, line);
    r.record = rewards::make_rollout(required_text(j, {"raw_text", "raw-text"}, path, line),
                                     std::move(gold), tags);
    out.push_back(std::move(r));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Diagram manifests

struct ManifestEntry {
  std::string id;
  std::filesystem::path gold;
  std::filesystem::path rec;
  std::size_t line = 0;
};

/// `{"id", "gold", "rec"}` per line; relative paths resolve against the
/// manifest's directory. Every referenced file must exist.
inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<ManifestEntry> out;
  for_each_jsonl(path, read_file(path), [&](const nlohmann::json& j, std::size_t line) {
    ManifestEntry e;
    e.line = line;
    e.id = required_text(j, fields::kId, path, line);
    const auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    e.gold = resolve(required_text(j, {"gold", "gt", "gold_diagram"}, path, line));
    e.rec = resolve(
        required_text(j, {"rec", "reconstructed", "generated", "rec_diagram"}, path, line));
    for (const auto* p : {&e.gold, &e.rec}) {
      if (!std::filesystem::exists(*p)) {
        throw IngestError(path, line, "referenced file '" + p->string() + "' does not exist");
      }
    }
    out.push_back(std::move(e));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Prompt inputs (pre-tokenized)

struct PromptRecord {
  std::string id;
  std::vector<prompting::TokenId> text_tokens;
  std::vector<prompting::TokenId> knowledge_tokens;
  std::vector<prompting::TokenId> response_tokens;
  std::size_t line = 0;
};

inline std::vector<prompting::TokenId> token_field(const nlohmann::json& j, const char* name,
                                                   const std::string& path, std::size_t line) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return {};
  try {
    return it->get<std::vector<prompting::TokenId>>();
  } catch (const nlohmann::json::exception&) {
    throw IngestError(path, line, std::string("field '") + name + "' must be a list of integers");
  }
}

/// `{"id", "text_tokens", "knowledge_tokens", "response_tokens"}` per line.
inline std::vector<PromptRecord> load_prompt_records(const std::string& path) {
  std::vector<PromptRecord> out;
  std::set<std::string> seen;
  for_each_jsonl(path, read_file(path), [&](const nlohmann::json& j, std::size_t line) {
    PromptRecord r;
    r.line = line;
    r.id = required_text(j, fields::kId, path, line);
    if (!seen.insert(r.id).second) throw IngestError(path, line, "duplicate id '" + r.id + "'");
    r.text_tokens = token_field(j, "text_tokens", path, line);
    r.knowledge_tokens = token_field(j, "knowledge_tokens", path, line);
    r.response_tokens = token_field(j, "response_tokens", path, line);
    out.push_back(std::move(r));
  });
  return out;
}

/// Diagram token sidecar: a JSON object mapping record id to a token list.
inline std::map<std::string, std::vector<prompting::TokenId>> load_diagram_tokens(
    const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(path, 0, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw IngestError(path, 0, "diagram token sidecar must be a JSON object");
  std::map<std::string, std::vector<prompting::TokenId>> out;
  for (const auto& [id, toks] : j.items()) {
    try {
      out[id] = toks.get<std::vector<prompting::TokenId>>();
    } catch (const nlohmann::json::exception&) {
      throw IngestError(path, 0, "tokens for '" + id + "' must be a list of integers");
    }
  }
  return out;
}

}  // namespace geokit::ingest
