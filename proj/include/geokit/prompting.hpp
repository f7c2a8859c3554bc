#pragma once

// Unified prompting: every task becomes one flat token sequence that starts
// with a task token. Diagram spans are wrapped in soi/eoi.
//
//   t2d : [t2i] text [soi] diagram [eoi]                 loss: diagram + eoi
//   mmu : [mmu] ([soi] diagram [eoi])? text response     loss: response
//   mix : [mixing] knowledge [soi] diagram [eoi] response loss: diagram + eoi, response
//
// Which positions carry loss is a function of the task and the role list
// only; see loss_bearing().
//
// Builders are injective on (tokens, roles). mmu text and response are
// adjacent, so the token list alone can collide.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geokit/detail/numeric.hpp"
#include "geokit/error.hpp"

namespace geokit::prompting {

using TokenId = std::int64_t;

enum class Task { T2D, MMU, MIX };

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::T2D: return "t2d";
    case Task::MMU: return "mmu";
    case Task::MIX: return "mix";
  }
  return "t2d";
}

inline Task task_from_string(std::string_view s) {
  if (s == "t2d" || s == "t2i") return Task::T2D;
  if (s == "mmu") return Task::MMU;
  if (s == "mix" || s == "mixing") return Task::MIX;
  throw InvalidArgument("unknown task '" + std::string(s) + "'");
}

enum class Role : std::uint8_t { Special, Text, Diagram, Response };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::Special: return "special";
    case Role::Text: return "text";
    case Role::Diagram: return "diagram";
    case Role::Response: return "response";
  }
  return "special";
}

inline Role role_from_string(std::string_view s) {
  if (s == "special") return Role::Special;
  if (s == "text") return Role::Text;
  if (s == "diagram") return Role::Diagram;
  if (s == "response") return Role::Response;
  throw InvalidArgument("unknown role '" + std::string(s) + "'");
}

/// Reserved ids. Content tokens (text, diagram, response) must be below
/// `content_limit`; every special id must be at or above it.
struct SpecialTokens {
  TokenId content_limit = 1'000'000;
  TokenId t2i = 1'000'000;
  TokenId mmu = 1'000'001;
  TokenId mixing = 1'000'002;
  TokenId soi = 1'000'003;
  TokenId eoi = 1'000'004;
  TokenId formalization_open = 1'000'005;
  TokenId formalization_close = 1'000'006;
  TokenId think_open = 1'000'007;
  TokenId think_close = 1'000'008;
  TokenId answer_open = 1'000'009;
  TokenId answer_close = 1'000'010;

  std::array<TokenId, 11> all() const {
    return {t2i,        mmu,         mixing,      soi,         eoi,         formalization_open,
            formalization_close, think_open, think_close, answer_open, answer_close};
  }
  std::array<TokenId, 6> tags() const {
    return {formalization_open, formalization_close, think_open,
            think_close,        answer_open,         answer_close};
  }

  TokenId task_token(Task t) const {
    switch (t) {
      case Task::T2D: return t2i;
      case Task::MMU: return mmu;
      case Task::MIX: return mixing;
    }
    return t2i;
  }

  void validate() const {
    if (content_limit <= 0) throw InvalidArgument("special tokens: content_limit must be positive");
    const auto ids = all();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < content_limit) {
        throw InvalidArgument("special tokens: id " + std::to_string(ids[i]) +
                              " overlaps the content range");
      }
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        if (ids[i] == ids[j]) {
          throw InvalidArgument("special tokens: duplicate id " + std::to_string(ids[i]));
        }
      }
    }
  }

  nlohmann::json to_json() const {
    return {{"content_limit", content_limit},
            {"t2i", t2i},
            {"mmu", mmu},
            {"mixing", mixing},
            {"soi", soi},
            {"eoi", eoi},
            {"formalization_open", formalization_open},
            {"formalization_close", formalization_close},
            {"think_open", think_open},
            {"think_close", think_close},
            {"answer_open", answer_open},
            {"answer_close", answer_close}};
  }

  static SpecialTokens from_json(const nlohmann::json& j) {
    SpecialTokens s;
    const auto read = [&](const char* key, TokenId& slot) {
      if (j.contains(key)) slot = j.at(key).get<TokenId>();
    };
    read("content_limit", s.content_limit);
    read("t2i", s.t2i);
    read("mmu", s.mmu);
    read("mixing", s.mixing);
    read("soi", s.soi);
    read("eoi", s.eoi);
    read("formalization_open", s.formalization_open);
    read("formalization_close", s.formalization_close);
    read("think_open", s.think_open);
    read("think_close", s.think_close);
    read("answer_open", s.answer_open);
    read("answer_close", s.answer_close);
    s.validate();
    return s;
  }

  static SpecialTokens load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open special-token config '" + path + "'");
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("special-token config '" + path + "': " + e.what());
    }
  }
};

struct TokenSequence {
  Task task = Task::T2D;
  std::vector<TokenId> tokens;
  std::vector<Role> roles;

  bool operator==(const TokenSequence&) const = default;
};

namespace detail {

class Builder {
 public:
  Builder(Task task, const SpecialTokens& sp) : sp_(sp) {
    sp_.validate();
    seq_.task = task;
    push(sp_.task_token(task), Role::Special);
  }

  void content(std::span<const TokenId> ids, Role role, const char* what) {
    for (TokenId id : ids) {
      if (id < 0 || id >= sp_.content_limit) {
        throw InvalidArgument(std::string(what) + " token " + std::to_string(id) +
                              " is outside the content range");
      }
      push(id, role);
    }
  }

  // Response spans may carry the formalization/think/answer tag tokens.
  void response(std::span<const TokenId> ids) {
    const auto tags = sp_.tags();
    for (TokenId id : ids) {
      const bool is_tag = std::find(tags.begin(), tags.end(), id) != tags.end();
      if (!is_tag && (id < 0 || id >= sp_.content_limit)) {
        throw InvalidArgument("response token " + std::to_string(id) +
                              " is outside the content range");
      }
      push(id, Role::Response);
    }
  }

  void diagram(std::span<const TokenId> ids) {
    push(sp_.soi, Role::Special);
    content(ids, Role::Diagram, "diagram");
    push(sp_.eoi, Role::Special);
  }

  TokenSequence finish() && { return std::move(seq_); }

 private:
  void push(TokenId id, Role r) {
    seq_.tokens.push_back(id);
    seq_.roles.push_back(r);
  }

  const SpecialTokens& sp_;
  TokenSequence seq_;
};

}  // namespace detail

inline TokenSequence build_t2d(std::span<const TokenId> text, std::span<const TokenId> diagram,
                               const SpecialTokens& sp = {}) {
  if (diagram.empty()) throw InvalidArgument("build_t2d: empty diagram token list");
  detail::Builder b(Task::T2D, sp);
  b.content(text, Role::Text, "text");
  b.diagram(diagram);
  return std::move(b).finish();
}

/// An empty `diagram` means a text-only question; soi/eoi are then omitted.
inline TokenSequence build_mmu(std::span<const TokenId> text, std::span<const TokenId> diagram,
                               std::span<const TokenId> response, const SpecialTokens& sp = {}) {
  if (response.empty()) throw InvalidArgument("build_mmu: empty response");
  detail::Builder b(Task::MMU, sp);
  if (!diagram.empty()) b.diagram(diagram);
  b.content(text, Role::Text, "text");
  b.response(response);
  return std::move(b).finish();
}

inline TokenSequence build_mix(std::span<const TokenId> knowledge, std::span<const TokenId> diagram,
                               std::span<const TokenId> response, const SpecialTokens& sp = {}) {
  if (diagram.empty()) throw InvalidArgument("build_mix: empty diagram token list");
  if (response.empty()) throw InvalidArgument("build_mix: empty response");
  detail::Builder b(Task::MIX, sp);
  b.content(knowledge, Role::Text, "knowledge");
  b.diagram(diagram);
  b.response(response);
  return std::move(b).finish();
}

/// Positions whose log-probability enters the task loss. Generated diagrams
/// include their closing eoi.
inline std::vector<bool> loss_bearing(const TokenSequence& seq) {
  if (seq.roles.size() != seq.tokens.size()) {
    throw InvalidArgument("token sequence: roles/tokens length mismatch");
  }
  const bool diagram_loss = seq.task == Task::T2D || seq.task == Task::MIX;
  const bool response_loss = seq.task == Task::MMU || seq.task == Task::MIX;
  std::vector<bool> out(seq.roles.size(), false);
  for (std::size_t i = 0; i < seq.roles.size(); ++i) {
    const Role r = seq.roles[i];
    if (r == Role::Diagram) {
      out[i] = diagram_loss;
    } else if (r == Role::Response) {
      out[i] = response_loss;
    } else if (r == Role::Special && i > 0 && seq.roles[i - 1] == Role::Diagram) {
      out[i] = diagram_loss;  // eoi
    }
  }
  return out;
}

/// Negative sum of log-probabilities at loss-bearing positions.
inline double task_loss(const TokenSequence& seq, std::span<const double> logprobs) {
  if (logprobs.size() != seq.tokens.size()) {
    throw InvalidArgument("task_loss: " + std::to_string(logprobs.size()) + " logprobs for " +
                          std::to_string(seq.tokens.size()) + " tokens");
  }
  const auto mask = loss_bearing(seq);
  geokit::detail::CompensatedSum acc;
  for (std::size_t i = 0; i < logprobs.size(); ++i) {
    if (!(logprobs[i] <= 0.0)) {
      throw InvalidArgument("task_loss: logprob at position " + std::to_string(i) +
                            " is positive or NaN");
    }
    if (mask[i]) acc.add(-logprobs[i]);
  }
  return acc.value();
}

struct TaskWeights {
  double t2d = 1.0;
  double mmu = 1.0;
  double mix = 1.0;
};

/// λ_T2D L_T2D + λ_MMU L_MMU + λ_MIX L_MIX
inline double total_loss(double l_t2d, double l_mmu, double l_mix, const TaskWeights& w) {
  if (w.t2d < 0 || w.mmu < 0 || w.mix < 0) throw InvalidArgument("total_loss: negative weight");
  return w.t2d * l_t2d + w.mmu * l_mmu + w.mix * l_mix;
}

inline nlohmann::json to_json(const TokenSequence& seq) {
  nlohmann::json roles = nlohmann::json::array();
  for (Role r : seq.roles) roles.push_back(std::string(to_string(r)));
  return {{"task", std::string(to_string(seq.task))}, {"tokens", seq.tokens}, {"roles", roles}};
}

inline TokenSequence sequence_from_json(const nlohmann::json& j) {
  TokenSequence seq;
  seq.task = task_from_string(j.at("task").get<std::string>());
  seq.tokens = j.at("tokens").get<std::vector<TokenId>>();
  for (const auto& r : j.at("roles")) seq.roles.push_back(role_from_string(r.get<std::string>()));
  if (seq.roles.size() != seq.tokens.size()) {
    throw InvalidArgument("token sequence: roles/tokens length mismatch");
  }
  return seq;
}

}  // namespace geokit::prompting
