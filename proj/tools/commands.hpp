#pragma once

// Subcommand bodies for the geokit CLI. Each takes its parsed options and the
// output streams and returns an exit code, so tests can run them in-process.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geokit/cdl.hpp"
#include "geokit/ingest.hpp"
#include "geokit/metrics.hpp"
#include "geokit/prompting.hpp"
#include "geokit/quantizer.hpp"
#include "geokit/rewards.hpp"

namespace geokit::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,  // a metric fell below --fail-under, or samples were skipped
  kInputError = 2,
  kInternalError = 3,
};

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline cdl::SymmetryTable symmetry_or_default(const std::string& path) {
  return path.empty() ? cdl::SymmetryTable::defaults() : cdl::SymmetryTable::load(path);
}

inline bool write_text(const std::string& path, const std::string& body, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err << "error: cannot write '" << path << "'\n";
    return false;
  }
  out << body;
  return static_cast<bool>(out);
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// parse

struct ParseOptions {
  std::string file;
  bool canonical = false;
  bool json_ast = false;
  bool image_role = false;
  std::string symmetry;
};

inline int run_parse(const ParseOptions& o, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    text = ingest::read_file(o.file);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  const auto role = o.image_role ? cdl::Role::Image : cdl::Role::Construction;
  cdl::Document doc;
  try {
    doc = cdl::parse_cdl(text, role);
  } catch (const cdl::ParseError& e) {
    const auto loc = cdl::locate(text, e.offset());
    err << o.file << ':' << loc.line << ':' << loc.column << ": error: expected " << e.expected()
        << ", found " << e.found() << '\n';
    return kInputError;
  }
  if (o.canonical) doc = cdl::canonicalize(std::move(doc), detail::symmetry_or_default(o.symmetry));
  if (o.json_ast) {
    out << cdl::to_json(doc).dump(2) << '\n';
  } else if (!doc.statements.empty()) {
    out << cdl::serialize(doc) << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// gsms

struct GsmsOptions {
  std::string pred;
  std::string gold;
  std::string report;
  std::string symmetry;
  bool lenient = false;
  std::optional<double> fail_under;  // applied to CI-PA, as a fraction
};

inline int run_gsms(const GsmsOptions& o, std::ostream& out, std::ostream& err) {
  const auto table = detail::symmetry_or_default(o.symmetry);
  const auto gold = ingest::load_cdl_pairs(o.gold);
  const auto pred = ingest::load_cdl_pairs(o.pred, o.lenient);

  std::map<std::string, const ingest::CdlPairRecord*> by_id;
  for (const auto& p : pred) by_id[p.id] = &p;
  std::set<std::string> gold_ids;
  std::vector<std::string> unmatched;
  for (const auto& g : gold) {
    gold_ids.insert(g.id);
    if (!by_id.count(g.id)) unmatched.push_back(g.id + " (missing from predictions)");
  }
  for (const auto& p : pred) {
    if (!gold_ids.count(p.id)) unmatched.push_back(p.id + " (missing from gold)");
  }
  if (!unmatched.empty()) {
    err << "error: unmatched ids:\n";
    for (const auto& u : unmatched) err << "  " << u << '\n';
    return kInputError;
  }
  if (gold.empty()) {
    err << "error: no samples\n";
    return kInputError;
  }

  std::vector<metrics::GsmsSample> samples;
  for (const auto& g : gold) {
    const auto& p = *by_id.at(g.id);
    samples.push_back({g.id, metrics::gsms_match(p.conscdl, g.conscdl, table),
                       metrics::gsms_match(p.imgcdl, g.imgcdl, table)});
  }
  const auto report = metrics::gsms_aggregate(std::move(samples));
  out << "C-AA C-PA I-AA I-PA CI-PA\n" << metrics::percent_line(report) << '\n';
  if (!o.report.empty() &&
      !detail::write_text(o.report, metrics::to_json(report).dump(2) + "\n", err)) {
    return kInputError;
  }
  if (o.fail_under && report.ci_pa < *o.fail_under) {
    err << "CI-PA " << report.ci_pa << " below --fail-under " << *o.fail_under << '\n';
    return kValidationFailure;
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// gpms

struct GpmsOptions {
  std::string manifest;
  int threshold = metrics::kDefaultThreshold;
  std::string report;
  std::optional<double> fail_under;  // applied to the mean
};

inline int run_gpms(const GpmsOptions& o, std::ostream& out, std::ostream& err) {
  const auto entries = ingest::load_manifest(o.manifest);
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json skipped = nlohmann::json::array();
  geokit::detail::CompensatedSum sum;
  std::size_t scored = 0;
  for (const auto& e : entries) {
    const auto gt = ingest::load_diagram(e.gold.string(), o.threshold);
    const auto rec = ingest::load_diagram(e.rec.string(), o.threshold);
    if (gt.width() != rec.width() || gt.height() != rec.height()) {
      const std::string reason = "dimension mismatch " + std::to_string(gt.width()) + "x" +
                                 std::to_string(gt.height()) + " vs " +
                                 std::to_string(rec.width()) + "x" + std::to_string(rec.height());
      err << "warning: skipping " << e.id << ": " << reason << '\n';
      skipped.push_back({{"id", e.id}, {"reason", reason}});
      continue;
    }
    const double v = metrics::gpms(gt, rec);
    rows.push_back({{"id", e.id},
                    {"gpms", v},
                    {"gt_black", gt.black_count()},
                    {"rec_black", rec.black_count()}});
    sum.add(v);
    ++scored;
  }
  nlohmann::json report = {{"schema_version", kSchemaVersion},
                           {"metric", "gpms"},
                           {"threshold", o.threshold},
                           {"per_sample", rows},
                           {"skipped", skipped},
                           {"count", scored}};
  std::optional<double> mean;
  if (scored > 0) mean = sum.value() / static_cast<double>(scored);
  report["mean"] = mean ? nlohmann::json(*mean) : nlohmann::json(nullptr);

  const std::string body = report.dump(2) + "\n";
  if (o.report.empty()) {
    out << body;
  } else {
    if (!detail::write_text(o.report, body, err)) return kInputError;
    out << "GPMS " << (mean ? detail::fixed(100.0 * *mean, 2) : std::string("n/a")) << " over "
        << scored << " samples\n";
  }
  if (!skipped.empty()) return kValidationFailure;
  if (o.fail_under && (!mean || *mean < *o.fail_under)) {
    err << "GPMS mean below --fail-under " << *o.fail_under << '\n';
    return kValidationFailure;
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// reward

struct RewardOptions {
  std::string rollouts;
  std::string group_by = "question_id";  // or "none"
  double epsilon = rewards::kDefaultAdvantageEpsilon;
  std::string tagset;
  std::string symmetry;
};

inline int run_reward(const RewardOptions& o, std::ostream& out, std::ostream& err) {
  if (o.group_by != "question_id" && o.group_by != "none") {
    err << "error: --group-by must be 'question_id' or 'none'\n";
    return kInputError;
  }
  const auto tags = o.tagset.empty() ? rewards::Tagset{} : rewards::Tagset::load(o.tagset);
  const auto table = detail::symmetry_or_default(o.symmetry);
  const auto rollouts = ingest::load_rollouts(o.rollouts, tags);

  std::vector<std::string> group_order;
  std::map<std::string, std::vector<std::size_t>> groups;
  std::vector<double> totals;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    const auto& r = rollouts[i];
    const auto b = rewards::total_reward(r.record, tags, table);
    totals.push_back(b.total);
    nlohmann::json line = {{"schema_version", kSchemaVersion},
                           {"kind", "rollout"},
                           {"id", r.id},
                           {"question_id", r.question_id},
                           {"reward",
                            {{"format", b.format},
                             {"formalization", b.formalization},
                             {"accuracy", b.accuracy},
                             {"total", b.total}}}};
    out << line.dump() << '\n';
    if (o.group_by == "question_id") {
      auto& members = groups[r.question_id];
      if (members.empty()) group_order.push_back(r.question_id);
      members.push_back(i);
    }
  }

  for (const auto& qid : group_order) {
    const auto& members = groups.at(qid);
    if (members.size() < 2) {
      err << "warning: group '" << qid << "' has a single rollout; advantages omitted\n";
      continue;
    }
    std::vector<double> rs;
    nlohmann::json ids = nlohmann::json::array();
    for (auto i : members) {
      rs.push_back(totals[i]);
      ids.push_back(rollouts[i].id);
    }
    const auto g = rewards::grpo_advantages(rs, o.epsilon);
    nlohmann::json line = {{"schema_version", kSchemaVersion},
                           {"kind", "group"},
                           {"question_id", qid},
                           {"ids", ids},
                           {"rewards", g.rewards},
                           {"advantages", g.advantages}};
    out << line.dump() << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// prompt

struct PromptOptions {
  std::string problems;
  std::string task;
  std::string specials;
  std::string diagrams;
  std::size_t diagram_length = 0;  // 0: any length
};

inline int run_prompt(const PromptOptions& o, std::ostream& out, std::ostream& err) {
  prompting::Task task;
  try {
    task = prompting::task_from_string(o.task);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << " (expected t2d, mmu or mix)\n";
    return kInputError;
  }
  const auto sp = o.specials.empty() ? prompting::SpecialTokens{}
                                     : prompting::SpecialTokens::load(o.specials);
  sp.validate();
  const auto records = ingest::load_prompt_records(o.problems);
  std::map<std::string, std::vector<prompting::TokenId>> diagrams;
  if (!o.diagrams.empty()) diagrams = ingest::load_diagram_tokens(o.diagrams);

  std::string body;
  for (const auto& r : records) {
    const auto it = diagrams.find(r.id);
    const std::vector<prompting::TokenId> none;
    const auto& diagram = it == diagrams.end() ? none : it->second;
    if (diagram.empty() && task != prompting::Task::MMU) {
      err << "error: " << o.problems << ':' << r.line << ": no diagram tokens for '" << r.id
          << "'\n";
      return kInputError;
    }
    if (o.diagram_length && !diagram.empty() && diagram.size() != o.diagram_length) {
      err << "error: " << o.problems << ':' << r.line << ": '" << r.id << "' has "
          << diagram.size() << " diagram tokens, expected " << o.diagram_length << '\n';
      return kInputError;
    }
    prompting::TokenSequence seq;
    try {
      switch (task) {
        case prompting::Task::T2D: seq = prompting::build_t2d(r.text_tokens, diagram, sp); break;
        case prompting::Task::MMU:
          seq = prompting::build_mmu(r.text_tokens, diagram, r.response_tokens, sp);
          break;
        case prompting::Task::MIX:
          seq = prompting::build_mix(r.knowledge_tokens, diagram, r.response_tokens, sp);
          break;
      }
    } catch (const InvalidArgument& e) {
      err << "error: " << o.problems << ':' << r.line << ": " << e.what() << '\n';
      return kInputError;
    }
    auto j = prompting::to_json(seq);
    j["id"] = r.id;
    body += j.dump() + '\n';
  }
  out << body;
  return kSuccess;
}

// ---------------------------------------------------------------------------
// lfq

struct LfqOptions {
  std::string tensor;
  int bits = 0;
};

inline int run_lfq(const LfqOptions& o, std::ostream& out, std::ostream& err) {
  const auto t = ingest::load_tensor(o.tensor);
  std::optional<quantizer::FeatureGrid> grid;
  try {
    grid = ingest::to_feature_grid(t, o.bits);
  } catch (const InvalidArgument& e) {
    err << "error: " << o.tensor << ": " << e.what() << '\n';
    return kInputError;
  }
  const auto codes = quantizer::lfq_quantize(*grid);

  nlohmann::json indices = nlohmann::json::array();
  for (std::size_t y = 0; y < codes.height; ++y) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t x = 0; x < codes.width; ++x) row.push_back(codes.indices[y * codes.width + x]);
    indices.push_back(std::move(row));
  }
  nlohmann::json report = {{"schema_version", kSchemaVersion},
                           {"bits", grid->bits()},
                           {"codebook_size", std::uint64_t{1} << grid->bits()},
                           {"grid", {codes.height, codes.width}},
                           {"indices", indices},
                           {"log_codebook_size", std::log(std::ldexp(1.0, grid->bits()))}};
  if (grid->bits() <= quantizer::kMaxExpandBits) {
    report["entropy_loss"] = quantizer::entropy_loss(quantizer::factorized_batch(*grid));
  } else {
    err << "warning: entropy loss needs bits <= " << quantizer::kMaxExpandBits << "; omitted\n";
    report["entropy_loss"] = nullptr;
  }
  out << report.dump(2) << '\n';
  return kSuccess;
}

}  // namespace geokit::cli
