#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "test_util.hpp"

using namespace geokit::cli;
using testutil::fixture;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

template <typename Opts, typename Fn>
Run run(Fn fn, const Opts& o) {
  std::ostringstream out, err;
  const int code = fn(o, out, err);
  return {code, out.str(), err.str()};
}

template <typename Opts, typename Fn>
Run run_twice(Fn fn, const Opts& o) {
  const auto a = run(fn, o);
  const auto b = run(fn, o);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
  return a;
}

}  // namespace

TEST(CliParse, CanonicalMatchesGolden) {
  ParseOptions o;
  o.file = fixture("cdl/triangle.cdl");
  o.canonical = true;
  const auto r = run_twice(run_parse, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out, testutil::slurp(fixture("cdl/triangle.canonical")));
}

TEST(CliParse, JsonAstRoundTrips) {
  ParseOptions o;
  o.file = fixture("cdl/triangle.cdl");
  o.json_ast = true;
  o.image_role = true;
  const auto r = run(run_parse, o);
  ASSERT_EQ(r.code, kSuccess);
  const auto doc = geokit::cdl::document_from_json(nlohmann::json::parse(r.out));
  EXPECT_EQ(doc.role, geokit::cdl::Role::Image);
  EXPECT_EQ(doc, geokit::cdl::parse_cdl(testutil::slurp(o.file), geokit::cdl::Role::Image));
}

TEST(CliParse, ErrorsUseFileLineColumn) {
  ParseOptions o;
  o.file = fixture("cdl/unbalanced.cdl");
  const auto r = run(run_parse, o);
  EXPECT_EQ(r.code, kInputError);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(r.err.rfind(o.file + ":3:1: error: expected", 0), 0u) << r.err;

  o.file = fixture("cdl/empty.cdl");
  EXPECT_EQ(run(run_parse, o).code, kSuccess);
  o.file = fixture("cdl/absent.cdl");
  EXPECT_EQ(run(run_parse, o).code, kInputError);
}

TEST(CliGsms, PrintsPercentLineAndPinnedReport) {
  testutil::TempDir dir("gsms");
  GsmsOptions o;
  o.pred = fixture("gsms/pred.jsonl");
  o.gold = fixture("gsms/gold.jsonl");
  o.report = dir.file("report.json");
  const auto r = run_twice(run_gsms, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out, "C-AA C-PA I-AA I-PA CI-PA\n74.17 60.00 66.67 40.00 20.00\n");
  EXPECT_EQ(testutil::slurp(o.report), testutil::slurp(fixture("gsms/report.json")));
}

TEST(CliGsms, FailUnderAndSelfMatch) {
  GsmsOptions o;
  o.pred = fixture("gsms/pred.jsonl");
  o.gold = fixture("gsms/gold.jsonl");
  o.fail_under = 0.5;
  EXPECT_EQ(run(run_gsms, o).code, kValidationFailure);
  o.fail_under = 0.2;
  EXPECT_EQ(run(run_gsms, o).code, kSuccess);

  o.pred = fixture("gsms/pred_self.jsonl");
  o.fail_under = 1.0;
  const auto r = run(run_gsms, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out, "C-AA C-PA I-AA I-PA CI-PA\n100.00 100.00 100.00 100.00 100.00\n");
}

TEST(CliGsms, DisjointIdsAreAnInputError) {
  GsmsOptions o;
  o.pred = fixture("gsms/pred_disjoint.jsonl");
  o.gold = fixture("gsms/gold.jsonl");
  EXPECT_EQ(run(run_gsms, o).code, kInputError);
}

TEST(CliGpms, ReportMatchesGolden) {
  GpmsOptions o;
  o.manifest = fixture("gpms/pair.jsonl");
  const auto r = run_twice(run_gpms, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out, testutil::slurp(fixture("gpms/expected_pair.json")));
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out).at("mean").get<double>(), 4.0 / 7.0);
}

TEST(CliGpms, ReportFileAndFailUnder) {
  testutil::TempDir dir("gpms");
  GpmsOptions o;
  o.manifest = fixture("gpms/identical.jsonl");
  o.report = dir.file("r.json");
  o.fail_under = 1.0;
  const auto r = run(run_gpms, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out, "GPMS 100.00 over 2 samples\n");
  EXPECT_EQ(nlohmann::json::parse(testutil::slurp(o.report)).at("mean"), 1.0);

  o.manifest = fixture("gpms/pair.jsonl");
  EXPECT_EQ(run(run_gpms, o).code, kValidationFailure);
}

TEST(CliGpms, DimensionMismatchSkipsSample) {
  GpmsOptions o;
  o.manifest = fixture("gpms/mixed.jsonl");
  const auto r = run(run_gpms, o);
  EXPECT_EQ(r.code, kValidationFailure);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("count"), 1);
  EXPECT_EQ(j.at("skipped").at(0).at("id"), "wide");
  EXPECT_NE(r.err.find("dimension mismatch"), std::string::npos);
}

TEST(CliReward, GroupMatchesGolden) {
  RewardOptions o;
  o.rollouts = fixture("rewards/group.jsonl");
  const auto r = run_twice(run_reward, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out, testutil::slurp(fixture("rewards/expected_group.jsonl")));
  std::istringstream lines(r.out);
  std::string line, last;
  while (std::getline(lines, line)) last = line;
  const auto g = nlohmann::json::parse(last);
  EXPECT_EQ(g.at("kind"), "group");
  const auto adv = g.at("advantages").get<std::vector<double>>();
  EXPECT_NEAR(adv[0], 1.0 / (std::sqrt(0.5) + 1e-8), 1e-15);
  EXPECT_EQ(adv[1], 0.0);
}

TEST(CliReward, SingletonGroupsWarnAndGroupByNone) {
  RewardOptions o;
  o.rollouts = fixture("rewards/perfect.jsonl");
  auto r = run(run_reward, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_NE(r.err.find("single rollout"), std::string::npos);
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("kind"), "rollout");
    EXPECT_EQ(j.at("reward").at("total"), 3.0);
    ++n;
  }
  EXPECT_EQ(n, 2);

  o.rollouts = fixture("rewards/group.jsonl");
  o.group_by = "none";
  r = run(run_reward, o);
  EXPECT_EQ(r.out.find("\"group\""), std::string::npos);
  o.group_by = "cluster";
  EXPECT_EQ(run(run_reward, o).code, kInputError);
}

TEST(CliReward, CustomTagsetAndEmptyInput) {
  RewardOptions o;
  o.rollouts = fixture("rewards/brackets.jsonl");
  o.tagset = fixture("config/tagset_brackets.json");
  auto r = run(run_reward, o);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("reward").at("total"), 3.0);
  o.tagset.clear();
  r = run(run_reward, o);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("reward").at("format"), 0.0);

  o.rollouts = fixture("rewards/empty.jsonl");
  r = run(run_reward, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_TRUE(r.out.empty());
}

TEST(CliPrompt, MatchesPinnedLayouts) {
  for (const char* task : {"t2d", "mmu", "mix"}) {
    PromptOptions o;
    o.problems = fixture("prompt/records.jsonl");
    o.diagrams = fixture("prompt/diagrams.json");
    o.task = task;
    const auto r = run_twice(run_prompt, o);
    EXPECT_EQ(r.code, kSuccess) << task << r.err;
    EXPECT_EQ(r.out, testutil::slurp(fixture(std::string("prompt/expected_") + task + ".jsonl")))
        << task;
  }
}

TEST(CliPrompt, DiagramRequirements) {
  PromptOptions o;
  o.problems = fixture("prompt/text_only.jsonl");
  o.task = "mmu";
  auto r = run(run_prompt, o);
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out,
            R"({"id":"t1","roles":["special","text","text","response"],"task":"mmu","tokens":[1000001,5,6,70]})"
            "\n");
  o.task = "t2d";
  r = run(run_prompt, o);
  EXPECT_EQ(r.code, kInputError);
  EXPECT_NE(r.err.find("no diagram tokens for 't1'"), std::string::npos);

  o.problems = fixture("prompt/records.jsonl");
  o.diagrams = fixture("prompt/diagrams.json");
  o.diagram_length = 3;
  r = run(run_prompt, o);
  EXPECT_EQ(r.code, kInputError);
  EXPECT_NE(r.err.find("expected 3"), std::string::npos);
  o.task = "caption";
  EXPECT_EQ(run(run_prompt, o).code, kInputError);
}

TEST(CliLfq, MatchesOracle) {
  LfqOptions o;
  o.tensor = fixture("lfq/grid_b2.json");
  o.bits = 2;
  const auto r = run_twice(run_lfq, o);
  ASSERT_EQ(r.code, kSuccess);
  const auto got = nlohmann::json::parse(r.out);
  const auto want = nlohmann::json::parse(testutil::slurp(fixture("lfq/grid_b2_expected.json")));
  EXPECT_EQ(got.at("indices"), want.at("indices"));
  EXPECT_NEAR(got.at("entropy_loss").get<double>(), want.at("entropy_loss").get<double>(), 1e-12);
  EXPECT_EQ(got.at("codebook_size"), 4);
  EXPECT_EQ(got.at("grid"), nlohmann::json::parse("[2,2]"));
}

TEST(CliLfq, EntropyExtremes) {
  LfqOptions o;
  o.tensor = fixture("lfq/zeros.geot");
  o.bits = 3;
  auto j = nlohmann::json::parse(run(run_lfq, o).out);
  EXPECT_NEAR(j.at("entropy_loss").get<double>(), std::log(8.0), 1e-12);
  o.tensor = fixture("lfq/saturated.geot");
  j = nlohmann::json::parse(run(run_lfq, o).out);
  EXPECT_NEAR(j.at("entropy_loss").get<double>(), 0.0, 1e-12);
  o.bits = 4;
  EXPECT_EQ(run(run_lfq, o).code, kInputError);
}

TEST(CliLfq, WideCodesOmitEntropy) {
  testutil::TempDir dir("lfq");
  geokit::ingest::Tensor t{{1, 1, 20}, std::vector<float>(20, 1.0f)};
  geokit::ingest::write_geot(dir.file("w.geot"), t);
  LfqOptions o;
  o.tensor = dir.file("w.geot");
  o.bits = 20;
  const auto r = run(run_lfq, o);
  EXPECT_EQ(r.code, kSuccess);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("entropy_loss").is_null());
  EXPECT_EQ(j.at("indices").at(0).at(0), (1u << 20) - 1);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(CliLfq, TruncatedTensorThrowsIngestError) {
  LfqOptions o;
  o.tensor = fixture("lfq/truncated.geot");
  o.bits = 3;
  EXPECT_THROW(run(run_lfq, o), geokit::ingest::IngestError);
}
