#include <gtest/gtest.h>

#include <cstring>

#include "geokit/ingest.hpp"
#include "test_util.hpp"

using namespace geokit::ingest;
using geokit::metrics::BinaryDiagram;

namespace {

template <typename Fn>
std::string ingest_error(Fn&& fn) {
  try {
    fn();
  } catch (const IngestError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected IngestError";
  return {};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST(IngestProblems, LoadsAliasedFields) {
  const auto rs = load_problems(testutil::fixture("ingest/problems_ok.jsonl"));
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].id, "1");
  EXPECT_EQ(rs[0].answer_kind, geokit::rewards::AnswerKind::Choice);
  EXPECT_EQ(rs[0].solution, "...");
  EXPECT_EQ(rs[1].problem_text_en, "Circle O has radius 3.");
  EXPECT_EQ(rs[1].conscdl, "Shape(OA)\nCocircular(O,A)");
  EXPECT_EQ(rs[1].answer_kind, geokit::rewards::AnswerKind::Open);
  EXPECT_EQ(rs[1].line, 2u);
}

TEST(IngestProblems, BadCdlNamesLineAndStatement) {
  const auto path = testutil::fixture("ingest/problems_bad_line3.jsonl");
  const auto msg = ingest_error([&] { load_problems(path); });
  EXPECT_TRUE(contains(msg, ":3:")) << msg;
  EXPECT_TRUE(contains(msg, "Equal(LengthOfLine(AB),5")) << msg;
  EXPECT_TRUE(contains(msg, "conscdl")) << msg;
  LoadOptions lenient;
  lenient.lenient = true;
  EXPECT_EQ(load_problems(path, lenient).size(), 3u);
}

TEST(IngestProblems, EmptyFileAndSchemaErrors) {
  EXPECT_TRUE(load_problems(testutil::fixture("ingest/empty.jsonl")).empty());
  EXPECT_TRUE(contains(ingest_error([] { parse_problems("x", "{\"id\":\"1\"}\n[1]\n"); }), "x:2:"));
  EXPECT_TRUE(contains(ingest_error([] { parse_problems("x", "{\"id\":\"1\"}\n{\"id\":\"1\"}"); }),
                       "duplicate id"));
  EXPECT_TRUE(contains(ingest_error([] { parse_problems("x", "{oops}"); }), "malformed JSON"));
  EXPECT_TRUE(contains(ingest_error([] { parse_problems("x", R"j({"id":"1","answer":"E","answer_kind":"choice"})j"); }),
                       "x:1:"));
  EXPECT_TRUE(contains(ingest_error([] { load_problems("/nonexistent/file.jsonl"); }), "cannot open"));
}

TEST(IngestProblems, JsonRoundTrip) {
  const auto rs = load_problems(testutil::fixture("ingest/problems_ok.jsonl"));
  std::string body;
  for (const auto& r : rs) body += to_json(r).dump() + "\n";
  const auto again = parse_problems("mem", body);
  ASSERT_EQ(again.size(), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) EXPECT_EQ(to_json(again[i]), to_json(rs[i]));
}

TEST(IngestCdlPairs, LenientTurnsBadCdlIntoEmpty) {
  testutil::TempDir dir("pairs");
  const auto p = dir.file("pairs.jsonl");
  testutil::spit(p, R"j({"id":"a","conscdl":"Shape(AB","imgcdl":"Shape(X)"})j" "\n");
  EXPECT_THROW(load_cdl_pairs(p), IngestError);
  const auto rs = load_cdl_pairs(p, true);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_TRUE(rs[0].conscdl.statements.empty());
  EXPECT_EQ(rs[0].imgcdl.statements.size(), 1u);
}

TEST(IngestManifest, ResolvesRelativePathsAndChecksFiles) {
  testutil::TempDir dir("manifest");
  const auto gt = dir.file("a.png");
  geokit::metrics::GrayImage img{2, 1, {0, 255}};
  write_png_gray(gt, img);
  testutil::spit(dir.file("m.jsonl"), R"j({"id":"x","gold":"a.png","rec":"a.png"})j" "\n");
  const auto m = load_manifest(dir.file("m.jsonl"));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].gold.string(), gt);
  testutil::spit(dir.file("bad.jsonl"), R"j({"id":"x","gold":"a.png","rec":"missing.png"})j" "\n");
  EXPECT_TRUE(contains(ingest_error([&] { load_manifest(dir.file("bad.jsonl")); }), "missing.png"));
}

TEST(IngestPng, WhiteCanvasHasNoBlackPixels) {
  const auto d = load_diagram(testutil::fixture("diagrams/white512.png"));
  EXPECT_EQ(d.width(), 512u);
  EXPECT_EQ(d.height(), 512u);
  EXPECT_EQ(d.black_count(), 0u);
}

TEST(IngestPng, OneBitZeroIsBlack) {
  const auto d = load_diagram(testutil::fixture("diagrams/onebit.png"));
  EXPECT_EQ(d.width(), 3u);
  EXPECT_EQ(d.height(), 2u);
  EXPECT_EQ(d.black_pixels(), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {2, 1}}));
}

TEST(IngestPng, RedIsBlackAtDefaultThreshold) {
  const auto g = read_png_gray(testutil::fixture("diagrams/red_pixel.png"));
  EXPECT_EQ(g.pixels[1], 76);
  const auto d = load_diagram(testutil::fixture("diagrams/red_pixel.png"));
  EXPECT_EQ(d.black_pixels(), (std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}}));
  EXPECT_EQ(load_diagram(testutil::fixture("diagrams/red_pixel.png"), 76).black_count(), 0u);
}

TEST(IngestPng, ThresholdIsStrict) {
  const auto g = read_png_gray(testutil::fixture("diagrams/threshold_edge.png"));
  EXPECT_EQ(g.pixels, (std::vector<std::uint8_t>{127, 128}));
  EXPECT_EQ(load_diagram(testutil::fixture("diagrams/threshold_edge.png")).black_pixels(),
            (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}}));
}

TEST(IngestPng, TransparencyCompositesOverWhite) {
  const auto d = load_diagram(testutil::fixture("diagrams/transparent.png"));
  EXPECT_EQ(d.black_pixels(), (std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}}));
}

TEST(IngestPng, WriteReadRoundTrip) {
  testutil::TempDir dir("png");
  auto g = testutil::rng(50);
  std::uniform_int_distribution<int> px(0, 255);
  geokit::metrics::GrayImage img{7, 5, {}};
  for (int i = 0; i < 35; ++i) img.pixels.push_back(static_cast<std::uint8_t>(px(g)));
  write_png_gray(dir.file("g.png"), img);
  const auto back = read_png_gray(dir.file("g.png"));
  EXPECT_EQ(back.width, 7u);
  EXPECT_EQ(back.pixels, img.pixels);
}

TEST(IngestPng, UnreadableFiles) {
  testutil::TempDir dir("badpng");
  testutil::spit(dir.file("x.png"), "not a png");
  EXPECT_THROW(load_diagram(dir.file("x.png")), IngestError);
  EXPECT_THROW(load_diagram(dir.file("absent.png")), IngestError);
}

TEST(IngestTensor, GeotRoundTrip) {
  auto g = testutil::rng(51);
  std::uniform_real_distribution<float> u(-100.f, 100.f);
  testutil::TempDir dir("geot");
  for (std::vector<std::uint32_t> shape :
       {std::vector<std::uint32_t>{5}, {3, 4}, {2, 3, 6}, {1, 1, 1, 1}, {0, 3}}) {
    Tensor t{shape, {}};
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    for (std::size_t i = 0; i < n; ++i) t.data.push_back(u(g));
    EXPECT_EQ(decode_geot(encode_geot(t)), t);
    write_geot(dir.file("t.geot"), t);
    EXPECT_EQ(load_tensor(dir.file("t.geot")), t);
  }
}

TEST(IngestTensor, GeotHeaderLayout) {
  const auto bytes = encode_geot(Tensor{{2}, {1.0f, -2.0f}});
  ASSERT_EQ(bytes.size(), 16u + 4u + 8u);
  EXPECT_EQ(bytes.substr(0, 4), "GEOT");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 1);
  EXPECT_EQ(bytes.substr(6, 10), std::string(10, '\0'));
  EXPECT_EQ(bytes.substr(16, 4), std::string("\x02\0\0\0", 4));
  EXPECT_EQ(bytes.substr(20, 4), std::string("\x00\x00\x80\x3f", 4));  // 1.0f
}

TEST(IngestTensor, GeotErrors) {
  const auto msg = ingest_error([] { load_tensor(testutil::fixture("lfq/truncated.geot")); });
  EXPECT_TRUE(contains(msg, "expected 60 bytes, got 55")) << msg;

  auto good = encode_geot(Tensor{{2}, {1.0f, 2.0f}});
  EXPECT_TRUE(contains(ingest_error([&] { decode_geot(good + "xx"); }), "oversized"));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_TRUE(contains(ingest_error([&] { decode_geot(bad_magic); }), "magic"));
  auto bad_dtype = good;
  bad_dtype[5] = 2;
  EXPECT_TRUE(contains(ingest_error([&] { decode_geot(bad_dtype); }), "dtype"));
  auto bad_rank = good;
  bad_rank[4] = 9;
  EXPECT_TRUE(contains(ingest_error([&] { decode_geot(bad_rank); }), "rank"));
  EXPECT_TRUE(contains(ingest_error([&] { decode_geot(good.substr(0, 10)); }), "header"));
  auto nan = good;
  std::memcpy(&nan[20], "\x00\x00\xc0\x7f", 4);
  EXPECT_TRUE(contains(ingest_error([&] { decode_geot(nan); }), "non-finite"));
  // 2^16 x 2^16 x 2 elements exceeds the element cap
  std::string huge = good.substr(0, 16);
  huge[4] = 3;
  for (std::uint32_t d : {65536u, 65536u, 2u}) {
    for (int i = 0; i < 4; ++i) huge.push_back(static_cast<char>((d >> (8 * i)) & 0xff));
  }
  EXPECT_TRUE(contains(ingest_error([&] { decode_geot(huge); }), "overflow"));
}

TEST(IngestTensor, JsonTensorToFeatureGrid) {
  const auto t = load_tensor(testutil::fixture("lfq/grid_b2.json"));
  EXPECT_EQ(t.shape, (std::vector<std::uint32_t>{2, 2, 2}));
  const auto grid = to_feature_grid(t, 2);
  EXPECT_EQ(grid.height(), 2u);
  EXPECT_EQ(grid.width(), 2u);
  EXPECT_EQ(grid.bits(), 2);
  EXPECT_THROW(to_feature_grid(t, 3), geokit::InvalidArgument);
  EXPECT_EQ(tensor_from_json(tensor_to_json(t)), t);
}

TEST(IngestTensor, JsonTensorErrors) {
  EXPECT_THROW(tensor_from_json(nlohmann::json::parse("[[1,2],[3]]")), IngestError);
  EXPECT_THROW(tensor_from_json(nlohmann::json::parse("[[1,\"a\"]]")), IngestError);
  EXPECT_THROW(tensor_from_json(nlohmann::json::parse("3")), IngestError);
}

TEST(IngestPrompt, RecordsAndSidecar) {
  const auto rs = load_prompt_records(testutil::fixture("prompt/records.jsonl"));
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_EQ(rs[0].knowledge_tokens, (std::vector<geokit::prompting::TokenId>{40, 41, 42}));
  EXPECT_TRUE(rs[2].knowledge_tokens.empty());
  const auto d = load_diagram_tokens(testutil::fixture("prompt/diagrams.json"));
  EXPECT_EQ(d.at("p2"), (std::vector<geokit::prompting::TokenId>{3, 1, 4, 1}));

  testutil::TempDir dir("prompt");
  testutil::spit(dir.file("bad.jsonl"), R"j({"id":"a","text_tokens":[1,"x"]})j" "\n");
  EXPECT_TRUE(contains(ingest_error([&] { load_prompt_records(dir.file("bad.jsonl")); }), "text_tokens"));
}

TEST(IngestRollouts, LoadsGroups) {
  const auto rs = load_rollouts(testutil::fixture("rewards/group.jsonl"));
  ASSERT_EQ(rs.size(), 4u);
  for (const auto& r : rs) EXPECT_EQ(r.question_id, "q7");
  EXPECT_TRUE(load_rollouts(testutil::fixture("rewards/empty.jsonl")).empty());
}
