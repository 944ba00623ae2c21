#include <gtest/gtest.h>

#include <filesystem>

#include "polymatch/csv.hpp"
#include "polymatch/dataset.hpp"
#include "polymatch/json_io.hpp"
#include "polymatch/pipeline.hpp"
#include "polymatch/poly_gs.hpp"
#include "support/random_market.hpp"

using namespace polymatch;
using polymatch::fixtures::make_market;
using polymatch::fixtures::pairs_of;

namespace {

const char* kStudentsHeader = "id,fields,ranked_advisors\n";
const char* kAdvisorsHeader = "id,fields,evaluator_id,interview_capacity,hiring_capacity\n";
const char* kScoresHeader = "advisor_id,student_id,phase,score\n";

io::DatasetText base() {
  return {std::string(kStudentsHeader) + "s1,ML;CV,a1;a2|a3\ns2,NLP,\n",
          std::string(kAdvisorsHeader) + "a1,ML,e1,4,1\na2,CV,e2,2,1\na3,NLP;ML,e3,10,2\n",
          std::string(kScoresHeader) + "a1,s1,1,A-B\na1,s1,2,1\na2,s2,2,5\na3,s2,3,2\n",
          std::nullopt};
}

std::vector<io::Issue> issues_of(const io::DatasetText& text) {
  try {
    io::ingest_text(text);
  } catch (const io::IngestError& e) {
    return e.issues();
  }
  return {};
}

}  // namespace

TEST(CsvTest, QuotesAndBom) {
  const auto rows = csv::parse("\xEF\xBB\xBF" "a,\"b,c\",\"say \"\"hi\"\"\"\r\n\r\nx,\"multi\nline\",\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (csv::Row{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ(rows[1], (csv::Row{"x", "multi\nline", ""}));
  EXPECT_THROW(csv::parse("a,\"open"), InputError);
  EXPECT_EQ(csv::format_row({"a", "b,c", "q\""}), "a,\"b,c\",\"q\"\"\"\n");
  EXPECT_EQ(csv::parse(csv::format_row({"a", "b,c", "q\"", "l\nm"}))[0],
            (csv::Row{"a", "b,c", "q\"", "l\nm"}));
}

TEST(IngestTest, ValidBundle) {
  const auto b = io::ingest_text(base());
  ASSERT_EQ(b.students.size(), 2u);
  EXPECT_EQ(b.students[0].ranked_advisors, (RankedGroups{{"a1"}, {"a2", "a3"}}));
  EXPECT_TRUE(b.students[1].ranked_advisors.empty());
  EXPECT_EQ(b.advisors[2].fields, (std::vector<std::string>{"NLP", "ML"}));
  EXPECT_EQ(b.catalog.names(), (std::vector<std::string>{"CV", "ML", "NLP"}));
  EXPECT_EQ(b.grades, (std::vector<GradeRecord>{{"a1", "s1", "A-B"}}));
  EXPECT_EQ(b.interview_scores.get("a1", "s1"), 1);
  EXPECT_EQ(b.interview_scores.get("a2", "s2"), 5);
  EXPECT_EQ(b.hiring_scores.get("a3", "s2"), 2);
  EXPECT_EQ(b.provenance.size(), 3u);
  EXPECT_EQ(b.schema_version, kSchemaVersion);
}

TEST(IngestTest, SixFieldsIsALimitViolation) {
  auto t = base();
  t.students = std::string(kStudentsHeader) + "s1,A;B;C;D;E;F,\n";
  t.scores = kScoresHeader;
  const auto issues = issues_of(t);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].code, "field_limit");
  EXPECT_EQ(issues[0].row, 1u);
  EXPECT_NE(issues[0].message.find("up to five research fields"), std::string::npos);
}

TEST(IngestTest, EmptyFilesGiveEmptyBundle) {
  const auto b = io::ingest_text({"", "", "", std::nullopt});
  EXPECT_TRUE(b.students.empty());
  EXPECT_TRUE(b.advisors.empty());
  const auto h = io::ingest_text({kStudentsHeader, kAdvisorsHeader, kScoresHeader, std::nullopt});
  EXPECT_TRUE(h.students.empty());
}

TEST(IngestTest, ScoreForUnknownStudent) {
  auto t = base();
  t.scores += "a1,ghost,2,3\n";
  const auto issues = issues_of(t);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].code, "unknown_reference");
  EXPECT_EQ(issues[0].row, 5u);
}

TEST(IngestTest, ReportsEveryProblemWithRows) {
  auto t = base();
  t.students = std::string(kStudentsHeader) + "s1,ML,a1;a1\ns1,ML,\n,ML,\ns4,ML,zz\n" +
               "s5,ML,a1;a2;a3;a1|a2\n";
  t.advisors = std::string(kAdvisorsHeader) + "a1,ML,e1,x,1\na2,ML,e2,1,1\na3,ML,a1,1,1\n";
  t.scores = std::string(kScoresHeader) + "a1,s4,4,1\na1,s4,1,Q\na1,s4,2,9\na1,s4,2,1\na1,s4,2,2\n";
  std::set<std::pair<std::string, std::size_t>> got;
  for (const auto& i : issues_of(t)) got.insert({i.code, i.row});
  const std::set<std::pair<std::string, std::size_t>> expected{
      {"duplicate_listing", 1}, {"duplicate_id", 2},   {"empty_id", 3},     {"unknown_reference", 4},
      {"duplicate_listing", 5}, {"bad_integer", 1},    {"duplicate_id", 3}, {"bad_phase", 1},
      {"bad_grade", 2},         {"score_range", 3},    {"duplicate_score", 5}};
  for (const auto& e : expected) EXPECT_TRUE(got.contains(e)) << e.first << " row " << e.second;
}

TEST(IngestTest, RankedLimit) {
  auto t = base();
  std::string advisors = kAdvisorsHeader;
  std::string ranked;
  for (int i = 0; i < 11; ++i) {
    advisors += "b" + std::to_string(i) + ",ML,f" + std::to_string(i) + ",1,1\n";
    ranked += (i ? ";" : "") + std::string("b") + std::to_string(i);
  }
  t.advisors = advisors;
  t.students = std::string(kStudentsHeader) + "s1,ML," + ranked + "\n";
  t.scores = kScoresHeader;
  const auto issues = issues_of(t);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].code, "ranked_limit");
}

TEST(IngestTest, MissingColumnAndCatalog) {
  auto t = base();
  t.advisors = "id,fields\na1,ML\n";
  EXPECT_EQ(issues_of(t).at(0).code, "missing_column");
  t = base();
  t.fields = "field\nML\nCV\n";
  const auto issues = issues_of(t);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].code, "unknown_field");
  t.fields = "field\nML\nCV\nNLP\nRL\n";
  EXPECT_EQ(io::ingest_text(t).catalog.names(), (std::vector<std::string>{"ML", "CV", "NLP", "RL"}));
}

TEST(IngestTest, MissingFile) {
  try {
    io::ingest({"/nonexistent/students.csv", "/nonexistent/advisors.csv", std::nullopt, std::nullopt});
    FAIL();
  } catch (const io::IngestError& e) {
    EXPECT_EQ(e.code(), "file_missing");
    EXPECT_EQ(e.issues().size(), 2u);
  }
}

TEST(SynthTest, Deterministic) {
  const io::SynthSizes sizes{500, 100};
  EXPECT_EQ(io::synth(sizes, 11), io::synth(sizes, 11));
  EXPECT_NE(io::synth(sizes, 11), io::synth(sizes, 12));
  EXPECT_EQ(io::serialize(io::synth(sizes, 11)).students, io::serialize(io::synth(sizes, 11)).students);
}

TEST(SynthTest, Empty) {
  const auto b = io::synth({0, 0}, 1);
  EXPECT_TRUE(b.students.empty());
  EXPECT_TRUE(b.advisors.empty());
  EXPECT_EQ(io::ingest_text(io::serialize(b)), b);
}

TEST(SynthProperty, SerializeIngestRoundTrip) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const io::SynthSizes sizes{seed * 13, seed % 7 + 1, 3 + seed % 20, 0.2, 0.1, 0.6};
    const auto b = io::synth(sizes, seed);
    const auto again = io::ingest_text(io::serialize(b));
    ASSERT_EQ(again, b) << "seed " << seed;
    ASSERT_EQ(io::serialize(again).students, io::serialize(b).students);
  }
}

TEST(SynthTest, WriteAndIngestFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "polymatch_io_test";
  std::filesystem::remove_all(dir);
  const auto b = io::synth({40, 8}, 3);
  io::write_bundle(b, dir);
  const auto again = io::ingest({dir / "students.csv", dir / "advisors.csv", dir / "scores.csv", dir / "fields.csv"});
  EXPECT_EQ(again, b);
  EXPECT_EQ(again.provenance.at("students.csv").rfind("fnv1a64:", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(JsonTest, MarketRoundTrip) {
  const auto m = make_market({{"m1", 2, {"w1|w2", "w3"}}, {"m2", 1, {}}},
                             {{"w1", 1, {"m1"}}, {"w2", 3, {"m2", "m1"}}, {"w3", 1, {}}});
  const auto doc = io::market_to_json(m);
  EXPECT_EQ(doc["preferences"]["m1"].dump(), R"([["w1","w2"],"w3"])");
  const auto again = io::market_from_json(nlohmann::json::parse(doc.dump()));
  EXPECT_EQ(io::market_to_json(again).dump(), doc.dump());
}

TEST(JsonTest, MarketSchemaErrors) {
  auto code = [](const char* text) {
    try {
      io::market_from_json(nlohmann::json::parse(text));
    } catch (const InputError& e) {
      return e.code();
    }
    return std::string("none");
  };
  EXPECT_EQ(code("[]"), "market_schema");
  EXPECT_EQ(code(R"({"proposers":[{"quota":1}]})"), "market_schema");
  EXPECT_EQ(code(R"({"proposers":[{"id":"m","quota":"x"}]})"), "market_schema");
  EXPECT_EQ(code(R"({"proposers":[{"id":"m"}],"preferences":{"m":[[]]}})"), "market_schema");
  EXPECT_EQ(code(R"({"proposers":[{"id":"m"}],"preferences":{"m":["w"]}})"), "unknown_agent");
  EXPECT_EQ(code(R"({"proposers":[{"id":"m"}]})"), "none");
}

TEST(JsonTest, MatchingRoundTrip) {
  const auto m = make_market({{"m1", 1, {"w1"}}, {"m2", 1, {"w2"}}}, {{"w1", 1, {"m1"}}, {"w2", 1, {"m2"}}});
  const auto r = poly_gs(m, TieBreakSeed{9});
  const auto doc = io::matching_to_json(m, r);
  EXPECT_EQ(doc["pairs"].dump(), R"([["m1","w1"],["m2","w2"]])");
  EXPECT_EQ(doc["seed"], 9u);
  EXPECT_EQ(io::matching_from_json(m, nlohmann::json::parse(doc.dump())), r.matching);
  EXPECT_THROW(io::matching_from_json(m, nlohmann::json::parse(R"({"pairs":[["w1","m1"]]})")), InputError);
  EXPECT_THROW(io::matching_from_json(m, nlohmann::json::parse(R"({"pairs":[["m1","zz"]]})")), InputError);
}

TEST(JsonTest, HistogramCsv) {
  const pipeline::RankHistogram h{{1, 1, 4}, {3, -1, 2}};
  EXPECT_EQ(io::histogram_csv(h), "position,rank,count\n1,1,4\n3,-1,2\n");
}

TEST(JsonTest, TraceEvent) {
  const auto m = make_market({{"m1", 1, {"w1"}}}, {{"w1", 1, {"m1"}}});
  std::vector<std::string> lines;
  GsOptions options;
  options.trace = [&](const TraceEvent& e) { lines.push_back(io::trace_event_to_json(m, e).dump()); };
  poly_gs(m, TieBreakSeed{0}, options);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], R"({"event":"propose","proposer":"m1","receiver":"w1","weakestRank":1})");
  EXPECT_EQ(lines[2], R"({"event":"displace","proposer":"m1","receiver":"w1","displaced":"w1","weakestRank":0})");
}

TEST(JsonTest, ReportHasSchemaAndSections) {
  io::SynthSizes sizes{30, 6};
  sizes.interview_score_density = 0.6;
  const auto b = io::synth(sizes, 2);
  const auto r = pipeline::run_phase2(b.catalog, b.students, b.advisors, b.interview_scores, {}, b.grades);
  const auto doc = io::report_to_json(r);
  EXPECT_EQ(doc["schemaVersion"], kSchemaVersion);
  for (const char* key : {"phase", "seed", "acceptedSeed", "iterations", "runs", "removed", "removalsPerIteration",
                          "matching", "rankDistributions", "fill", "suggestions", "warnings"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(io::dump(doc), io::dump(io::report_to_json(
                               pipeline::run_phase2(b.catalog, b.students, b.advisors, b.interview_scores, {}, b.grades))));
}
