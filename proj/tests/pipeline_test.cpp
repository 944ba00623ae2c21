#include <gtest/gtest.h>

#include <cmath>

#include "polymatch/dataset.hpp"
#include "polymatch/errors.hpp"
#include "polymatch/pipeline.hpp"
#include "polymatch/poly_gs.hpp"
#include "polymatch/stability.hpp"
#include "polymatch/tie_breaking.hpp"
#include "support/random_market.hpp"

using namespace polymatch;
using namespace polymatch::pipeline;
using polymatch::fixtures::make_market;
using polymatch::fixtures::pairs_of;

namespace {

StudentRecord student(std::string id, std::vector<std::string> fields, RankedGroups ranked = {}) {
  return {std::move(id), std::move(fields), std::move(ranked)};
}

AdvisorRecord advisor(std::string id, std::vector<std::string> fields, int interview = 0, int hiring = 0) {
  return {id, std::move(fields), "e-" + id, interview, hiring};
}

int degree(const PhaseReport& r, const std::string& id) {
  return static_cast<int>(r.matching.partners(r.market.require(id)).size());
}

}  // namespace

TEST(FormulaTest, EvaluatorQuota) {
  EXPECT_EQ(evaluator_quota(500, 100, 3), 15);
  EXPECT_EQ(evaluator_quota(1, 1, 3), 3);
  EXPECT_EQ(evaluator_quota(10, 3, 3), 10);
  EXPECT_EQ(evaluator_quota(0, 3, 3), 1);
  EXPECT_THROW(evaluator_quota(5, 0, 3), InputError);
}

TEST(FormulaTest, RemovalBound) {
  EXPECT_EQ(removal_bound(3, 3, 500, 100), 11);
  EXPECT_EQ(removal_bound(3, 1, 500, 100), 1);
  EXPECT_EQ(removal_bound(3, 2, 100, 100), 2);
  // Floating evaluation of the same expression for a spread of inputs.
  for (int qs = 1; qs <= 5; ++qs) {
    for (int qmin = 1; qmin <= qs; ++qmin) {
      for (std::size_t s : {1u, 7u, 99u, 500u, 1234u}) {
        for (std::size_t e : {1u, 3u, 100u, 250u}) {
          const double f = std::floor((qmin - 1) * (static_cast<double>(s) / e + 1.0 / qs) + 1 + 1e-9);
          EXPECT_EQ(removal_bound(qs, qmin, s, e), static_cast<long long>(f)) << qs << qmin << s << e;
        }
      }
    }
  }
}

TEST(FormulaTest, InterviewQuota) {
  const Phase2Config c;
  EXPECT_EQ(interview_quota(10, c), 8);
  EXPECT_EQ(interview_quota(2, c), 2);
  EXPECT_EQ(interview_quota(1, c), 1);
  EXPECT_EQ(interview_quota(3, c), 2);
  EXPECT_EQ(interview_quota(5, c), 4);
  EXPECT_EQ(interview_quota(12, c), 9);
}

TEST(FormulaTest, ProtectionAndAverage) {
  EXPECT_TRUE(is_protected(std::vector<int>{1, 5}));
  EXPECT_TRUE(is_protected(std::vector<int>{1, 1, 6}));
  EXPECT_FALSE(is_protected(std::vector<int>{1, 2, 3}));
  EXPECT_FALSE(is_protected(std::vector<int>{5, 5}));
  EXPECT_FALSE(is_protected(std::vector<int>{}));
  EXPECT_DOUBLE_EQ(average_score(std::vector<int>{1, 2, 6}), 3.0);
  EXPECT_TRUE(std::isinf(average_score(std::vector<int>{})));
}

TEST(RankDistributionTest, FirstChoiceIsRankOne) {
  const auto m = make_market({{"s", 1, {"a1", "a2"}}}, {{"a1", 1, {"s"}}, {"a2", 1, {"s"}}});
  EXPECT_EQ(rank_distribution(pairs_of(m, {{"s", "a1"}}), m, Side::Proposing, 1),
            (RankHistogram{{1, 1, 1}}));
}

TEST(RankDistributionTest, UnfilledPositionIsMinusOne) {
  const auto m = make_market({{"s", 3, {"a1", "a2", "a3"}}},
                             {{"a1", 1, {"s"}}, {"a2", 1, {"s"}}, {"a3", 1, {"s"}}});
  EXPECT_EQ(rank_distribution(pairs_of(m, {{"s", "a2"}, {"s", "a3"}}), m, Side::Proposing, 3),
            (RankHistogram{{1, 2, 1}, {2, 3, 1}, {3, -1, 1}}));
}

TEST(RankDistributionTest, RankIsClassIndex) {
  const auto m = make_market({{"s", 1, {"a1", "a2|a3", "a4"}}},
                             {{"a1", 1, {}}, {"a2", 1, {}}, {"a3", 1, {"s"}}, {"a4", 1, {}}});
  EXPECT_EQ(rank_distribution(pairs_of(m, {{"s", "a3"}}), m, Side::Proposing, 1),
            (RankHistogram{{1, 2, 1}}));
}

TEST(RankDistributionTest, UnlistedPartnerIsZero) {
  const auto m = make_market({{"s", 1, {}}}, {{"a1", 1, {"s"}}});
  EXPECT_EQ(rank_distribution(pairs_of(m, {{"s", "a1"}}), m, Side::Proposing, 1),
            (RankHistogram{{1, 0, 1}}));
}

TEST(Phase1Test, DisjointFirstChoices) {
  const FieldCatalog catalog({"X", "Y"});
  const std::vector<StudentRecord> students{student("s1", {"X"}, {{"a1"}, {"a2"}}),
                                            student("s2", {"Y"}, {{"a2"}, {"a1"}})};
  const std::vector<AdvisorRecord> advisors{advisor("a1", {"X"}), advisor("a2", {"Y"})};
  Phase1Config config;
  config.student_quota = 1;
  config.min_matches = 1;
  const auto r = run_phase1(catalog, students, advisors, config);
  EXPECT_TRUE(r.removed.empty());
  EXPECT_EQ(r.matching, pairs_of(r.market, {{"s1", "e-a1"}, {"s2", "e-a2"}}));
  EXPECT_EQ(r.rank_distributions.at("proposers"), (RankHistogram{{1, 1, 2}}));
  EXPECT_EQ(r.iterations, 1);
  ASSERT_TRUE(r.accepted_seed);
  EXPECT_EQ(*r.accepted_seed, derive_seed(config.seed, 1).value);
}

TEST(Phase1Test, ShortCapacityForcesRemovals) {
  const FieldCatalog catalog({"X"});
  std::vector<StudentRecord> students;
  for (int i = 1; i <= 5; ++i) students.push_back(student("s" + std::to_string(i), {"X"}));
  const std::vector<AdvisorRecord> advisors{advisor("a1", {"X"}), advisor("a2", {"X"}), advisor("a3", {"X"})};
  Phase1Config config;
  config.evaluator_quota = 2;  // 6 seats for 15 requested
  const auto r = run_phase1(catalog, students, advisors, config);
  EXPECT_GE(r.removed.size(), 3u);
  EXPECT_EQ(r.market.size(Side::Proposing) + r.removed.size(), 5u);
  for (const auto& a : r.market.agents(Side::Proposing)) EXPECT_EQ(degree(r, a.id), 3);
  EXPECT_TRUE(is_stable(r.market, r.matching));
}

TEST(Phase1Test, SingleEvaluatorIsInfeasible) {
  const FieldCatalog catalog({"X"});
  const std::vector<StudentRecord> students{student("s1", {"X"}), student("s2", {"X"})};
  const std::vector<AdvisorRecord> advisors{advisor("a1", {"X"})};
  EXPECT_THROW(run_phase1(catalog, students, advisors, {}), InfeasibleError);
}

TEST(Phase1Test, RemovalBatchCapsEachIteration) {
  const FieldCatalog catalog({"X"});
  std::vector<StudentRecord> students;
  for (int i = 1; i <= 8; ++i) students.push_back(student("s" + std::to_string(i), {"X"}));
  const std::vector<AdvisorRecord> advisors{advisor("a1", {"X"}), advisor("a2", {"X"}), advisor("a3", {"X"})};
  Phase1Config config;
  config.evaluator_quota = 2;
  config.removal_batch = 1;
  const auto r = run_phase1(catalog, students, advisors, config);
  for (auto n : r.removals_per_iteration) EXPECT_LE(n, 1u);
  for (const auto& a : r.market.agents(Side::Proposing)) EXPECT_EQ(degree(r, a.id), 3);
}

TEST(Phase1Property, RemovalsWithinBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    io::SynthSizes sizes;
    sizes.students = 60 + seed * 7;
    sizes.advisors = 5 + seed;
    const auto b = io::synth(sizes, seed);
    Phase1Config config;
    config.seed = TieBreakSeed{seed};
    const auto r = run_phase1(b.catalog, b.students, b.advisors, config);
    EXPECT_LE(static_cast<long long>(r.removed.size()),
              removal_bound(3, 3, b.students.size(), b.advisors.size()));
    for (const auto& a : r.market.agents(Side::Proposing)) ASSERT_EQ(degree(r, a.id), 3);
    EXPECT_TRUE(is_stable(r.market, r.matching));
  }
}

TEST(Phase2Test, ProtectedStudentIsKept) {
  const FieldCatalog catalog({"X"});
  const std::vector<StudentRecord> students{student("s1", {"X"}), student("s2", {"X"})};
  const std::vector<AdvisorRecord> advisors{advisor("a1", {"X"}, 1), advisor("a2", {"X"}, 4)};
  ScoreTable scores;
  scores.set("a1", "s1", 1);
  scores.set("a2", "s1", 5);
  scores.set("a1", "s2", 2);
  const auto r = run_phase2(catalog, students, advisors, scores, {});
  EXPECT_TRUE(r.market.find("s1"));
  EXPECT_EQ(degree(r, "s1"), 1);
  ASSERT_EQ(r.removed.size(), 1u);
  EXPECT_EQ(r.removed[0].student, "s2");
}

TEST(Phase2Test, WorstAverageRemovedFirst) {
  const FieldCatalog catalog({"X"});
  std::vector<StudentRecord> students;
  for (int i = 1; i <= 4; ++i) students.push_back(student("s" + std::to_string(i), {"X"}));
  const std::vector<AdvisorRecord> advisors{advisor("a1", {"X"}, 2), advisor("a2", {"X"}, 2)};
  ScoreTable scores;
  // s1, s2 scored 2 by both; s3 scored 3 by a1, s4 scored 4 by a1 and 6 by a2.
  for (const char* s : {"s1", "s2"}) {
    scores.set("a1", s, 2);
    scores.set("a2", s, 2);
  }
  scores.set("a1", "s3", 3);
  scores.set("a1", "s4", 4);
  scores.set("a2", "s4", 6);
  Phase2Config config;
  config.removal_batch = 1;
  const auto r = run_phase2(catalog, students, advisors, scores, config);
  ASSERT_EQ(r.removed.size(), 2u);
  EXPECT_EQ(r.removed[0].student, "s4");
  EXPECT_EQ(r.removed[1].student, "s3");
  EXPECT_EQ(degree(r, "s1"), 2);
  EXPECT_EQ(degree(r, "s2"), 2);
}

TEST(Phase2Test, SuggestionsUseLeftoverCapacity) {
  const FieldCatalog catalog({"X"});
  const std::vector<StudentRecord> students{student("s1", {"X"}), student("s2", {"X"})};
  // Capacity 5 -> main quota 4; capacity 2 stays 2.
  const std::vector<AdvisorRecord> advisors{advisor("a1", {"X"}, 5), advisor("a2", {"X"}, 2),
                                            advisor("a3", {"X"}, 3)};
  ScoreTable scores;
  for (const char* a : {"a1", "a2", "a3"}) {
    for (const char* s : {"s1", "s2"}) scores.set(a, s, 1);
  }
  const auto r = run_phase2(catalog, students, advisors, scores, {});
  EXPECT_EQ(r.matching.size(), 6u);
  ASSERT_TRUE(r.suggestion_market);
  EXPECT_EQ(r.suggestions.size(), 0u);
  const auto quotas = r.market.agents(Side::Receiving);
  EXPECT_EQ(quotas[0].quota, 4);
  EXPECT_EQ(quotas[1].quota, 2);
  EXPECT_EQ(quotas[2].quota, 2);
}

TEST(Phase2Test, SuggestionsNeverRepeatMainPairs) {
  const FieldCatalog catalog({"X"});
  std::vector<StudentRecord> students;
  for (int i = 1; i <= 6; ++i) students.push_back(student("s" + std::to_string(i), {"X"}));
  const std::vector<AdvisorRecord> advisors{advisor("a1", {"X"}, 5), advisor("a2", {"X"}, 5),
                                            advisor("a3", {"X"}, 5)};
  ScoreTable scores;
  for (const char* a : {"a1", "a2", "a3"}) {
    for (int i = 1; i <= 6; ++i) scores.set(a, "s" + std::to_string(i), 1 + i % 4);
  }
  const auto r = run_phase2(catalog, students, advisors, scores, {});
  ASSERT_TRUE(r.suggestion_market);
  const auto& sm = *r.suggestion_market;
  for (const Pair& p : r.suggestions.pairs()) {
    const auto s = sm.key_of(Side::Proposing, p.proposer);
    const auto a = sm.key_of(Side::Receiving, p.receiver);
    EXPECT_FALSE(r.matching.contains({r.market.require(s).index, r.market.require(a).index}));
  }
  // Every main-round survivor has 2-3 interviews in total across both rounds.
  for (const auto& a : r.market.agents(Side::Proposing)) {
    const int main = degree(r, a.id);
    const auto extra = sm.find(a.id) ? r.suggestions.partners(*sm.find(a.id)).size() : 0u;
    EXPECT_LE(main + static_cast<int>(extra), 3);
  }
}

TEST(Phase3Test, EveryoneGetsFirstChoice) {
  const std::vector<StudentRecord> students{student("s1", {}, {{"a1"}, {"a2"}}),
                                            student("s2", {}, {{"a2"}, {"a1"}})};
  const std::vector<AdvisorRecord> advisors{advisor("a1", {}, 0, 1), advisor("a2", {}, 0, 1)};
  ScoreTable scores;
  for (const char* a : {"a1", "a2"}) {
    scores.set(a, "s1", 2);
    scores.set(a, "s2", 2);
  }
  const auto r = run_phase3(students, advisors, scores, {});
  EXPECT_EQ(r.matching, pairs_of(r.market, {{"s1", "a1"}, {"s2", "a2"}}));
  EXPECT_EQ(r.rank_distributions.at("proposers"), (RankHistogram{{1, 1, 2}}));
}

TEST(Phase3Test, StrictInstanceRunsIdentical) {
  const std::vector<StudentRecord> students{student("s1", {}, {{"a1"}, {"a2"}}),
                                            student("s2", {}, {{"a1"}}),
                                            student("s3", {}, {{"a2"}, {"a1"}})};
  const std::vector<AdvisorRecord> advisors{advisor("a1", {}, 0, 1), advisor("a2", {}, 0, 2)};
  ScoreTable scores;
  scores.set("a1", "s1", 2);
  scores.set("a1", "s2", 1);
  scores.set("a1", "s3", 3);
  scores.set("a2", "s1", 4);
  scores.set("a2", "s3", 1);
  const auto r = run_phase3(students, advisors, scores, {});
  ASSERT_EQ(r.runs.size(), 10u);
  for (const auto& run : r.runs) EXPECT_EQ(run.matching, r.runs[0].matching);
  EXPECT_TRUE(r.runs[0].accepted);
}

TEST(Phase3Test, PicksRunWithMostPairs) {
  const std::vector<StudentRecord> students{student("s1", {}, {{"A"}}), student("s2", {}, {{"A"}, {"B"}})};
  const std::vector<AdvisorRecord> advisors{advisor("A", {}, 0, 1), advisor("B", {}, 0, 1),
                                            advisor("C", {}, 0, 0)};
  ScoreTable scores;
  scores.set("A", "s1", 1);
  scores.set("A", "s2", 1);
  scores.set("B", "s2", 1);
  scores.set("C", "s1", 5);
  const auto r = run_phase3(students, advisors, scores, {});
  std::size_t most = 0, fewest = SIZE_MAX;
  for (const auto& run : r.runs) {
    most = std::max(most, run.pairs);
    fewest = std::min(fewest, run.pairs);
  }
  EXPECT_EQ(most, 2u);
  EXPECT_EQ(fewest, 1u);
  EXPECT_EQ(r.matching.size(), 2u);
  // Earliest run reaching the maximum is the one kept.
  for (const auto& run : r.runs) {
    if (run.pairs == 2) {
      EXPECT_TRUE(run.accepted);
      EXPECT_EQ(run.seed, *r.accepted_seed);
      break;
    }
  }
}

TEST(Phase3Test, RejectsStudentTies) {
  const std::vector<StudentRecord> students{student("s1", {}, {{"a1", "a2"}})};
  const std::vector<AdvisorRecord> advisors{advisor("a1", {}, 0, 1), advisor("a2", {}, 0, 1)};
  try {
    run_phase3(students, advisors, {}, {});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.code(), "student_ties");
  }
}

TEST(Phase3Property, StableForTieBrokenPreferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    io::SynthSizes sizes;
    sizes.students = 80;
    sizes.advisors = 20;
    sizes.hiring_score_density = 0.3;
    const auto b = io::synth(sizes, seed);
    Phase3Config config;
    config.seed = TieBreakSeed{seed};
    const auto r = run_phase3(b.students, b.advisors, b.hiring_scores, config);
    EXPECT_TRUE(is_valid(r.market, r.matching));
    EXPECT_TRUE(is_stable(r.market, r.matching));
    // Rebuild the market of the selected run and check it there too.
    MarketSpec spec;
    spec.proposers = r.market.agents(Side::Proposing);
    spec.receivers = r.market.agents(Side::Receiving);
    for (AgentIndex i = 0; i < r.market.size(Side::Proposing); ++i) {
      const auto list = r.market.preference_list({Side::Proposing, i});
      spec.preferences[list.owner] = list.classes;
    }
    for (const auto& a : spec.receivers) {
      spec.preferences[a.id] =
          build_phase3_advisor_prefs(a.id, b.hiring_scores, b.hiring_scores, TieBreakSeed{*r.accepted_seed}).classes;
    }
    for (auto& [owner, classes] : spec.preferences) {
      std::erase_if(classes, [&](const IndifferenceClass& c) { return !r.market.find(c.front()); });
    }
    const auto strict = PolyMarket::from_spec(spec);
    const auto& runs = r.runs;
    const auto kept = std::find_if(runs.begin(), runs.end(), [](const RunRecord& x) { return x.accepted; });
    ASSERT_NE(kept, runs.end());
    EXPECT_EQ(*kept->matching, r.matching);
    const auto matching = poly_gs(strict, TieBreakSeed{*r.accepted_seed}).matching;
    EXPECT_EQ(matching, r.matching);
    EXPECT_TRUE(find_blocking_pairs(strict, r.matching).empty());
  }
}
