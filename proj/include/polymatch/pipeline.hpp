#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polymatch/market.hpp"
#include "polymatch/records.hpp"
#include "polymatch/seed.hpp"

// The three selection rounds: pre-screening (students x evaluators),
// interviews and hiring (students x advisors). Students always propose.
namespace polymatch::pipeline {

struct Phase1Config {
  int student_quota = 3;
  int min_matches = 3;
  int tiebreak_retries = 10;
  // Students dropped per failed iteration; unset removes every
  // insufficiently matched student.
  std::optional<std::size_t> removal_batch;
  // Overrides the ceil(q_s |S| / |A|) evaluator quota.
  std::optional<int> evaluator_quota;
  TieBreakSeed seed;
};

struct Phase2Config {
  int student_max = 3;
  int student_min = 2;
  double capacity_fraction = 0.80;
  // Interview capacities below this are used unreduced.
  int small_capacity_floor = 3;
  std::size_t removal_batch = 20;
  TieBreakSeed seed;
};

struct Phase3Config {
  int reruns = 10;
  TieBreakSeed seed;
};

struct Removal {
  std::string student;
  std::string reason;
  int iteration = 0;
};

// One poly_gs execution inside a phase.
struct RunRecord {
  int iteration = 0;
  std::uint64_t seed = 0;
  std::size_t pairs = 0;
  std::size_t insufficient = 0;  // students below the phase minimum
  bool accepted = false;
  // Hiring round only, so reruns can be compared.
  std::optional<Matching> matching;
};

// Position is 1-based (best partner first). Rank is the 1-based class index
// in the agent's untie-broken list; -1 marks an unfilled position and 0 a
// partner the agent never listed.
struct RankCount {
  int position = 0;
  int rank = 0;
  int count = 0;

  friend bool operator==(const RankCount&, const RankCount&) = default;
};
using RankHistogram = std::vector<RankCount>;

struct FillStat {
  std::string agent;
  int quota = 0;
  int matched = 0;
};

struct PhaseReport {
  int phase = 0;
  TieBreakSeed seed;
  PolyMarket market;  // survivors, original (untie-broken) preferences
  Matching matching;
  std::optional<std::uint64_t> accepted_seed;
  int iterations = 0;
  std::vector<RunRecord> runs;
  std::vector<Removal> removed;
  std::vector<std::size_t> removals_per_iteration;
  std::map<std::string, RankHistogram> rank_distributions;  // "proposers", "receivers"
  std::vector<FillStat> fill;
  std::vector<std::string> warnings;

  // Interview round only: optional extra interviews from the leftover quota.
  std::optional<PolyMarket> suggestion_market;
  Matching suggestions;
  std::vector<GradeRecord> prescreen_grades;
};

// ceil(q_s |S| / |A|), at least 1. Throws InputError with no advisors.
int evaluator_quota(std::size_t num_students, std::size_t num_advisors, int student_quota);

// Largest number of students the pre-screening loop can remove:
// floor((q_min - 1)(|S|/|E| + 1/q_s) + 1), evaluated exactly.
long long removal_bound(int student_quota, int min_matches, std::size_t num_students,
                        std::size_t num_evaluators);

// Main-round interview quota: floor(fraction * capacity), or the capacity
// itself when it is below the floor.
int interview_quota(int capacity, const Phase2Config& config);

// At least one 1 and one 5, or at least two 1s.
bool is_protected(std::span<const int> scores);

// Mean of all numeric scores; students nobody scored come out as +inf.
double average_score(std::span<const int> scores);

RankHistogram rank_distribution(const Matching& matching, const PolyMarket& market, Side side,
                                int positions);

// Throws InfeasibleError when every student gets removed.
PhaseReport run_phase1(const FieldCatalog& catalog, std::span<const StudentRecord> students,
                       std::span<const AdvisorRecord> advisors, const Phase1Config& config);

PhaseReport run_phase2(const FieldCatalog& catalog, std::span<const StudentRecord> students,
                       std::span<const AdvisorRecord> advisors, const ScoreTable& scores,
                       const Phase2Config& config,
                       std::span<const GradeRecord> prescreen_grades = {});

PhaseReport run_phase3(std::span<const StudentRecord> students,
                       std::span<const AdvisorRecord> advisors, const ScoreTable& scores,
                       const Phase3Config& config);

}  // namespace polymatch::pipeline
