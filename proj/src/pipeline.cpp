#include "polymatch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "polymatch/errors.hpp"
#include "polymatch/poly_gs.hpp"
#include "polymatch/preferences.hpp"

namespace polymatch::pipeline {

namespace {

// Builds a market from key-based lists, dropping entries that name agents
// not taking part (removed students, advisors without capacity).
PolyMarket assemble(std::vector<Agent> proposers, std::vector<Agent> receivers,
                    const std::vector<PreferenceList>& lists) {
  std::unordered_set<std::string> proposer_ids, receiver_ids;
  for (const auto& a : proposers) proposer_ids.insert(a.id);
  for (const auto& a : receivers) receiver_ids.insert(a.id);

  MarketSpec spec{std::move(proposers), std::move(receivers), {}};
  for (const auto& list : lists) {
    const bool is_proposer = proposer_ids.contains(list.owner);
    if (!is_proposer && !receiver_ids.contains(list.owner)) continue;
    const auto& others = is_proposer ? receiver_ids : proposer_ids;
    std::vector<IndifferenceClass> classes;
    for (const auto& cls : list.classes) {
      IndifferenceClass kept;
      for (const auto& id : cls) {
        if (others.contains(id)) kept.push_back(id);
      }
      if (!kept.empty()) classes.push_back(std::move(kept));
    }
    spec.preferences[list.owner] = std::move(classes);
  }
  return PolyMarket::from_spec(spec);
}

std::vector<int> degrees(const PolyMarket& market, const Matching& matching, Side side) {
  std::vector<int> out(market.size(side), 0);
  for (const Pair& p : matching.pairs()) {
    ++out[side == Side::Proposing ? p.proposer : p.receiver];
  }
  return out;
}

int max_quota(const PolyMarket& market, Side side) {
  int q = 0;
  for (const Agent& a : market.agents(side)) q = std::max(q, a.quota);
  return q;
}

std::vector<FillStat> fill_stats(const PolyMarket& market, const Matching& matching) {
  const auto deg = degrees(market, matching, Side::Receiving);
  std::vector<FillStat> out;
  for (AgentIndex i = 0; i < market.size(Side::Receiving); ++i) {
    const Agent& a = market.agent({Side::Receiving, i});
    out.push_back({a.id, a.quota, deg[i]});
  }
  return out;
}

void add_distributions(PhaseReport& report, int proposer_positions) {
  report.rank_distributions["proposers"] =
      rank_distribution(report.matching, report.market, Side::Proposing, proposer_positions);
  report.rank_distributions["receivers"] =
      rank_distribution(report.matching, report.market, Side::Receiving,
                        max_quota(report.market, Side::Receiving));
  report.fill = fill_stats(report.market, report.matching);
}

std::vector<ResearchProfile> student_profiles(const FieldCatalog& catalog,
                                              std::span<const StudentRecord> students) {
  std::vector<ResearchProfile> out;
  out.reserve(students.size());
  for (const auto& s : students) out.push_back({s.id, catalog.encode(s.fields), s.ranked_advisors});
  return out;
}

std::vector<ResearchProfile> advisor_profiles(const FieldCatalog& catalog,
                                              std::span<const AdvisorRecord> advisors) {
  std::vector<ResearchProfile> out;
  out.reserve(advisors.size());
  for (const auto& a : advisors) out.push_back({a.id, catalog.encode(a.fields), {}});
  return out;
}

template <typename T>
std::vector<T> select(const std::vector<T>& items, const std::vector<bool>& keep) {
  std::vector<T> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (keep[i]) out.push_back(items[i]);
  }
  return out;
}

std::size_t count_active(const std::vector<bool>& active) {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

}  // namespace

int evaluator_quota(std::size_t num_students, std::size_t num_advisors, int student_quota) {
  if (num_advisors == 0) throw InputError("no_advisors", "evaluator quota needs at least one advisor");
  const auto seats = static_cast<std::size_t>(student_quota) * num_students;
  return std::max(1, static_cast<int>((seats + num_advisors - 1) / num_advisors));
}

long long removal_bound(int student_quota, int min_matches, std::size_t num_students,
                        std::size_t num_evaluators) {
  if (student_quota < min_matches || min_matches < 1 || num_evaluators == 0) {
    throw InputError("removal_bound", "removal bound needs q_s >= q_min >= 1 and evaluators");
  }
  // (q_min - 1)(|S|/|E| + 1/q_s) = (q_min - 1)(|S| q_s + |E|) / (|E| q_s)
  const auto q = static_cast<long long>(student_quota);
  const auto e = static_cast<long long>(num_evaluators);
  const auto numerator = (min_matches - 1LL) * (static_cast<long long>(num_students) * q + e);
  return numerator / (e * q) + 1;
}

int interview_quota(int capacity, const Phase2Config& config) {
  if (capacity < config.small_capacity_floor) return capacity;
  return static_cast<int>(std::floor(config.capacity_fraction * capacity + 1e-9));
}

bool is_protected(std::span<const int> scores) {
  const auto ones = std::count(scores.begin(), scores.end(), 1);
  const auto fives = std::count(scores.begin(), scores.end(), 5);
  return ones >= 2 || (ones >= 1 && fives >= 1);
}

double average_score(std::span<const int> scores) {
  if (scores.empty()) return std::numeric_limits<double>::infinity();
  double sum = 0;
  for (int s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

RankHistogram rank_distribution(const Matching& matching, const PolyMarket& market, Side side,
                                int positions) {
  std::map<std::pair<int, int>, int> counts;
  for (AgentIndex i = 0; i < market.size(side); ++i) {
    const AgentRef ref{side, i};
    const auto ranked = ranked_partners(market, matching, ref);
    for (int pos = 1; pos <= positions; ++pos) {
      int rank = -1;
      const auto slot = static_cast<std::size_t>(pos - 1);
      if (slot < ranked.size() && ranked[slot] != kSelf) {
        const std::size_t r = market.rank(ref, ranked[slot]);
        rank = r < market.self_rank(ref) ? static_cast<int>(r) + 1 : 0;
      }
      ++counts[{pos, rank}];
    }
  }
  RankHistogram out;
  for (const auto& [key, count] : counts) out.push_back({key.first, key.second, count});
  return out;
}

PhaseReport run_phase1(const FieldCatalog& catalog, std::span<const StudentRecord> students,
                       std::span<const AdvisorRecord> advisors, const Phase1Config& config) {
  if (advisors.empty()) throw InputError("no_advisors", "pre-screening needs at least one advisor");
  if (config.student_quota < config.min_matches || config.min_matches < 1 ||
      config.tiebreak_retries < 1) {
    throw InputError("config", "pre-screening needs student_quota >= min_matches >= 1 and retries >= 1");
  }
  const auto students_p = student_profiles(catalog, students);
  const auto advisors_p = advisor_profiles(catalog, advisors);
  const int q_e = config.evaluator_quota.value_or(
      evaluator_quota(students.size(), advisors.size(), config.student_quota));

  std::unordered_map<std::string, std::string> evaluator_of;
  std::vector<Agent> evaluators;
  for (const auto& a : advisors) {
    if (a.evaluator_id.empty()) {
      throw InputError("missing_evaluator", "advisor '" + a.id + "' has no evaluator");
    }
    evaluator_of[a.id] = a.evaluator_id;
    evaluators.push_back({a.evaluator_id, q_e});
  }

  // Student lists name professors; the market is over their evaluators.
  std::vector<PreferenceList> student_lists;
  for (const auto& s : students_p) {
    PreferenceList list = build_student_prefs(s, advisors_p);
    for (auto& cls : list.classes) {
      for (auto& id : cls) id = evaluator_of.at(id);
    }
    student_lists.push_back(std::move(list));
  }

  PhaseReport report;
  report.phase = 1;
  report.seed = config.seed;
  std::vector<bool> active(students.size(), true);
  std::uint64_t counter = 0;

  while (true) {
    ++report.iterations;
    const auto active_p = select(students_p, active);
    std::vector<Agent> proposers;
    std::vector<PreferenceList> lists = select(student_lists, active);
    for (const auto& s : active_p) proposers.push_back({s.id, config.student_quota});
    for (std::size_t j = 0; j < advisors.size(); ++j) {
      lists.push_back(build_evaluator_prefs(advisors_p[j], active_p, advisors[j].evaluator_id));
    }
    PolyMarket market = assemble(std::move(proposers), evaluators, lists);

    std::optional<std::pair<std::size_t, Matching>> best;
    for (int attempt = 0; attempt < config.tiebreak_retries; ++attempt) {
      const TieBreakSeed seed = derive_seed(config.seed, ++counter);
      GsResult result = poly_gs(market, seed);
      const auto deg = degrees(market, result.matching, Side::Proposing);
      const auto insufficient = static_cast<std::size_t>(
          std::count_if(deg.begin(), deg.end(), [&](int d) { return d < config.min_matches; }));
      report.runs.push_back({report.iterations, seed.value, result.matching.size(), insufficient,
                             insufficient == 0, std::nullopt});
      if (insufficient == 0) {
        report.accepted_seed = seed.value;
        report.market = std::move(market);
        report.matching = std::move(result.matching);
        report.removals_per_iteration.push_back(0);
        add_distributions(report, config.student_quota);
        return report;
      }
      if (!best || insufficient < best->first) best.emplace(insufficient, std::move(result.matching));
    }

    // Drop the short students of the least-bad attempt, fewest matches first.
    const auto deg = degrees(market, best->second, Side::Proposing);
    std::vector<std::pair<int, AgentIndex>> short_list;
    for (AgentIndex i = 0; i < deg.size(); ++i) {
      if (deg[i] < config.min_matches) short_list.emplace_back(deg[i], i);
    }
    std::sort(short_list.begin(), short_list.end());
    const std::size_t batch = std::min(short_list.size(), config.removal_batch.value_or(short_list.size()));

    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < students.size(); ++i) position[students[i].id] = i;
    for (std::size_t k = 0; k < batch; ++k) {
      const auto& id = market.key_of(Side::Proposing, short_list[k].second);
      active[position.at(id)] = false;
      report.removed.push_back({id,
                                "matched to " + std::to_string(short_list[k].first) + " of " +
                                    std::to_string(config.min_matches) + " required evaluators",
                                report.iterations});
    }
    report.removals_per_iteration.push_back(batch);
    if (count_active(active) == 0) {
      throw InfeasibleError("pre-screening removed every student; no evaluator assignment exists");
    }
  }
}

PhaseReport run_phase2(const FieldCatalog& catalog, std::span<const StudentRecord> students,
                       std::span<const AdvisorRecord> advisors, const ScoreTable& scores,
                       const Phase2Config& config, std::span<const GradeRecord> prescreen_grades) {
  if (config.student_max < config.student_min || config.student_min < 0 || config.removal_batch == 0) {
    throw InputError("config", "interview round needs student_max >= student_min and a positive batch");
  }
  const auto students_p = student_profiles(catalog, students);
  const auto advisors_p = advisor_profiles(catalog, advisors);

  std::map<std::string, std::vector<int>> received;
  for (const auto& [key, score] : scores.entries()) received[key.second].push_back(score);

  std::vector<Agent> receivers;
  std::vector<ResearchProfile> interviewing;
  std::map<std::string, int> capacity;
  for (std::size_t j = 0; j < advisors.size(); ++j) {
    if (advisors[j].interview_capacity < 1) continue;
    const int q = interview_quota(advisors[j].interview_capacity, config);
    if (q < 1) continue;
    receivers.push_back({advisors[j].id, q});
    interviewing.push_back(advisors_p[j]);
    capacity[advisors[j].id] = advisors[j].interview_capacity;
  }

  std::vector<PreferenceList> student_lists;
  for (const auto& s : students_p) student_lists.push_back(build_student_prefs(s, advisors_p));

  PhaseReport report;
  report.phase = 2;
  report.seed = config.seed;
  report.prescreen_grades.assign(prescreen_grades.begin(), prescreen_grades.end());
  std::vector<bool> active(students.size(), true);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < students.size(); ++i) position[students[i].id] = i;

  auto advisor_lists = [&](const std::vector<ResearchProfile>& pool) {
    std::vector<PreferenceList> lists;
    for (const auto& a : interviewing) lists.push_back(build_phase2_advisor_prefs(a, scores, pool));
    return lists;
  };

  while (true) {
    ++report.iterations;
    const auto active_p = select(students_p, active);
    std::vector<Agent> proposers;
    for (const auto& s : active_p) proposers.push_back({s.id, config.student_max});
    auto lists = select(student_lists, active);
    for (auto& l : advisor_lists(active_p)) lists.push_back(std::move(l));
    PolyMarket market = assemble(std::move(proposers), receivers, lists);

    const TieBreakSeed seed = derive_seed(config.seed, static_cast<std::uint64_t>(report.iterations));
    GsResult result = poly_gs(market, seed);
    for (const Pair& p : result.matching.pairs()) {
      const auto score = scores.get(market.key_of(Side::Receiving, p.receiver),
                                    market.key_of(Side::Proposing, p.proposer));
      if (!score || *score > 4) {
        throw std::logic_error("interview matching paired an advisor with a student they did not score 1-4");
      }
    }

    const auto deg = degrees(market, result.matching, Side::Proposing);
    std::vector<std::pair<double, std::string>> removable;
    std::size_t insufficient = 0;
    for (AgentIndex i = 0; i < deg.size(); ++i) {
      if (deg[i] >= config.student_min) continue;
      ++insufficient;
      const auto& id = market.key_of(Side::Proposing, i);
      const auto& mine = received[id];
      if (is_protected(mine)) continue;
      removable.emplace_back(-average_score(mine), id);
    }
    report.runs.push_back({report.iterations, seed.value, result.matching.size(), insufficient,
                           removable.empty(), std::nullopt});
    if (removable.empty()) {
      report.accepted_seed = seed.value;
      report.market = std::move(market);
      report.matching = std::move(result.matching);
      report.removals_per_iteration.push_back(0);
      break;
    }

    // Worst average score first.
    std::sort(removable.begin(), removable.end());
    const std::size_t batch = std::min(removable.size(), config.removal_batch);
    for (std::size_t k = 0; k < batch; ++k) {
      const auto& id = removable[k].second;
      active[position.at(id)] = false;
      const auto d = deg[market.require(id).index];
      report.removed.push_back({id,
                                "matched to " + std::to_string(d) + " of " +
                                    std::to_string(config.student_min) + " required interviews",
                                report.iterations});
    }
    report.removals_per_iteration.push_back(batch);
    if (count_active(active) == 0) {
      throw InfeasibleError("interview round removed every student");
    }
  }
  add_distributions(report, config.student_max);

  // Second round on the leftover quota, including the withheld share of
  // each capacity. Pairs from the main round cannot repeat; nobody is removed.
  const auto& main = report.market;
  const auto student_deg = degrees(main, report.matching, Side::Proposing);
  const auto advisor_deg = degrees(main, report.matching, Side::Receiving);
  std::map<std::string, std::set<std::string>> matched_with;
  for (const Pair& p : report.matching.pairs()) {
    const auto s = main.key_of(Side::Proposing, p.proposer);
    const auto a = main.key_of(Side::Receiving, p.receiver);
    matched_with[s].insert(a);
    matched_with[a].insert(s);
  }
  std::vector<Agent> proposers, extra_receivers;
  for (AgentIndex i = 0; i < main.size(Side::Proposing); ++i) {
    const int left = config.student_max - student_deg[i];
    if (left > 0) proposers.push_back({main.key_of(Side::Proposing, i), left});
  }
  for (AgentIndex j = 0; j < main.size(Side::Receiving); ++j) {
    const auto& id = main.key_of(Side::Receiving, j);
    const int left = capacity.at(id) - advisor_deg[j];
    if (left > 0) extra_receivers.push_back({id, left});
  }
  std::vector<PreferenceList> lists;
  const auto survivors = select(students_p, active);
  for (const auto& l : select(student_lists, active)) lists.push_back(without(l, matched_with[l.owner]));
  for (const auto& l : advisor_lists(survivors)) lists.push_back(without(l, matched_with[l.owner]));
  PolyMarket extra = assemble(std::move(proposers), std::move(extra_receivers), lists);
  const TieBreakSeed extra_seed =
      derive_seed(config.seed, static_cast<std::uint64_t>(report.iterations) + 1);
  report.suggestions = poly_gs(extra, extra_seed).matching;
  report.suggestion_market = std::move(extra);
  return report;
}

PhaseReport run_phase3(std::span<const StudentRecord> students,
                       std::span<const AdvisorRecord> advisors, const ScoreTable& scores,
                       const Phase3Config& config) {
  if (config.reruns < 1) throw InputError("config", "hiring round needs at least one run");
  PhaseReport report;
  report.phase = 3;
  report.seed = config.seed;

  std::vector<Agent> receivers;
  for (const auto& a : advisors) {
    if (a.hiring_capacity >= 1) receivers.push_back({a.id, a.hiring_capacity});
  }
  std::unordered_set<std::string> hiring;
  for (const auto& r : receivers) hiring.insert(r.id);
  std::unordered_set<std::string> student_ids;
  for (const auto& s : students) student_ids.insert(s.id);

  std::vector<Agent> proposers;
  std::vector<PreferenceList> student_lists;
  for (const auto& s : students) {
    PreferenceList list{s.id, {}};
    for (const auto& group : s.ranked_advisors) {
      if (group.size() > 1) {
        throw InputError("student_ties", "student '" + s.id + "' ranks advisors with ties; hiring "
                                                              "preferences of students must be strict");
      }
      if (group.empty()) continue;
      if (!hiring.contains(group.front())) {
        report.warnings.push_back("student '" + s.id + "' ranks '" + group.front() +
                                  "', who has no hiring capacity");
        continue;
      }
      list.classes.push_back(group);
    }
    if (list.classes.empty()) {
      report.warnings.push_back("student '" + s.id + "' has no acceptable advisor and stays unmatched");
    }
    proposers.push_back({s.id, 1});
    student_lists.push_back(std::move(list));
  }

  // Untie-broken lists (classes by score) for reporting ranks.
  std::vector<PreferenceList> original = student_lists;
  for (const auto& r : receivers) {
    std::vector<std::pair<int, std::string>> keyed;
    for (const auto& [student, score] : scores.by_advisor(r.id)) {
      if (score <= 4 && student_ids.contains(student)) keyed.emplace_back(score, student);
    }
    std::sort(keyed.begin(), keyed.end());
    PreferenceList list{r.id, {}};
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      if (i == 0 || keyed[i].first != keyed[i - 1].first) list.classes.emplace_back();
      list.classes.back().push_back(keyed[i].second);
    }
    original.push_back(std::move(list));
  }

  std::optional<Matching> best;
  std::size_t best_run = 0;
  for (int k = 1; k <= config.reruns; ++k) {
    const TieBreakSeed seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
    std::vector<PreferenceList> lists = student_lists;
    for (const auto& r : receivers) {
      lists.push_back(build_phase3_advisor_prefs(r.id, scores, scores, seed));
    }
    const PolyMarket market = assemble(proposers, receivers, lists);
    GsResult result = poly_gs(market, seed);
    report.runs.push_back({k, seed.value, result.matching.size(), 0, false, result.matching});
    if (!best || result.matching.size() > best->size()) {
      best = std::move(result.matching);
      best_run = report.runs.size() - 1;
    }
  }
  report.runs[best_run].accepted = true;
  report.accepted_seed = report.runs[best_run].seed;
  report.iterations = config.reruns;
  report.market = assemble(std::move(proposers), std::move(receivers), original);
  report.matching = std::move(*best);
  report.removals_per_iteration.assign(static_cast<std::size_t>(config.reruns), 0);
  add_distributions(report, 1);
  return report;
}

}  // namespace polymatch::pipeline
