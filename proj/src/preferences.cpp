#include "polymatch/preferences.hpp"

#include <algorithm>
#include <tuple>

#include "polymatch/errors.hpp"

namespace polymatch {

FieldCatalog::FieldCatalog(std::vector<std::string> names, std::string version)
    : names_(std::move(names)), version_(std::move(version)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) {
      throw InputError("duplicate_field", "field '" + names_[i] + "' appears twice in the catalog");
    }
  }
}

std::optional<std::size_t> FieldCatalog::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FieldVector FieldCatalog::encode(std::span<const std::string> fields) const {
  FieldVector v{std::vector<std::uint8_t>(names_.size(), 0)};
  for (const auto& f : fields) {
    auto i = index_of(f);
    if (!i) throw InputError("unknown_field", "research field '" + f + "' is not in the catalog");
    v.bits[*i] = 1;
  }
  return v;
}

std::size_t FieldVector::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

int similarity_score(const FieldVector& a, const FieldVector& b) {
  if (a.bits.size() != b.bits.size()) {
    throw InputError("field_length", "field vectors have lengths " + std::to_string(a.bits.size()) +
                                         " and " + std::to_string(b.bits.size()));
  }
  int s = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) s += a.bits[i] * b.bits[i];
  return s;
}

bool ResearchProfile::lists(const std::string& other) const {
  return std::any_of(listed.begin(), listed.end(), [&](const auto& group) {
    return std::find(group.begin(), group.end(), other) != group.end();
  });
}

void ScoreTable::set(const std::string& advisor, const std::string& student, int score) {
  if (score < 1 || score > 6) {
    throw InputError("score_range", "score " + std::to_string(score) + " given by '" + advisor +
                                        "' to '" + student + "' is outside 1..6");
  }
  scores_[{advisor, student}] = score;
}

std::optional<int> ScoreTable::get(const std::string& advisor, const std::string& student) const {
  auto it = scores_.find({advisor, student});
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, int>> ScoreTable::by_advisor(const std::string& advisor) const {
  std::vector<std::pair<std::string, int>> out;
  for (auto it = scores_.lower_bound({advisor, std::string()});
       it != scores_.end() && it->first.first == advisor; ++it) {
    out.emplace_back(it->first.second, it->second);
  }
  return out;
}

std::vector<int> ScoreTable::by_student(const std::string& student) const {
  std::vector<int> out;
  for (const auto& [key, score] : scores_) {
    if (key.second == student) out.push_back(score);
  }
  return out;
}

namespace {

// Groups ids sharing a key into classes ordered by ascending key; members
// sorted by id.
template <typename Key>
std::vector<IndifferenceClass> group_by_key(std::vector<std::pair<Key, std::string>> keyed) {
  std::sort(keyed.begin(), keyed.end());
  std::vector<IndifferenceClass> out;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) out.emplace_back();
    out.back().push_back(keyed[i].second);
  }
  return out;
}

}  // namespace

std::vector<IndifferenceClass> group_by_similarity(const FieldVector& owner,
                                                   std::span<const ResearchProfile> others) {
  std::vector<std::pair<int, std::string>> keyed;
  keyed.reserve(others.size());
  for (const auto& p : others) keyed.emplace_back(-similarity_score(owner, p.fields), p.id);
  return group_by_key(std::move(keyed));
}

std::vector<IndifferenceClass> merge_listed(const RankedGroups& listed,
                                            const std::vector<IndifferenceClass>& by_overlap) {
  std::vector<IndifferenceClass> out;
  std::set<std::string> seen;
  for (const auto& group : listed) {
    if (group.empty()) continue;
    for (const auto& id : group) {
      if (!seen.insert(id).second) {
        throw InputError("duplicate_listing", "'" + id + "' is listed more than once");
      }
    }
    out.push_back(group);
  }
  for (const auto& cls : by_overlap) {
    IndifferenceClass rest;
    for (const auto& id : cls) {
      if (!seen.contains(id)) rest.push_back(id);
    }
    if (!rest.empty()) out.push_back(std::move(rest));
  }
  return out;
}

PreferenceList build_student_prefs(const ResearchProfile& student,
                                   std::span<const ResearchProfile> advisors) {
  std::set<std::string> known;
  for (const auto& a : advisors) known.insert(a.id);
  for (const auto& group : student.listed) {
    for (const auto& id : group) {
      if (!known.contains(id)) {
        throw InputError("unknown_agent",
                         "student '" + student.id + "' lists unknown advisor '" + id + "'");
      }
    }
  }
  return {student.id, merge_listed(student.listed, group_by_similarity(student.fields, advisors))};
}

PreferenceList refine_advisor_ties(const PreferenceList& prefs,
                                   const std::set<std::string>& listers) {
  PreferenceList out{prefs.owner, {}};
  for (const auto& cls : prefs.classes) {
    IndifferenceClass in, rest;
    for (const auto& id : cls) (listers.contains(id) ? in : rest).push_back(id);
    if (!in.empty()) out.classes.push_back(std::move(in));
    if (!rest.empty()) out.classes.push_back(std::move(rest));
  }
  return out;
}

PreferenceList build_evaluator_prefs(const ResearchProfile& professor,
                                     std::span<const ResearchProfile> students,
                                     const std::string& evaluator_id) {
  std::set<std::string> listers;
  for (const auto& s : students) {
    if (s.lists(professor.id)) listers.insert(s.id);
  }
  return refine_advisor_ties({evaluator_id, group_by_similarity(professor.fields, students)},
                             listers);
}

PreferenceList build_phase2_advisor_prefs(const ResearchProfile& advisor, const ScoreTable& scores,
                                          std::span<const ResearchProfile> students) {
  std::vector<std::pair<std::pair<int, int>, std::string>> keyed;
  for (const auto& s : students) {
    const auto score = scores.get(advisor.id, s.id);
    if (!score || *score > 4) continue;
    keyed.push_back({{*score, -similarity_score(advisor.fields, s.fields)}, s.id});
  }
  return {advisor.id, group_by_key(std::move(keyed))};
}

PreferenceList build_phase3_advisor_prefs(const std::string& advisor, const ScoreTable& scores,
                                          const ScoreTable& global, TieBreakSeed seed) {
  using Entry = std::tuple<int, int, std::string>;  // score, -non-6 count, id
  std::map<std::string, int> non6;
  for (const auto& [key, score] : global.entries()) {
    if (score != 6) ++non6[key.second];
  }
  std::vector<Entry> entries;
  for (const auto& [student, score] : scores.by_advisor(advisor)) {
    if (score > 4) continue;
    entries.emplace_back(score, -non6[student], student);
  }
  std::sort(entries.begin(), entries.end());

  Rng rng(combine_seed(seed.value, stable_hash(advisor)));
  for (std::size_t begin = 0; begin < entries.size();) {
    std::size_t end = begin + 1;
    while (end < entries.size() && std::get<0>(entries[end]) == std::get<0>(entries[begin]) &&
           std::get<1>(entries[end]) == std::get<1>(entries[begin])) {
      ++end;
    }
    rng.shuffle(std::span<Entry>(entries.data() + begin, end - begin));
    begin = end;
  }

  PreferenceList out{advisor, {}};
  for (const auto& e : entries) out.classes.push_back({std::get<2>(e)});
  return out;
}

PreferenceList without(const PreferenceList& prefs, const std::set<std::string>& removed) {
  PreferenceList out{prefs.owner, {}};
  for (const auto& cls : prefs.classes) {
    IndifferenceClass kept;
    for (const auto& id : cls) {
      if (!removed.contains(id)) kept.push_back(id);
    }
    if (!kept.empty()) out.classes.push_back(std::move(kept));
  }
  return out;
}

}  // namespace polymatch
