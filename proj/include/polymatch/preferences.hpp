#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polymatch/market.hpp"
#include "polymatch/seed.hpp"

namespace polymatch {

// Multi-one-hot encoding of an agent's research fields.
struct FieldVector {
  std::vector<std::uint8_t> bits;

  std::size_t count() const;
  friend bool operator==(const FieldVector&, const FieldVector&) = default;
};

// Ordered list of research field names. Position i is bit i of every
// FieldVector built from it.
class FieldCatalog {
 public:
  FieldCatalog() = default;
  explicit FieldCatalog(std::vector<std::string> names, std::string version = "1");

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& version() const { return version_; }
  std::optional<std::size_t> index_of(const std::string& name) const;

  // Throws InputError("unknown_field") on a name outside the catalog.
  FieldVector encode(std::span<const std::string> fields) const;

  friend bool operator==(const FieldCatalog& a, const FieldCatalog& b) {
    return a.names_ == b.names_ && a.version_ == b.version_;
  }

 private:
  std::vector<std::string> names_;
  std::string version_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Dot product of two encodings. Throws InputError on length mismatch.
int similarity_score(const FieldVector& a, const FieldVector& b);

// An owner-supplied ranking; a group with several members is a tie.
using RankedGroups = std::vector<std::vector<std::string>>;

struct ResearchProfile {
  std::string id;
  FieldVector fields;
  RankedGroups listed;

  bool lists(const std::string& other) const;
};

// Advisor-given integer scores: 1 (best) .. 4, 5 = "not for me", 6 = unfit.
class ScoreTable {
 public:
  // Throws InputError("score_range") outside 1..6.
  void set(const std::string& advisor, const std::string& student, int score);
  std::optional<int> get(const std::string& advisor, const std::string& student) const;

  // (student, score) pairs given by one advisor, ordered by student id.
  std::vector<std::pair<std::string, int>> by_advisor(const std::string& advisor) const;
  // Every score a student received, ordered by advisor id.
  std::vector<int> by_student(const std::string& student) const;

  std::size_t size() const { return scores_.size(); }
  const std::map<std::pair<std::string, std::string>, int>& entries() const { return scores_; }

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  std::map<std::pair<std::string, std::string>, int> scores_;
};

// `others` grouped into classes by descending similarity with `owner`.
// Zero-overlap agents form the last class.
std::vector<IndifferenceClass> group_by_similarity(const FieldVector& owner,
                                                   std::span<const ResearchProfile> others);

// listed + (by_overlap \ listed): the listed groups first, then the overlap
// classes with listed members removed and emptied classes dropped.
std::vector<IndifferenceClass> merge_listed(const RankedGroups& listed,
                                            const std::vector<IndifferenceClass>& by_overlap);

// Throws InputError("unknown_agent") if the student lists a non-advisor.
PreferenceList build_student_prefs(const ResearchProfile& student,
                                   std::span<const ResearchProfile> advisors);

// Splits each class into (listers, non-listers), in that order.
PreferenceList refine_advisor_ties(const PreferenceList& prefs,
                                   const std::set<std::string>& listers);

// The evaluator inherits the professor's fields; students who listed the
// professor win ties.
PreferenceList build_evaluator_prefs(const ResearchProfile& professor,
                                     std::span<const ResearchProfile> students,
                                     const std::string& evaluator_id);

// Students this advisor scored 1-4, by score then by descending overlap.
// Residual ties stay as classes.
PreferenceList build_phase2_advisor_prefs(const ResearchProfile& advisor, const ScoreTable& scores,
                                          std::span<const ResearchProfile> students);

// Strict hiring-round list: own score first, then the number of non-6
// scores the student received in `global`, then a seeded shuffle.
PreferenceList build_phase3_advisor_prefs(const std::string& advisor, const ScoreTable& scores,
                                          const ScoreTable& global, TieBreakSeed seed);

// Drops `removed` members from every class; empty classes disappear.
PreferenceList without(const PreferenceList& prefs, const std::set<std::string>& removed);

}  // namespace polymatch
