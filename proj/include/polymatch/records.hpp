#pragma once

#include <map>
#include <string>
#include <vector>

#include "polymatch/preferences.hpp"

namespace polymatch {

inline constexpr const char* kSchemaVersion = "polymatch/1";

struct StudentRecord {
  std::string id;
  std::vector<std::string> fields;
  RankedGroups ranked_advisors;

  friend bool operator==(const StudentRecord&, const StudentRecord&) = default;
};

struct AdvisorRecord {
  std::string id;
  std::vector<std::string> fields;
  std::string evaluator_id;
  int interview_capacity = 0;
  int hiring_capacity = 0;

  friend bool operator==(const AdvisorRecord&, const AdvisorRecord&) = default;
};

// Letter grade from pre-screening ("A", "A-B", "B", "B-C", "C"). Carried
// through to reports; no algorithm consumes it.
struct GradeRecord {
  std::string advisor;
  std::string student;
  std::string grade;

  friend bool operator==(const GradeRecord&, const GradeRecord&) = default;
};

struct DatasetBundle {
  std::string schema_version = kSchemaVersion;
  FieldCatalog catalog;
  std::vector<StudentRecord> students;
  std::vector<AdvisorRecord> advisors;
  std::vector<GradeRecord> grades;  // phase 1
  ScoreTable interview_scores;      // phase 2
  ScoreTable hiring_scores;         // phase 3
  std::map<std::string, std::string> provenance;  // file name -> content hash

  // Provenance is metadata about where the data came from, not the data.
  friend bool operator==(const DatasetBundle& a, const DatasetBundle& b) {
    return a.schema_version == b.schema_version && a.catalog == b.catalog &&
           a.students == b.students && a.advisors == b.advisors && a.grades == b.grades &&
           a.interview_scores == b.interview_scores && a.hiring_scores == b.hiring_scores;
  }
};

}  // namespace polymatch
