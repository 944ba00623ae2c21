#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polymatch/errors.hpp"
#include "polymatch/records.hpp"

namespace polymatch::io {

inline constexpr std::size_t kMaxResearchFields = 5;
inline constexpr std::size_t kMaxRankedAdvisors = 10;

// One problem found while reading input. `row` is the 1-based data row
// (header excluded), 0 when the problem is not tied to a row.
struct Issue {
  std::string code;
  std::string file;
  std::size_t row = 0;
  std::string message;
};

// Every issue found in one ingest call; code() is that of the first one.
class IngestError : public InputError {
 public:
  explicit IngestError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<Issue> issues_;
};

struct DatasetPaths {
  std::filesystem::path students;
  std::filesystem::path advisors;
  std::optional<std::filesystem::path> scores;
  // Field catalog, one name per row under a "field" header. Without it the
  // catalog is the sorted set of names used in the people files.
  std::optional<std::filesystem::path> fields;
};

// CSV layouts (UTF-8, header row required, column order free):
//   students.csv  id, fields, ranked_advisors
//   advisors.csv  id, fields, evaluator_id, interview_capacity, hiring_capacity
//   scores.csv    advisor_id, student_id, phase, score
//   fields.csv    field
// `fields` and `ranked_advisors` are ';'-separated; within
// `ranked_advisors` a tie is written a2|a3. Phase-1 scores are letter grades
// (A, A-B, B, B-C, C); phase 2 and 3 scores are integers 1-6.
DatasetBundle ingest(const DatasetPaths& paths,
                     const std::string& schema_version = kSchemaVersion);

// Same checks on in-memory CSV text; file names are used in issues only.
struct DatasetText {
  std::string students;
  std::string advisors;
  std::string scores;
  std::optional<std::string> fields;
};
DatasetBundle ingest_text(const DatasetText& text,
                          const std::string& schema_version = kSchemaVersion);

DatasetText serialize(const DatasetBundle& bundle);
// Writes students.csv, advisors.csv, scores.csv and fields.csv into `dir`.
void write_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);

struct SynthSizes {
  std::size_t students = 0;
  std::size_t advisors = 0;
  std::size_t fields = 20;
  double interview_score_density = 0.05;  // chance an advisor scores a student
  double hiring_score_density = 0.02;
  double grade_density = 0.5;  // chance a student has a pre-screening grade
};

// Reproducible random dataset that always passes ingest.
DatasetBundle synth(const SynthSizes& sizes, std::uint64_t seed);

std::string content_hash(std::string_view bytes);

}  // namespace polymatch::io
