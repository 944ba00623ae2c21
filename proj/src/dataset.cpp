#include "polymatch/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "polymatch/csv.hpp"
#include "polymatch/seed.hpp"

namespace polymatch::io {

namespace {

const std::set<std::string> kGrades = {"A", "A-B", "B", "B-C", "C"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find(sep, start), s.size());
    auto item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::optional<int> parse_int(const std::string& s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::string catalog_version(const std::vector<std::string>& names) {
  return content_hash(join(names, '\n'));
}

// A CSV table addressed by column name.
class Table {
 public:
  Table(std::string file, std::string_view text, std::vector<std::string> required,
        std::vector<Issue>& issues)
      : file_(std::move(file)) {
    std::vector<csv::Row> rows;
    try {
      rows = csv::parse(text);
    } catch (const InputError& e) {
      issues.push_back({"csv_parse", file_, 0, e.what()});
      return;
    }
    if (rows.empty()) return;
    for (std::size_t c = 0; c < rows[0].size(); ++c) columns_[trim(rows[0][c])] = c;
    for (const auto& name : required) {
      if (!columns_.contains(name)) {
        issues.push_back({"missing_column", file_, 0, "missing column '" + name + "'"});
        ok_ = false;
      }
    }
    if (ok_) rows_.assign(rows.begin() + 1, rows.end());
  }

  std::size_t size() const { return rows_.size(); }
  const std::string& file() const { return file_; }

  std::string get(std::size_t row, const std::string& column) const {
    const auto& r = rows_[row];
    const auto c = columns_.at(column);
    return c < r.size() ? trim(r[c]) : std::string();
  }

 private:
  std::string file_;
  std::unordered_map<std::string, std::size_t> columns_;
  std::vector<csv::Row> rows_;
  bool ok_ = true;
};

std::string read_file(const std::filesystem::path& path, std::vector<Issue>& issues) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    issues.push_back({"file_missing", path.filename().string(), 0,
                      "cannot open '" + path.string() + "'"});
    return {};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("file_write", "cannot write '" + path.string() + "'");
  out << text;
}

std::string describe_issues(const std::vector<Issue>& issues) {
  std::string out = std::to_string(issues.size()) + " input problem(s):";
  for (const auto& i : issues) {
    out += "\n  [" + i.code + "] " + i.file;
    if (i.row) out += " row " + std::to_string(i.row);
    out += ": " + i.message;
  }
  return out;
}

}  // namespace

IngestError::IngestError(std::vector<Issue> issues)
    : InputError(issues.empty() ? "ingest" : issues.front().code, describe_issues(issues)),
      issues_(std::move(issues)) {}

std::string content_hash(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(stable_hash(bytes)));
  return buf;
}

DatasetBundle ingest_text(const DatasetText& text, const std::string& schema_version) {
  std::vector<Issue> issues;
  DatasetBundle bundle;
  bundle.schema_version = schema_version;

  Table students("students.csv", text.students, {"id", "fields", "ranked_advisors"}, issues);
  Table advisors("advisors.csv", text.advisors,
                 {"id", "fields", "evaluator_id", "interview_capacity", "hiring_capacity"}, issues);
  Table scores("scores.csv", text.scores, {"advisor_id", "student_id", "phase", "score"}, issues);

  std::set<std::string> used_fields;
  auto read_fields = [&](const Table& t, std::size_t r, const std::string& owner) {
    auto fields = split(t.get(r, "fields"), ';');
    std::set<std::string> distinct(fields.begin(), fields.end());
    if (distinct.size() != fields.size()) {
      issues.push_back({"duplicate_field", t.file(), r + 1, "'" + owner + "' repeats a research field"});
    }
    if (fields.size() > kMaxResearchFields) {
      issues.push_back({"field_limit", t.file(), r + 1,
                        "'" + owner + "' states " + std::to_string(fields.size()) +
                            " research fields; up to five research fields are allowed"});
    }
    used_fields.insert(fields.begin(), fields.end());
    return fields;
  };

  std::unordered_set<std::string> ids;
  auto claim = [&](const std::string& id, const Table& t, std::size_t r, const char* what) {
    if (id.empty()) {
      issues.push_back({"empty_id", t.file(), r + 1, std::string("missing ") + what});
    } else if (!ids.insert(id).second) {
      issues.push_back({"duplicate_id", t.file(), r + 1, "id '" + id + "' is already in use"});
    }
  };

  for (std::size_t r = 0; r < advisors.size(); ++r) {
    AdvisorRecord a;
    a.id = advisors.get(r, "id");
    claim(a.id, advisors, r, "advisor id");
    a.fields = read_fields(advisors, r, a.id);
    a.evaluator_id = advisors.get(r, "evaluator_id");
    claim(a.evaluator_id, advisors, r, "evaluator id");
    for (auto [column, target] : {std::pair{"interview_capacity", &a.interview_capacity},
                                  std::pair{"hiring_capacity", &a.hiring_capacity}}) {
      const auto v = parse_int(advisors.get(r, column));
      if (!v || *v < 0) {
        issues.push_back({"bad_integer", advisors.file(), r + 1,
                          std::string(column) + " must be a non-negative integer"});
      } else {
        *target = *v;
      }
    }
    bundle.advisors.push_back(std::move(a));
  }
  std::unordered_set<std::string> advisor_ids;
  for (const auto& a : bundle.advisors) advisor_ids.insert(a.id);

  for (std::size_t r = 0; r < students.size(); ++r) {
    StudentRecord s;
    s.id = students.get(r, "id");
    claim(s.id, students, r, "student id");
    s.fields = read_fields(students, r, s.id);
    std::set<std::string> listed;
    for (const auto& group : split(students.get(r, "ranked_advisors"), ';')) {
      auto members = split(group, '|');
      for (const auto& m : members) {
        if (!listed.insert(m).second) {
          issues.push_back({"duplicate_listing", students.file(), r + 1,
                            "'" + s.id + "' ranks '" + m + "' more than once"});
        }
        if (!advisor_ids.contains(m)) {
          issues.push_back({"unknown_reference", students.file(), r + 1,
                            "'" + s.id + "' ranks unknown advisor '" + m + "'"});
        }
      }
      if (!members.empty()) s.ranked_advisors.push_back(std::move(members));
    }
    if (listed.size() > kMaxRankedAdvisors) {
      issues.push_back({"ranked_limit", students.file(), r + 1,
                        "'" + s.id + "' ranks " + std::to_string(listed.size()) +
                            " advisors; at most 10 professors may be ranked"});
    }
    bundle.students.push_back(std::move(s));
  }
  std::unordered_set<std::string> student_ids;
  for (const auto& s : bundle.students) student_ids.insert(s.id);

  std::set<std::tuple<std::string, std::string, int>> seen_scores;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    const auto advisor = scores.get(r, "advisor_id");
    const auto student = scores.get(r, "student_id");
    const auto raw = scores.get(r, "score");
    const auto phase = parse_int(scores.get(r, "phase"));
    bool ok = true;
    if (!advisor_ids.contains(advisor)) {
      issues.push_back({"unknown_reference", scores.file(), r + 1, "unknown advisor '" + advisor + "'"});
      ok = false;
    }
    if (!student_ids.contains(student)) {
      issues.push_back({"unknown_reference", scores.file(), r + 1, "unknown student '" + student + "'"});
      ok = false;
    }
    if (!phase || *phase < 1 || *phase > 3) {
      issues.push_back({"bad_phase", scores.file(), r + 1, "phase must be 1, 2 or 3"});
      continue;
    }
    if (!seen_scores.emplace(advisor, student, *phase).second) {
      issues.push_back({"duplicate_score", scores.file(), r + 1,
                        "'" + advisor + "' scores '" + student + "' twice in phase " +
                            std::to_string(*phase)});
      continue;
    }
    if (*phase == 1) {
      if (!kGrades.contains(raw)) {
        issues.push_back({"bad_grade", scores.file(), r + 1,
                          "pre-screening grade '" + raw + "' is not one of A, A-B, B, B-C, C"});
      } else if (ok) {
        bundle.grades.push_back({advisor, student, raw});
      }
      continue;
    }
    const auto value = parse_int(raw);
    if (!value || *value < 1 || *value > 6) {
      issues.push_back({"score_range", scores.file(), r + 1, "score '" + raw + "' is outside 1..6"});
      continue;
    }
    if (ok) (*phase == 2 ? bundle.interview_scores : bundle.hiring_scores).set(advisor, student, *value);
  }

  std::vector<std::string> catalog_names;
  if (text.fields) {
    Table fields("fields.csv", *text.fields, {"field"}, issues);
    for (std::size_t r = 0; r < fields.size(); ++r) {
      const auto name = fields.get(r, "field");
      if (name.empty()) continue;
      if (std::find(catalog_names.begin(), catalog_names.end(), name) != catalog_names.end()) {
        issues.push_back({"duplicate_field", fields.file(), r + 1, "field '" + name + "' listed twice"});
        continue;
      }
      catalog_names.push_back(name);
    }
    for (const auto& f : used_fields) {
      if (std::find(catalog_names.begin(), catalog_names.end(), f) == catalog_names.end()) {
        issues.push_back({"unknown_field", "fields.csv", 0, "research field '" + f + "' is not in the catalog"});
      }
    }
  } else {
    catalog_names.assign(used_fields.begin(), used_fields.end());
  }

  if (!issues.empty()) throw IngestError(std::move(issues));
  const auto version = catalog_version(catalog_names);
  bundle.catalog = FieldCatalog(std::move(catalog_names), version);
  bundle.provenance["students.csv"] = content_hash(text.students);
  bundle.provenance["advisors.csv"] = content_hash(text.advisors);
  bundle.provenance["scores.csv"] = content_hash(text.scores);
  if (text.fields) bundle.provenance["fields.csv"] = content_hash(*text.fields);
  return bundle;
}

DatasetBundle ingest(const DatasetPaths& paths, const std::string& schema_version) {
  std::vector<Issue> issues;
  DatasetText text;
  text.students = read_file(paths.students, issues);
  text.advisors = read_file(paths.advisors, issues);
  if (paths.scores) text.scores = read_file(*paths.scores, issues);
  if (paths.fields) text.fields = read_file(*paths.fields, issues);
  if (!issues.empty()) throw IngestError(std::move(issues));
  return ingest_text(text, schema_version);
}

DatasetText serialize(const DatasetBundle& bundle) {
  DatasetText out;
  out.students = csv::format_row({"id", "fields", "ranked_advisors"});
  for (const auto& s : bundle.students) {
    std::vector<std::string> groups;
    for (const auto& g : s.ranked_advisors) groups.push_back(join(g, '|'));
    out.students += csv::format_row({s.id, join(s.fields, ';'), join(groups, ';')});
  }
  out.advisors = csv::format_row(
      {"id", "fields", "evaluator_id", "interview_capacity", "hiring_capacity"});
  for (const auto& a : bundle.advisors) {
    out.advisors += csv::format_row({a.id, join(a.fields, ';'), a.evaluator_id,
                                     std::to_string(a.interview_capacity),
                                     std::to_string(a.hiring_capacity)});
  }
  out.scores = csv::format_row({"advisor_id", "student_id", "phase", "score"});
  for (const auto& g : bundle.grades) out.scores += csv::format_row({g.advisor, g.student, "1", g.grade});
  for (const auto& [key, score] : bundle.interview_scores.entries()) {
    out.scores += csv::format_row({key.first, key.second, "2", std::to_string(score)});
  }
  for (const auto& [key, score] : bundle.hiring_scores.entries()) {
    out.scores += csv::format_row({key.first, key.second, "3", std::to_string(score)});
  }
  std::string fields = csv::format_row({"field"});
  for (const auto& f : bundle.catalog.names()) fields += csv::format_row({f});
  out.fields = std::move(fields);
  return out;
}

void write_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto text = serialize(bundle);
  write_file(dir / "students.csv", text.students);
  write_file(dir / "advisors.csv", text.advisors);
  write_file(dir / "scores.csv", text.scores);
  write_file(dir / "fields.csv", *text.fields);
}

DatasetBundle synth(const SynthSizes& sizes, std::uint64_t seed) {
  Rng rng(combine_seed(seed, stable_hash("synth")));
  DatasetBundle bundle;

  std::vector<std::string> names;
  char buf[32];
  for (std::size_t f = 0; f < sizes.fields; ++f) {
    std::snprintf(buf, sizeof buf, "F%02zu", f);
    names.emplace_back(buf);
  }

  auto pick_fields = [&] {
    std::vector<std::string> out;
    if (names.empty()) return out;
    const auto k = 1 + rng.below(std::min<std::size_t>(kMaxResearchFields, names.size()));
    std::vector<std::size_t> idx(names.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(std::span<std::size_t>(idx));
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) out.push_back(names[i]);
    return out;
  };

  for (std::size_t a = 0; a < sizes.advisors; ++a) {
    AdvisorRecord rec;
    std::snprintf(buf, sizeof buf, "a%03zu", a);
    rec.id = buf;
    std::snprintf(buf, sizeof buf, "e%03zu", a);
    rec.evaluator_id = buf;
    rec.fields = pick_fields();
    rec.interview_capacity = 1 + static_cast<int>(rng.below(12));
    rec.hiring_capacity = 1 + static_cast<int>(rng.below(3));
    bundle.advisors.push_back(std::move(rec));
  }

  for (std::size_t s = 0; s < sizes.students; ++s) {
    StudentRecord rec;
    std::snprintf(buf, sizeof buf, "s%04zu", s);
    rec.id = buf;
    rec.fields = pick_fields();
    if (sizes.advisors > 0) {
      const auto k = rng.below(std::min(kMaxRankedAdvisors, sizes.advisors) + 1);
      std::vector<std::size_t> idx(sizes.advisors);
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      rng.shuffle(std::span<std::size_t>(idx));
      for (std::size_t i = 0; i < k; ++i) rec.ranked_advisors.push_back({bundle.advisors[idx[i]].id});
    }
    bundle.students.push_back(std::move(rec));
  }

  // Interview scores lean towards the good end so most students stay
  // matchable; roughly a quarter are 5 or 6.
  static constexpr int kScoreWeights[] = {3, 3, 2, 2, 2, 1};
  auto draw_score = [&] {
    auto x = rng.below(13);
    for (int s = 0; s < 6; ++s) {
      if (x < static_cast<std::uint64_t>(kScoreWeights[s])) return s + 1;
      x -= kScoreWeights[s];
    }
    return 6;
  };
  const std::vector<std::string> grades(kGrades.begin(), kGrades.end());
  for (const auto& s : bundle.students) {
    if (!bundle.advisors.empty() && rng.unit() < sizes.grade_density) {
      const auto& a = bundle.advisors[rng.below(bundle.advisors.size())];
      bundle.grades.push_back({a.id, s.id, grades[rng.below(grades.size())]});
    }
    for (const auto& a : bundle.advisors) {
      if (rng.unit() < sizes.interview_score_density) bundle.interview_scores.set(a.id, s.id, draw_score());
      if (rng.unit() < sizes.hiring_score_density) bundle.hiring_scores.set(a.id, s.id, draw_score());
    }
  }

  const auto version = catalog_version(names);
  bundle.catalog = FieldCatalog(std::move(names), version);
  return bundle;
}

}  // namespace polymatch::io
