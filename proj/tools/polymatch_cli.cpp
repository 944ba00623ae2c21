#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "polymatch/college.hpp"
#include "polymatch/dataset.hpp"
#include "polymatch/gale_shapley.hpp"
#include "polymatch/json_io.hpp"
#include "polymatch/oracle.hpp"
#include "polymatch/pipeline.hpp"
#include "polymatch/poly_gs.hpp"
#include "polymatch/stability.hpp"

namespace fs = std::filesystem;
using namespace polymatch;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kFailure = 1, kInput = 2, kInfeasible = 3 };

struct PhaseArgs {
  std::string students;
  std::string advisors;
  std::string scores;
  std::string fields;
  std::uint64_t seed = 0;
  std::string out;
  // phase 1
  int retries = 10;
  std::size_t batch = 0;
  // phase 3
  int reruns = 10;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text_file(path, text);
  }
}

DatasetBundle load(const PhaseArgs& a) {
  io::DatasetPaths paths{a.students, a.advisors, std::nullopt, std::nullopt};
  if (!a.scores.empty()) paths.scores = a.scores;
  if (!a.fields.empty()) paths.fields = a.fields;
  return io::ingest(paths);
}

void write_report(const pipeline::PhaseReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  io::write_text_file((dir / "report.json").string(), io::dump(io::report_to_json(report)));
  io::write_text_file((dir / "market.json").string(), io::dump(io::market_to_json(report.market)));
  io::write_text_file((dir / "matching.json").string(),
                      io::dump(io::matching_to_json(report.market, report.matching,
                                                    report.accepted_seed)));
  for (const auto& [side, histogram] : report.rank_distributions) {
    io::write_text_file((dir / ("histogram_" + side + ".csv")).string(),
                        io::histogram_csv(histogram));
  }
  if (report.suggestion_market) {
    io::write_text_file((dir / "suggestion_market.json").string(),
                        io::dump(io::market_to_json(*report.suggestion_market)));
    io::write_text_file((dir / "suggestions.json").string(),
                        io::dump(io::matching_to_json(*report.suggestion_market, report.suggestions)));
  }
  spdlog::info("phase {}: {} pairs, {} removed, written to {}", report.phase,
               report.matching.size(), report.removed.size(), dir.string());
  for (const auto& w : report.warnings) spdlog::warn("{}", w);
}

int run_phase(int phase, const PhaseArgs& a) {
  const DatasetBundle bundle = load(a);
  spdlog::debug("ingested {} students, {} advisors", bundle.students.size(), bundle.advisors.size());
  pipeline::PhaseReport report;
  if (phase == 1) {
    pipeline::Phase1Config config;
    config.seed = TieBreakSeed{a.seed};
    config.tiebreak_retries = a.retries;
    if (a.batch > 0) config.removal_batch = a.batch;
    report = pipeline::run_phase1(bundle.catalog, bundle.students, bundle.advisors, config);
  } else if (phase == 2) {
    pipeline::Phase2Config config;
    config.seed = TieBreakSeed{a.seed};
    report = pipeline::run_phase2(bundle.catalog, bundle.students, bundle.advisors,
                                  bundle.interview_scores, config, bundle.grades);
  } else {
    pipeline::Phase3Config config;
    config.seed = TieBreakSeed{a.seed};
    config.reruns = a.reruns;
    report = pipeline::run_phase3(bundle.students, bundle.advisors, bundle.hiring_scores, config);
  }
  write_report(report, a.out);
  return kOk;
}

Schedule parse_schedule(const std::string& s) {
  if (s == "lifo") return Schedule::Lifo;
  if (s == "random") return Schedule::Random;
  return Schedule::Fifo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable matching with quotas and ties, plus the three-phase selection pipeline"};
  app.require_subcommand(0, 1);

  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  bool show_version = false;
  bool show_schema = false;
  app.add_flag("--version", show_version, "Print the version and exit");
  app.add_flag("--schema", show_schema, "Print the input and output formats and exit");

  std::array<PhaseArgs, 3> phase_args;
  std::array<CLI::App*, 3> phase_cmds{};
  for (int p = 0; p < 3; ++p) {
    auto& a = phase_args[p];
    auto* cmd = app.add_subcommand("phase" + std::to_string(p + 1),
                                   p == 0   ? "Pre-screening: students x evaluators"
                                   : p == 1 ? "Interview assignment"
                                            : "Hiring");
    cmd->add_option("--students", a.students, "students.csv")->required();
    cmd->add_option("--advisors", a.advisors, "advisors.csv")->required();
    cmd->add_option("--scores", a.scores, "scores.csv")->required(p > 0);
    cmd->add_option("--fields", a.fields, "fields.csv (field catalog)");
    cmd->add_option("--seed", a.seed, "Master seed")->required();
    cmd->add_option("--out", a.out, "Output directory")->required();
    if (p == 0) {
      cmd->add_option("--retries", a.retries, "Tie-break seeds tried per iteration")
          ->check(CLI::PositiveNumber);
      cmd->add_option("--batch", a.batch, "Students removed per failed iteration (0 = all)");
    }
    if (p == 2) cmd->add_option("--reruns", a.reruns, "Seeds tried")->check(CLI::PositiveNumber);
    phase_cmds[p] = cmd;
  }

  std::string market_path, matching_path, out_path, trace_path;
  std::uint64_t seed = 0;
  std::string algorithm = "polygs", schedule = "fifo";
  auto* match = app.add_subcommand("match", "Run a matching algorithm on a market.json");
  match->add_option("--market", market_path)->required();
  match->add_option("--seed", seed)->required();
  match->add_option("--algorithm", algorithm)->check(CLI::IsMember({"polygs", "gs", "college"}));
  match->add_option("--schedule", schedule, "Proposer order for polygs")
      ->check(CLI::IsMember({"fifo", "lifo", "random"}));
  match->add_option("--trace", trace_path, "Write proposal events as JSON lines");
  match->add_option("--out", out_path, "matching.json (stdout when omitted)");

  auto* verify = app.add_subcommand("verify", "Check a matching for validity and stability");
  verify->add_option("--market", market_path)->required();
  verify->add_option("--matching", matching_path)->required();
  verify->add_option("--out", out_path);

  int positions = 3;
  std::string side = "proposers";
  auto* report = app.add_subcommand("report", "Rank histogram of a matching as CSV");
  report->add_option("--market", market_path)->required();
  report->add_option("--matching", matching_path)->required();
  report->add_option("--positions", positions)->check(CLI::PositiveNumber);
  report->add_option("--side", side)->check(CLI::IsMember({"proposers", "receivers"}));
  report->add_option("--out", out_path);

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force reference on small markets");
  oracle_cmd->require_subcommand(1);
  auto* enumerate = oracle_cmd->add_subcommand("enumerate", "List every stable matching");
  enumerate->add_option("--market", market_path)->required();
  enumerate->add_option("--out", out_path);

  io::SynthSizes sizes;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a random dataset");
  synth->add_option("--students", sizes.students)->required();
  synth->add_option("--advisors", sizes.advisors)->required();
  synth->add_option("--fields", sizes.fields);
  synth->add_option("--seed", seed)->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  auto logger = spdlog::stderr_color_mt("polymatch");
  logger->set_pattern("%l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (show_version) {
    std::cout << "polymatch " << kVersion << " (schema " << kSchemaVersion << ")\n";
    return kOk;
  }
  if (show_schema) {
    std::cout << io::schema_text();
    return kOk;
  }

  try {
    for (int p = 0; p < 3; ++p) {
      if (*phase_cmds[p]) return run_phase(p + 1, phase_args[p]);
    }

    if (*match) {
      const PolyMarket market = io::market_from_json(io::read_json_file(market_path));
      std::ofstream trace;
      GsOptions options;
      options.schedule = parse_schedule(schedule);
      options.schedule_seed = combine_seed(seed, 0);
      if (!trace_path.empty()) {
        if (algorithm != "polygs") throw InputError("trace_unsupported", "--trace needs --algorithm polygs");
        trace.open(trace_path, std::ios::binary);
        if (!trace) throw InputError("file_write", "cannot write '" + trace_path + "'");
        options.trace = [&](const TraceEvent& e) {
          trace << io::trace_event_to_json(market, e).dump() << '\n';
        };
      }
      GsResult result;
      if (algorithm == "gs") {
        result = gale_shapley(market, TieBreakSeed{seed});
      } else if (algorithm == "college") {
        result = college_admission(market, TieBreakSeed{seed});
      } else {
        result = poly_gs(market, TieBreakSeed{seed}, options);
      }
      spdlog::info("{} pairs after {} proposals", result.matching.size(), result.proposal_count);
      emit(out_path, io::dump(io::matching_to_json(market, result)));
      return kOk;
    }

    if (*verify) {
      const PolyMarket market = io::market_from_json(io::read_json_file(market_path));
      const Matching matching = io::matching_from_json(market, io::read_json_file(matching_path));
      io::Json doc;
      doc["schemaVersion"] = kSchemaVersion;
      const auto problems = violations(market, matching);
      io::Json vlist = io::Json::array();
      for (const auto& v : problems) vlist.push_back({{"rule", v.rule}, {"detail", v.detail}});
      doc["valid"] = problems.empty();
      doc["violations"] = std::move(vlist);
      bool stable = false;
      if (problems.empty()) {
        const auto blocking = find_blocking_pairs(market, matching);
        stable = blocking.empty();
        doc["stable"] = stable;
        doc["blockingPairs"] = io::blocking_pairs_to_json(market, blocking);
        for (const auto& bp : blocking) spdlog::info("blocking: {}", describe(market, bp));
      } else {
        doc["stable"] = false;
      }
      emit(out_path, io::dump(doc));
      return stable ? kOk : kFailure;
    }

    if (*report) {
      const PolyMarket market = io::market_from_json(io::read_json_file(market_path));
      const Matching matching = io::matching_from_json(market, io::read_json_file(matching_path));
      if (!is_valid(market, matching)) {
        throw InputError("invalid_matching", "the matching breaks a quota or repeats a pair");
      }
      const Side s = side == "receivers" ? Side::Receiving : Side::Proposing;
      emit(out_path, io::histogram_csv(pipeline::rank_distribution(matching, market, s, positions)));
      return kOk;
    }

    if (*enumerate) {
      const PolyMarket market = io::market_from_json(io::read_json_file(market_path));
      const auto stable = oracle::enumerate_stable_matchings(market);
      io::Json doc;
      doc["schemaVersion"] = kSchemaVersion;
      doc["count"] = stable.size();
      io::Json list = io::Json::array();
      for (const auto& m : stable) list.push_back(io::matching_to_json(market, m)["pairs"]);
      doc["matchings"] = std::move(list);
      emit(out_path, io::dump(doc));
      return kOk;
    }

    if (*synth) {
      io::write_bundle(io::synth(sizes, seed), synth_out);
      return kOk;
    }

    std::cout << app.help();
    return kOk;
  } catch (const io::IngestError& e) {
    for (const auto& issue : e.issues()) {
      spdlog::error("{}:{}: [{}] {}", issue.file, issue.row, issue.code, issue.message);
    }
    return kInput;
  } catch (const InputError& e) {
    spdlog::error("[{}] {}", e.code(), e.what());
    return kInput;
  } catch (const SizeError& e) {
    spdlog::error("[size_limit] {}", e.what());
    return kInput;
  } catch (const InfeasibleError& e) {
    spdlog::error("[infeasible] {}", e.what());
    return kInfeasible;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
}
