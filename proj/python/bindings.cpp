#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polymatch/college.hpp"
#include "polymatch/dataset.hpp"
#include "polymatch/errors.hpp"
#include "polymatch/gale_shapley.hpp"
#include "polymatch/json_io.hpp"
#include "polymatch/oracle.hpp"
#include "polymatch/pipeline.hpp"
#include "polymatch/poly_gs.hpp"
#include "polymatch/stability.hpp"
#include "polymatch/tie_breaking.hpp"

namespace py = pybind11;
using namespace polymatch;

// Markets and matchings cross the boundary as JSON text; the Python side
// wraps these in dicts.
namespace {

PolyMarket market_of(const std::string& text) {
  try {
    return io::market_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("json_parse", e.what());
  }
}

Matching matching_of(const PolyMarket& market, const std::string& text) {
  try {
    return io::matching_from_json(market, nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("json_parse", e.what());
  }
}

Schedule schedule_of(const std::string& s) {
  if (s == "fifo") return Schedule::Fifo;
  if (s == "lifo") return Schedule::Lifo;
  if (s == "random") return Schedule::Random;
  throw InputError("schedule", "schedule must be fifo, lifo or random");
}

std::string run(const std::string& algorithm, const std::string& market_text, std::uint64_t seed,
                const std::string& schedule) {
  const PolyMarket market = market_of(market_text);
  GsResult r;
  if (algorithm == "polygs") {
    GsOptions options;
    options.schedule = schedule_of(schedule);
    options.schedule_seed = combine_seed(seed, 0);
    r = poly_gs(market, TieBreakSeed{seed}, options);
  } else if (algorithm == "gs") {
    r = gale_shapley(market, TieBreakSeed{seed});
  } else if (algorithm == "college") {
    r = college_admission(market, TieBreakSeed{seed});
  } else {
    throw InputError("algorithm", "algorithm must be polygs, gs or college");
  }
  return io::matching_to_json(market, r).dump();
}

DatasetBundle load(const std::string& students, const std::string& advisors,
                   const std::optional<std::string>& scores, const std::optional<std::string>& fields) {
  io::DatasetPaths paths{students, advisors, std::nullopt, std::nullopt};
  if (scores) paths.scores = *scores;
  if (fields) paths.fields = *fields;
  return io::ingest(paths);
}

}  // namespace

PYBIND11_MODULE(_polymatch, m) {
  m.doc() = "Stable matching with quotas and ties";
  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<SizeError> size_error(m, "SizeError", PyExc_RuntimeError);
  static py::exception<InfeasibleError> infeasible_error(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      py::set_error(input_error, (std::string("[") + e.code() + "] " + e.what()).c_str());
    } catch (const SizeError& e) {
      py::set_error(size_error, e.what());
    } catch (const InfeasibleError& e) {
      py::set_error(infeasible_error, e.what());
    }
  });

  m.def("match", &run, py::arg("algorithm"), py::arg("market"), py::arg("seed"),
        py::arg("schedule") = "fifo");

  m.def("break_ties", [](const std::string& market, std::uint64_t seed) {
    return io::market_to_json(break_ties(market_of(market), TieBreakSeed{seed})).dump();
  });

  m.def("blocking_pairs", [](const std::string& market_text, const std::string& matching_text) {
    const PolyMarket market = market_of(market_text);
    return io::blocking_pairs_to_json(market, find_blocking_pairs(market, matching_of(market, matching_text)))
        .dump();
  });

  m.def("violations", [](const std::string& market_text, const std::string& matching_text) {
    const PolyMarket market = market_of(market_text);
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : violations(market, matching_of(market, matching_text))) out.emplace_back(v.rule, v.detail);
    return out;
  });

  m.def("enumerate_stable_matchings", [](const std::string& market_text) {
    const PolyMarket market = market_of(market_text);
    io::Json list = io::Json::array();
    for (const auto& mu : oracle::enumerate_stable_matchings(market)) {
      list.push_back(io::matching_to_json(market, mu)["pairs"]);
    }
    return list.dump();
  });

  m.def("extended_market", [](const std::string& market_text) {
    return io::market_to_json(map_to_extended_market(market_of(market_text)).market).dump();
  });

  m.def("rank_histogram",
        [](const std::string& market_text, const std::string& matching_text, const std::string& side, int positions) {
          const PolyMarket market = market_of(market_text);
          const Side s = side == "receivers" ? Side::Receiving : Side::Proposing;
          return io::histogram_csv(
              pipeline::rank_distribution(matching_of(market, matching_text), market, s, positions));
        },
        py::arg("market"), py::arg("matching"), py::arg("side") = "proposers", py::arg("positions") = 3);

  m.def("evaluator_quota", &pipeline::evaluator_quota);
  m.def("removal_bound", &pipeline::removal_bound);
  m.def("interview_quota", [](int capacity) { return pipeline::interview_quota(capacity, {}); });
  m.def("is_protected", [](const std::vector<int>& scores) { return pipeline::is_protected(scores); });

  m.def("run_phase",
        [](int phase, const std::string& students, const std::string& advisors,
           const std::optional<std::string>& scores, const std::optional<std::string>& fields, std::uint64_t seed) {
          const DatasetBundle b = load(students, advisors, scores, fields);
          pipeline::PhaseReport r;
          if (phase == 1) {
            pipeline::Phase1Config c;
            c.seed = TieBreakSeed{seed};
            r = pipeline::run_phase1(b.catalog, b.students, b.advisors, c);
          } else if (phase == 2) {
            pipeline::Phase2Config c;
            c.seed = TieBreakSeed{seed};
            r = pipeline::run_phase2(b.catalog, b.students, b.advisors, b.interview_scores, c, b.grades);
          } else if (phase == 3) {
            pipeline::Phase3Config c;
            c.seed = TieBreakSeed{seed};
            r = pipeline::run_phase3(b.students, b.advisors, b.hiring_scores, c);
          } else {
            throw InputError("phase", "phase must be 1, 2 or 3");
          }
          return io::report_to_json(r).dump();
        },
        py::arg("phase"), py::arg("students"), py::arg("advisors"), py::arg("scores") = py::none(),
        py::arg("fields") = py::none(), py::arg("seed") = 0);

  m.def("synth",
        [](std::size_t students, std::size_t advisors, std::uint64_t seed, const std::string& out) {
          io::write_bundle(io::synth({students, advisors}, seed), out);
        },
        py::arg("students"), py::arg("advisors"), py::arg("seed"), py::arg("out"));
}
