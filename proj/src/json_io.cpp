#include "polymatch/json_io.hpp"

#include <fstream>
#include <sstream>

#include "polymatch/errors.hpp"
#include "polymatch/records.hpp"

namespace polymatch::io {

namespace {

std::vector<Agent> agents_from_json(const nlohmann::json& doc, const char* key) {
  std::vector<Agent> out;
  if (!doc.contains(key)) return out;
  if (!doc[key].is_array()) throw InputError("market_schema", std::string("'") + key + "' must be an array");
  for (const auto& item : doc[key]) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) {
      throw InputError("market_schema", std::string("every entry of '") + key + "' needs a string id");
    }
    Agent a{item["id"].get<std::string>(), 1};
    if (item.contains("quota")) {
      if (!item["quota"].is_number_integer()) {
        throw InputError("market_schema", "quota of '" + a.id + "' must be an integer");
      }
      a.quota = item["quota"].get<int>();
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

PolyMarket market_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("market_schema", "market must be a JSON object");
  MarketSpec spec;
  spec.proposers = agents_from_json(doc, "proposers");
  spec.receivers = agents_from_json(doc, "receivers");
  if (doc.contains("preferences")) {
    const auto& prefs = doc["preferences"];
    if (!prefs.is_object()) throw InputError("market_schema", "'preferences' must be an object");
    for (const auto& [owner, list] : prefs.items()) {
      if (!list.is_array()) {
        throw InputError("market_schema", "preferences of '" + owner + "' must be an array");
      }
      std::vector<IndifferenceClass> classes;
      for (const auto& entry : list) {
        if (entry.is_string()) {
          classes.push_back({entry.get<std::string>()});
        } else if (entry.is_array() && !entry.empty() &&
                   std::all_of(entry.begin(), entry.end(), [](const auto& e) { return e.is_string(); })) {
          classes.push_back(entry.get<IndifferenceClass>());
        } else {
          throw InputError("market_schema", "preferences of '" + owner +
                                                "' must hold ids or non-empty arrays of ids");
        }
      }
      spec.preferences[owner] = std::move(classes);
    }
  }
  return PolyMarket::from_spec(spec);
}

Json market_to_json(const PolyMarket& market) {
  Json doc;
  doc["schemaVersion"] = kSchemaVersion;
  for (Side side : {Side::Proposing, Side::Receiving}) {
    Json list = Json::array();
    for (const Agent& a : market.agents(side)) list.push_back({{"id", a.id}, {"quota", a.quota}});
    doc[side == Side::Proposing ? "proposers" : "receivers"] = std::move(list);
  }
  Json prefs = Json::object();
  for (Side side : {Side::Proposing, Side::Receiving}) {
    for (AgentIndex i = 0; i < market.size(side); ++i) {
      const auto list = market.preference_list({side, i});
      Json classes = Json::array();
      for (const auto& cls : list.classes) {
        if (cls.size() == 1) {
          classes.push_back(cls.front());
        } else {
          classes.push_back(cls);
        }
      }
      prefs[list.owner] = std::move(classes);
    }
  }
  doc["preferences"] = std::move(prefs);
  return doc;
}

Json matching_to_json(const PolyMarket& market, const Matching& matching,
                      std::optional<std::uint64_t> seed, std::optional<std::size_t> proposal_count) {
  Json doc;
  doc["schemaVersion"] = kSchemaVersion;
  Json pairs = Json::array();
  for (const Pair& p : matching.pairs()) {
    pairs.push_back({market.key_of(Side::Proposing, p.proposer), market.key_of(Side::Receiving, p.receiver)});
  }
  doc["pairs"] = std::move(pairs);
  if (seed) doc["seed"] = *seed;
  if (proposal_count) doc["proposalCount"] = *proposal_count;
  return doc;
}

Json matching_to_json(const PolyMarket& market, const GsResult& result) {
  return matching_to_json(market, result.matching, result.seed.value, result.proposal_count);
}

Matching matching_from_json(const PolyMarket& market, const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw InputError("matching_schema", "matching must be an object with a 'pairs' array");
  }
  std::vector<Pair> pairs;
  for (const auto& item : doc["pairs"]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
      throw InputError("matching_schema", "every pair must be [proposerId, receiverId]");
    }
    const AgentRef p = market.require(item[0].get<std::string>());
    const AgentRef r = market.require(item[1].get<std::string>());
    if (p.side != Side::Proposing || r.side != Side::Receiving) {
      throw InputError("matching_schema", "pair [" + item[0].get<std::string>() + ", " +
                                              item[1].get<std::string>() +
                                              "] must name a proposer then a receiver");
    }
    pairs.push_back({p.index, r.index});
  }
  return Matching(std::move(pairs));
}

Json blocking_pairs_to_json(const PolyMarket& market, const std::vector<BlockingPair>& pairs) {
  auto name = [&](AgentRef owner, AgentIndex partner) -> Json {
    if (partner == kSelf) return market.agent(owner).id;
    return market.key_of(opposite(owner.side), partner);
  };
  Json out = Json::array();
  for (const auto& bp : pairs) {
    Json item;
    item["pair"] = {market.agent(bp.first).id, market.agent(bp.second).id};
    item["individualRationality"] = bp.individual_rationality();
    item["firstLeaves"] = name(bp.first, bp.first_leaves);
    item["secondLeaves"] = name(bp.second, bp.second_leaves);
    out.push_back(std::move(item));
  }
  return out;
}

Json trace_event_to_json(const PolyMarket& market, const TraceEvent& event) {
  Json doc;
  doc["event"] = to_string(event.kind);
  doc["proposer"] = market.key_of(Side::Proposing, event.proposer);
  doc["receiver"] = market.key_of(Side::Receiving, event.receiver);
  if (event.kind == TraceEvent::Kind::Displace) {
    doc["displaced"] = event.displaced == kSelf ? market.key_of(Side::Receiving, event.receiver)
                                                : market.key_of(Side::Proposing, event.displaced);
  }
  doc["weakestRank"] = event.weakest_rank;
  return doc;
}

namespace {

Json histogram_json(const pipeline::RankHistogram& h) {
  Json out = Json::array();
  for (const auto& c : h) out.push_back({{"position", c.position}, {"rank", c.rank}, {"count", c.count}});
  return out;
}

}  // namespace

Json report_to_json(const pipeline::PhaseReport& report) {
  Json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["phase"] = report.phase;
  doc["seed"] = report.seed.value;
  if (report.accepted_seed) doc["acceptedSeed"] = *report.accepted_seed;
  doc["iterations"] = report.iterations;
  Json runs = Json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"iteration", r.iteration},
                    {"seed", r.seed},
                    {"pairs", r.pairs},
                    {"insufficient", r.insufficient},
                    {"accepted", r.accepted}});
  }
  doc["runs"] = std::move(runs);
  Json removed = Json::array();
  for (const auto& r : report.removed) {
    removed.push_back({{"id", r.student}, {"reason", r.reason}, {"iteration", r.iteration}});
  }
  doc["removed"] = std::move(removed);
  doc["removalsPerIteration"] = report.removals_per_iteration;
  doc["matching"] = matching_to_json(report.market, report.matching, report.accepted_seed);
  Json dists = Json::object();
  for (const auto& [side, h] : report.rank_distributions) dists[side] = histogram_json(h);
  doc["rankDistributions"] = std::move(dists);
  Json fill = Json::array();
  for (const auto& f : report.fill) fill.push_back({{"id", f.agent}, {"quota", f.quota}, {"matched", f.matched}});
  doc["fill"] = std::move(fill);
  if (report.suggestion_market) {
    doc["suggestions"] = matching_to_json(*report.suggestion_market, report.suggestions);
  }
  if (!report.prescreen_grades.empty()) {
    Json grades = Json::array();
    for (const auto& g : report.prescreen_grades) {
      grades.push_back({{"advisor", g.advisor}, {"student", g.student}, {"grade", g.grade}});
    }
    doc["prescreenGrades"] = std::move(grades);
  }
  doc["warnings"] = report.warnings;
  return doc;
}

std::string histogram_csv(const pipeline::RankHistogram& histogram) {
  std::string out = "position,rank,count\n";
  for (const auto& c : histogram) {
    out += std::to_string(c.position) + "," + std::to_string(c.rank) + "," + std::to_string(c.count) + "\n";
  }
  return out;
}

std::string schema_text() {
  return R"(schema )" + std::string(kSchemaVersion) + R"(

market.json
  {"proposers": [{"id": str, "quota": int >= 1}, ...],
   "receivers": [{"id": str, "quota": int >= 1}, ...],
   "preferences": {id: [class, ...]}}
  A class is an array of ids the owner is indifferent between, best class
  first; a single id may be written as a bare string. The owner itself is
  the implicit cutoff after the last class; unlisted agents are
  unacceptable. Ids are unique across both sides.

matching.json
  {"schemaVersion": str, "pairs": [[proposerId, receiverId], ...],
   "seed": int, "proposalCount": int}
  Free slots are self-matches and are not written.

trace (--trace FILE), one JSON object per line
  {"event": "propose"|"accept"|"reject"|"displace", "proposer", "receiver",
   "displaced" (displace only), "weakestRank"}

students.csv   id, fields, ranked_advisors
advisors.csv   id, fields, evaluator_id, interview_capacity, hiring_capacity
scores.csv     advisor_id, student_id, phase, score
fields.csv     field
  UTF-8 with a header row. fields and ranked_advisors are ';'-separated,
  a tie inside ranked_advisors is written a2|a3. At most 5 fields per
  person and 10 ranked advisors per student. Phase-1 scores are grades
  A, A-B, B, B-C, C; phase-2/3 scores are integers 1 (best) to 6.

histogram CSV  position, rank, count
  rank is the 1-based indifference-class index of the partner at that
  position; -1 marks an unfilled position and 0 a partner the owner never
  listed.
)";
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("file_missing", "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("json_parse", "'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("file_write", "cannot write '" + path + "'");
  out << text;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace polymatch::io
