#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "polymatch/pipeline.hpp"
#include "polymatch/poly_gs.hpp"
#include "polymatch/stability.hpp"

namespace polymatch::io {

using Json = nlohmann::ordered_json;

// {"proposers": [{"id", "quota"}], "receivers": [...],
//  "preferences": {id: [[class 1 ids], "single id", ...]}}
PolyMarket market_from_json(const nlohmann::json& doc);
Json market_to_json(const PolyMarket& market);

// {"schemaVersion", "pairs": [[proposer, receiver], ...], "seed", "proposalCount"}
Json matching_to_json(const PolyMarket& market, const Matching& matching,
                      std::optional<std::uint64_t> seed = std::nullopt,
                      std::optional<std::size_t> proposal_count = std::nullopt);
Json matching_to_json(const PolyMarket& market, const GsResult& result);
// Only "pairs" is read. Repeated pairs are kept so validation can flag them.
Matching matching_from_json(const PolyMarket& market, const nlohmann::json& doc);

Json blocking_pairs_to_json(const PolyMarket& market, const std::vector<BlockingPair>& pairs);
Json trace_event_to_json(const PolyMarket& market, const TraceEvent& event);
Json report_to_json(const pipeline::PhaseReport& report);

// position,rank,count
std::string histogram_csv(const pipeline::RankHistogram& histogram);

// Human-readable description of every file format, for --schema.
std::string schema_text();

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const Json& doc);

}  // namespace polymatch::io
