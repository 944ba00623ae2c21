#include "polymatch/college.hpp"

#include <algorithm>
#include <stdexcept>

#include "polymatch/errors.hpp"
#include "polymatch/gale_shapley.hpp"
#include "polymatch/tie_breaking.hpp"

namespace polymatch {

namespace {

bool all_unit_quota(const PolyMarket& market, Side side) {
  const auto& agents = market.agents(side);
  return std::all_of(agents.begin(), agents.end(), [](const Agent& a) { return a.quota == 1; });
}

}  // namespace

ExtendedMarket map_to_extended_market(const PolyMarket& market) {
  ExtendedMarketMapping mapping;
  std::array<std::vector<Agent>, 2> replicas;
  for (Side side : {Side::Proposing, Side::Receiving}) {
    const auto s = side_slot(side);
    mapping.forward[s].resize(market.size(side));
    for (AgentIndex i = 0; i < market.size(side); ++i) {
      const Agent& a = market.agent({side, i});
      for (int k = 1; k <= a.quota; ++k) {
        mapping.forward[s][i].push_back(static_cast<AgentIndex>(replicas[s].size()));
        mapping.backward[s].push_back(i);
        replicas[s].push_back({a.id + "#" + std::to_string(k), 1});
      }
    }
  }

  std::array<std::vector<RankedClasses>, 2> prefs;
  for (Side side : {Side::Proposing, Side::Receiving}) {
    const auto s = side_slot(side);
    const auto& other_forward = mapping.forward[side_slot(opposite(side))];
    for (AgentIndex i = 0; i < market.size(side); ++i) {
      RankedClasses expanded;
      for (const auto& cls : market.classes({side, i})) {
        std::vector<AgentIndex> members;
        for (AgentIndex c : cls) {
          members.insert(members.end(), other_forward[c].begin(), other_forward[c].end());
        }
        expanded.push_back(std::move(members));
      }
      for (std::size_t k = 0; k < mapping.forward[s][i].size(); ++k) prefs[s].push_back(expanded);
    }
  }

  return {PolyMarket(std::move(replicas[0]), std::move(replicas[1]), std::move(prefs[0]),
                     std::move(prefs[1])),
          std::move(mapping)};
}

Matching map_from_extended_market(const Matching& extended, const ExtendedMarketMapping& mapping) {
  std::vector<Pair> pairs;
  pairs.reserve(extended.size());
  for (const Pair& p : extended.pairs()) {
    pairs.push_back({mapping.original(Side::Proposing, p.proposer),
                     mapping.original(Side::Receiving, p.receiver)});
  }
  Matching out(std::move(pairs));
  if (std::adjacent_find(out.pairs().begin(), out.pairs().end()) != out.pairs().end()) {
    throw std::logic_error("extended-market matching maps back to a repeated pair");
  }
  return out;
}

GsResult college_admission(const PolyMarket& market, TieBreakSeed seed) {
  if (!all_unit_quota(market, Side::Proposing) && !all_unit_quota(market, Side::Receiving)) {
    throw InputError("quota_precondition",
                     "college_admission needs one side with all quotas equal to 1");
  }
  const ExtendedMarket ext = map_to_extended_market(break_ties(market, seed));

  // The only ties left are among replicas of one agent; order them by
  // ordinal so every agent sees c#1 > c#2 > ... .
  std::array<std::vector<RankedClasses>, 2> strict;
  for (Side side : {Side::Proposing, Side::Receiving}) {
    for (AgentIndex i = 0; i < ext.market.size(side); ++i) {
      RankedClasses list;
      for (auto cls : ext.market.classes({side, i})) {
        std::sort(cls.begin(), cls.end());
        for (AgentIndex r : cls) list.push_back({r});
      }
      strict[side_slot(side)].push_back(std::move(list));
    }
  }
  const PolyMarket strict_ext(ext.market.agents(Side::Proposing), ext.market.agents(Side::Receiving),
                              std::move(strict[0]), std::move(strict[1]));

  GsResult result = gale_shapley(strict_ext, seed);
  result.matching = map_from_extended_market(result.matching, ext.mapping);
  result.seed = seed;
  return result;
}

}  // namespace polymatch
