#include "polymatch/tie_breaking.hpp"

namespace polymatch {

RankedClasses break_ties(const RankedClasses& classes, Rng& rng) {
  RankedClasses strict;
  for (const auto& cls : classes) {
    std::vector<AgentIndex> order = cls;
    rng.shuffle(std::span<AgentIndex>(order));
    for (AgentIndex member : order) strict.push_back({member});
  }
  return strict;
}

PolyMarket break_ties(const PolyMarket& market, TieBreakSeed seed) {
  if (market.is_strict()) return market;
  std::vector<RankedClasses> prefs[2];
  for (Side side : {Side::Proposing, Side::Receiving}) {
    auto& out = prefs[side_slot(side)];
    out.reserve(market.size(side));
    for (AgentIndex i = 0; i < market.size(side); ++i) {
      const AgentRef ref{side, i};
      Rng rng(combine_seed(seed.value,
                           stable_hash(market.agent(ref).id) ^ static_cast<std::uint64_t>(side)));
      out.push_back(break_ties(market.classes(ref), rng));
    }
  }
  return PolyMarket(market.agents(Side::Proposing), market.agents(Side::Receiving),
                    std::move(prefs[0]), std::move(prefs[1]));
}

}  // namespace polymatch
