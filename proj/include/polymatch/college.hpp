#pragma once

#include <array>
#include <vector>

#include "polymatch/poly_gs.hpp"

namespace polymatch {

// Links each agent to its quota-many replicas in the extended market.
// Replicas of one agent have consecutive indices, in ordinal order.
struct ExtendedMarketMapping {
  std::array<std::vector<std::vector<AgentIndex>>, 2> forward;
  std::array<std::vector<AgentIndex>, 2> backward;

  const std::vector<AgentIndex>& replicas(AgentRef ref) const {
    return forward[side_slot(ref.side)][ref.index];
  }
  AgentIndex original(Side side, AgentIndex replica) const {
    return backward[side_slot(side)][replica];
  }
};

struct ExtendedMarket {
  PolyMarket market;  // all quotas 1
  ExtendedMarketMapping mapping;
};

// Agent p with quota q becomes replicas "p#1".."p#q" sharing p's list, in
// which every opposite agent c is replaced by the class of all c's replicas.
ExtendedMarket map_to_extended_market(const PolyMarket& market);

// Throws std::logic_error if two replica pairs collapse onto the same pair.
Matching map_from_extended_market(const Matching& extended, const ExtendedMarketMapping& mapping);

// Runs gale_shapley on the extended market and maps the result back. One
// side must have all quotas equal to 1.
GsResult college_admission(const PolyMarket& market, TieBreakSeed seed);

}  // namespace polymatch
