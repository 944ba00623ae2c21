#pragma once

#include <string>
#include <vector>

#include "polymatch/market.hpp"

namespace polymatch {

// A pair that would rather be together than keep its current partners.
// For the individual-rationality case first == second: the agent holds a
// partner it ranks below itself. The `*_leaves` fields name the weakest
// current partner (kSelf for a free slot) each member would drop.
struct BlockingPair {
  AgentRef first;
  AgentRef second;
  AgentIndex first_leaves = kSelf;
  AgentIndex second_leaves = kSelf;

  bool individual_rationality() const { return first == second; }

  friend bool operator==(const BlockingPair&, const BlockingPair&) = default;
};

struct Violation {
  std::string rule;  // "quota", "duplicate_pair" or "unknown_agent"
  std::string detail;
};

std::vector<Violation> violations(const PolyMarket& market, const Matching& matching);

inline bool is_valid(const PolyMarket& market, const Matching& matching) {
  return violations(market, matching).empty();
}

// Every blocking pair of `matching`: individual-rationality entries first
// (proposers, then receivers), then cross pairs in (proposer, receiver)
// order. Throws InputError("invalid_matching") when the matching is invalid.
std::vector<BlockingPair> find_blocking_pairs(const PolyMarket& market, const Matching& matching);

inline bool is_stable(const PolyMarket& market, const Matching& matching) {
  return find_blocking_pairs(market, matching).empty();
}

std::string describe(const PolyMarket& market, const BlockingPair& pair);

}  // namespace polymatch
