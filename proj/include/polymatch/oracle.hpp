#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polymatch/market.hpp"

// Brute-force references for small markets. These are slow on purpose and
// share no code with the proposal algorithms they check.
namespace polymatch::oracle {

struct Guard {
  std::size_t max_pair_product = 36;  // |proposers| * |receivers|
  int max_quota = 3;
};

// All valid matchings without blocking pairs, in lexicographic pair order.
// Throws SizeError above the guard.
std::vector<Matching> enumerate_stable_matchings(const PolyMarket& market, const Guard& guard = {});

// For every agent of `side`: with partners sorted best-first and padded with
// self, a's i-th partner is weakly preferred to b's i-th partner.
bool positionwise_dominates(const PolyMarket& market, Side side, const Matching& a,
                            const Matching& b);

struct Extremum {
  std::optional<Matching> matching;
  std::string diagnostic;  // set when no element dominates
};

// The element that positionwise dominates every other for `side`. Dominance
// is checked, not assumed. Throws InputError on an empty list.
Extremum side_optimal(std::span<const Matching> matchings, const PolyMarket& market, Side side);

// The element every other positionwise dominates for `side`.
Extremum side_pessimal(std::span<const Matching> matchings, const PolyMarket& market, Side side);

}  // namespace polymatch::oracle
