#pragma once

#include "polymatch/market.hpp"
#include "polymatch/seed.hpp"

namespace polymatch {

// Replaces every indifference class with a uniformly shuffled strict order.
// Each agent draws from its own stream keyed by (seed, side, id), so the
// result does not depend on agent order. Strict relations are preserved and
// strict markets come back unchanged.
PolyMarket break_ties(const PolyMarket& market, TieBreakSeed seed);

// Shuffles the members of each class of one list and flattens the result.
RankedClasses break_ties(const RankedClasses& classes, Rng& rng);

}  // namespace polymatch
