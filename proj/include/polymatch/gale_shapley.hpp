#pragma once

#include "polymatch/poly_gs.hpp"

namespace polymatch {

// Classical one-to-one deferred acceptance, kept as a separate
// implementation so it can cross-check poly_gs. Every quota must be 1.
GsResult gale_shapley(const PolyMarket& market, TieBreakSeed seed);

}  // namespace polymatch
