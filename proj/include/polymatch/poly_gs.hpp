#pragma once

#include <cstdint>
#include <functional>

#include "polymatch/market.hpp"
#include "polymatch/seed.hpp"

namespace polymatch {

// Order in which proposers with spare capacity get to propose. Under strict
// preferences the outcome does not depend on it.
enum class Schedule { Fifo, Lifo, Random };

struct TraceEvent {
  enum class Kind { Propose, Accept, Reject, Displace };

  Kind kind = Kind::Propose;
  AgentIndex proposer = 0;
  AgentIndex receiver = 0;
  // Proposer (or kSelf) pushed out of the receiver's held set; Displace only.
  AgentIndex displaced = kSelf;
  // Strict rank of the receiver's weakest held partner after the event.
  std::size_t weakest_rank = 0;
};

using TraceSink = std::function<void(const TraceEvent&)>;

struct GsOptions {
  Schedule schedule = Schedule::Fifo;
  std::uint64_t schedule_seed = 0;  // Schedule::Random only
  TraceSink trace;
};

struct GsResult {
  Matching matching;
  TieBreakSeed seed;
  std::size_t proposal_count = 0;  // proposals to receivers; self-offers excluded
};

// Deferred acceptance with quotas on both sides. Ties are broken with
// `seed` up front; the result is stable for the original preferences and
// proposer-optimal for the tie-broken ones.
GsResult poly_gs(const PolyMarket& market, TieBreakSeed seed, const GsOptions& options = {});

// The proposal loop alone. `strict` must have strict preferences.
GsResult deferred_acceptance(const PolyMarket& strict, const GsOptions& options = {});

const char* to_string(TraceEvent::Kind kind);

}  // namespace polymatch
