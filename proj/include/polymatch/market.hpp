#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace polymatch {

enum class Side : std::uint8_t { Proposing = 0, Receiving = 1 };

constexpr Side opposite(Side side) {
  return side == Side::Proposing ? Side::Receiving : Side::Proposing;
}

constexpr std::size_t side_slot(Side side) { return static_cast<std::size_t>(side); }

using AgentIndex = std::uint32_t;

// Stands in for "the agent itself" wherever a partner index is expected:
// the self cutoff in a preference list, or an unfilled slot of a matching.
inline constexpr AgentIndex kSelf = std::numeric_limits<AgentIndex>::max();

struct AgentRef {
  Side side = Side::Proposing;
  AgentIndex index = 0;

  friend auto operator<=>(const AgentRef&, const AgentRef&) = default;
};

struct Agent {
  std::string id;
  int quota = 1;

  friend bool operator==(const Agent&, const Agent&) = default;
};

using IndifferenceClass = std::vector<std::string>;

// Key-based preference list. The owner itself is the implicit last entry.
struct PreferenceList {
  std::string owner;
  std::vector<IndifferenceClass> classes;

  friend bool operator==(const PreferenceList&, const PreferenceList&) = default;
};

// Key-based description of a market, the shape of the market JSON file.
// Agents without an entry in `preferences` have an empty list.
struct MarketSpec {
  std::vector<Agent> proposers;
  std::vector<Agent> receivers;
  std::map<std::string, std::vector<IndifferenceClass>> preferences;
};

// Index-based indifference classes over the opposite side, best first.
using RankedClasses = std::vector<std::vector<AgentIndex>>;

// A two-sided market with quotas on both sides. Immutable after
// construction; all members of an indifference class are kept sorted by key
// so iteration order never depends on input order.
class PolyMarket {
 public:
  PolyMarket() = default;

  // Throws InputError on quotas < 1, out-of-range or repeated entries,
  // empty classes, or duplicate keys (keys are unique across both sides).
  PolyMarket(std::vector<Agent> proposers, std::vector<Agent> receivers,
             std::vector<RankedClasses> proposer_prefs,
             std::vector<RankedClasses> receiver_prefs);

  static PolyMarket from_spec(const MarketSpec& spec);
  MarketSpec to_spec() const;

  std::size_t size(Side side) const { return agents_[side_slot(side)].size(); }
  const std::vector<Agent>& agents(Side side) const { return agents_[side_slot(side)]; }
  const Agent& agent(AgentRef ref) const { return agents_[side_slot(ref.side)][ref.index]; }
  int quota(AgentRef ref) const { return agent(ref).quota; }

  const RankedClasses& classes(AgentRef ref) const {
    return prefs_[side_slot(ref.side)][ref.index];
  }

  std::optional<AgentRef> find(std::string_view key) const;
  // Like find() but throws InputError("unknown_agent") on a miss.
  AgentRef require(std::string_view key) const;

  // Position of `partner` in `agent`'s list counted in indifference classes
  // (0 = best). The agent itself (kSelf) ranks at classes().size(); any
  // unlisted agent ranks one below that.
  std::size_t rank(AgentRef agent, AgentIndex partner) const;
  std::size_t self_rank(AgentRef agent) const { return classes(agent).size(); }
  bool acceptable(AgentRef agent, AgentIndex partner) const {
    return partner != kSelf && rank(agent, partner) < self_rank(agent);
  }

  // True when every indifference class has exactly one member.
  bool is_strict() const;

  std::string key_of(Side side, AgentIndex index) const;
  PreferenceList preference_list(AgentRef ref) const;

 private:
  std::array<std::vector<Agent>, 2> agents_;
  std::array<std::vector<RankedClasses>, 2> prefs_;
  // rank_[side][agent][partner]: dense class index table.
  std::array<std::vector<std::vector<std::uint32_t>>, 2> rank_;
  std::unordered_map<std::string, AgentRef> index_;
};

// Strict/indifferent comparison of two partners under `agent`'s preferences.
// kSelf denotes the agent itself. `greater` means x is preferred.
std::weak_ordering prefers(const PolyMarket& market, AgentRef agent, AgentIndex x,
                           AgentIndex y);

// x >_agent K: some member of the (capacity-filled) multiset K ranks
// strictly below x.
bool prefers_over_set(const PolyMarket& market, AgentRef agent, AgentIndex x,
                      std::span<const AgentIndex> partners);

struct Pair {
  AgentIndex proposer = 0;
  AgentIndex receiver = 0;

  friend auto operator<=>(const Pair&, const Pair&) = default;
};

// Cross-side pairs only; self-matches are implied by unfilled quota. Pairs
// are kept sorted. Duplicates are representable so that validation can
// report them.
class Matching {
 public:
  Matching() = default;
  explicit Matching(std::vector<Pair> pairs);

  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool contains(Pair pair) const;

  // Cross-side partners of `agent` in ascending index order.
  std::vector<AgentIndex> partners(AgentRef agent) const;

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::vector<Pair> pairs_;
};

// Partners of `agent` padded with kSelf up to its quota.
std::vector<AgentIndex> filled_partners(const PolyMarket& market, const Matching& matching,
                                        AgentRef agent);

// filled_partners sorted best-first under `agent`'s preferences (ties by index).
std::vector<AgentIndex> ranked_partners(const PolyMarket& market, const Matching& matching,
                                        AgentRef agent);

}  // namespace polymatch
