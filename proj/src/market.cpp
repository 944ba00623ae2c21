#include "polymatch/market.hpp"

#include <algorithm>

#include "polymatch/errors.hpp"

namespace polymatch {

namespace {

constexpr std::uint32_t kUnlisted = std::numeric_limits<std::uint32_t>::max();

const char* side_name(Side side) { return side == Side::Proposing ? "proposer" : "receiver"; }

}  // namespace

PolyMarket::PolyMarket(std::vector<Agent> proposers, std::vector<Agent> receivers,
                       std::vector<RankedClasses> proposer_prefs,
                       std::vector<RankedClasses> receiver_prefs)
    : agents_{std::move(proposers), std::move(receivers)},
      prefs_{std::move(proposer_prefs), std::move(receiver_prefs)} {
  for (Side side : {Side::Proposing, Side::Receiving}) {
    const auto s = side_slot(side);
    if (prefs_[s].size() != agents_[s].size()) {
      throw InputError("preference_count", std::string("expected one preference list per ") +
                                               side_name(side));
    }
    for (AgentIndex i = 0; i < agents_[s].size(); ++i) {
      const Agent& a = agents_[s][i];
      if (a.id.empty()) throw InputError("empty_id", "agent ids must be non-empty");
      if (a.quota < 1) {
        throw InputError("quota", "agent '" + a.id + "' has quota " + std::to_string(a.quota) +
                                      "; quotas must be at least 1");
      }
      if (!index_.emplace(a.id, AgentRef{side, i}).second) {
        throw InputError("duplicate_id", "agent id '" + a.id + "' is used more than once");
      }
    }
  }

  for (Side side : {Side::Proposing, Side::Receiving}) {
    const auto s = side_slot(side);
    const auto& others = agents_[side_slot(opposite(side))];
    rank_[s].assign(agents_[s].size(), std::vector<std::uint32_t>(others.size(), kUnlisted));
    for (AgentIndex i = 0; i < agents_[s].size(); ++i) {
      auto& classes = prefs_[s][i];
      auto& ranks = rank_[s][i];
      for (std::uint32_t c = 0; c < classes.size(); ++c) {
        auto& cls = classes[c];
        if (cls.empty()) {
          throw InputError("empty_class",
                           "agent '" + agents_[s][i].id + "' has an empty indifference class");
        }
        for (AgentIndex member : cls) {
          if (member >= others.size()) {
            throw InputError("unknown_agent", "agent '" + agents_[s][i].id +
                                                  "' ranks an agent outside the opposite side");
          }
          if (ranks[member] != kUnlisted) {
            throw InputError("repeated_entry", "agent '" + agents_[s][i].id + "' lists '" +
                                                   others[member].id + "' more than once");
          }
          ranks[member] = c;
        }
        std::sort(cls.begin(), cls.end(),
                  [&](AgentIndex a, AgentIndex b) { return others[a].id < others[b].id; });
      }
    }
  }
}

PolyMarket PolyMarket::from_spec(const MarketSpec& spec) {
  std::unordered_map<std::string, AgentRef> lookup;
  for (Side side : {Side::Proposing, Side::Receiving}) {
    const auto& list = side == Side::Proposing ? spec.proposers : spec.receivers;
    for (AgentIndex i = 0; i < list.size(); ++i) {
      if (!lookup.emplace(list[i].id, AgentRef{side, i}).second) {
        throw InputError("duplicate_id", "agent id '" + list[i].id + "' is used more than once");
      }
    }
  }

  std::vector<RankedClasses> proposer_prefs(spec.proposers.size());
  std::vector<RankedClasses> receiver_prefs(spec.receivers.size());
  for (const auto& [owner, classes] : spec.preferences) {
    auto it = lookup.find(owner);
    if (it == lookup.end()) {
      throw InputError("unknown_agent", "preferences given for unknown agent '" + owner + "'");
    }
    const AgentRef ref = it->second;
    RankedClasses ranked;
    ranked.reserve(classes.size());
    for (const auto& cls : classes) {
      std::vector<AgentIndex> members;
      members.reserve(cls.size());
      for (const auto& key : cls) {
        if (key == owner) {
          throw InputError("self_in_list", "agent '" + owner +
                                               "' lists itself; the self cutoff is implicit");
        }
        auto m = lookup.find(key);
        if (m == lookup.end()) {
          throw InputError("unknown_agent", "agent '" + owner + "' lists unknown agent '" + key + "'");
        }
        if (m->second.side == ref.side) {
          throw InputError("same_side", "agent '" + owner + "' lists '" + key +
                                            "' from its own side");
        }
        members.push_back(m->second.index);
      }
      ranked.push_back(std::move(members));
    }
    (ref.side == Side::Proposing ? proposer_prefs : receiver_prefs)[ref.index] = std::move(ranked);
  }
  return PolyMarket(spec.proposers, spec.receivers, std::move(proposer_prefs),
                    std::move(receiver_prefs));
}

MarketSpec PolyMarket::to_spec() const {
  MarketSpec spec;
  spec.proposers = agents(Side::Proposing);
  spec.receivers = agents(Side::Receiving);
  for (Side side : {Side::Proposing, Side::Receiving}) {
    for (AgentIndex i = 0; i < size(side); ++i) {
      auto list = preference_list({side, i});
      spec.preferences.emplace(list.owner, std::move(list.classes));
    }
  }
  return spec;
}

std::optional<AgentRef> PolyMarket::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

AgentRef PolyMarket::require(std::string_view key) const {
  if (auto ref = find(key)) return *ref;
  throw InputError("unknown_agent", "unknown agent '" + std::string(key) + "'");
}

std::size_t PolyMarket::rank(AgentRef agent, AgentIndex partner) const {
  const std::size_t self = self_rank(agent);
  if (partner == kSelf) return self;
  const auto& ranks = rank_[side_slot(agent.side)][agent.index];
  if (partner >= ranks.size() || ranks[partner] == kUnlisted) return self + 1;
  return ranks[partner];
}

bool PolyMarket::is_strict() const {
  for (const auto& side : prefs_) {
    for (const auto& classes : side) {
      for (const auto& cls : classes) {
        if (cls.size() != 1) return false;
      }
    }
  }
  return true;
}

std::string PolyMarket::key_of(Side side, AgentIndex index) const {
  return agents_[side_slot(side)].at(index).id;
}

PreferenceList PolyMarket::preference_list(AgentRef ref) const {
  PreferenceList list{agent(ref).id, {}};
  const auto& others = agents(opposite(ref.side));
  for (const auto& cls : classes(ref)) {
    IndifferenceClass keys;
    keys.reserve(cls.size());
    for (AgentIndex m : cls) keys.push_back(others[m].id);
    list.classes.push_back(std::move(keys));
  }
  return list;
}

std::weak_ordering prefers(const PolyMarket& market, AgentRef agent, AgentIndex x, AgentIndex y) {
  // Lower rank is better, so the comparison is reversed.
  return market.rank(agent, y) <=> market.rank(agent, x);
}

bool prefers_over_set(const PolyMarket& market, AgentRef agent, AgentIndex x,
                      std::span<const AgentIndex> partners) {
  const std::size_t rx = market.rank(agent, x);
  return std::any_of(partners.begin(), partners.end(),
                     [&](AgentIndex tau) { return rx < market.rank(agent, tau); });
}

Matching::Matching(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
}

bool Matching::contains(Pair pair) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), pair);
}

std::vector<AgentIndex> Matching::partners(AgentRef agent) const {
  std::vector<AgentIndex> out;
  for (const Pair& p : pairs_) {
    if (agent.side == Side::Proposing && p.proposer == agent.index) out.push_back(p.receiver);
    if (agent.side == Side::Receiving && p.receiver == agent.index) out.push_back(p.proposer);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AgentIndex> filled_partners(const PolyMarket& market, const Matching& matching,
                                        AgentRef agent) {
  auto out = matching.partners(agent);
  const auto quota = static_cast<std::size_t>(market.quota(agent));
  if (out.size() < quota) out.resize(quota, kSelf);
  return out;
}

std::vector<AgentIndex> ranked_partners(const PolyMarket& market, const Matching& matching,
                                        AgentRef agent) {
  auto out = filled_partners(market, matching, agent);
  std::stable_sort(out.begin(), out.end(), [&](AgentIndex a, AgentIndex b) {
    return market.rank(agent, a) < market.rank(agent, b);
  });
  return out;
}

}  // namespace polymatch
