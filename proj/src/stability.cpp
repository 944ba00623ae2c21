#include "polymatch/stability.hpp"

#include <algorithm>

#include "polymatch/errors.hpp"

namespace polymatch {

namespace {

struct Weakest {
  AgentIndex partner = kSelf;
  std::size_t rank = 0;
};

// Weakest member of the capacity-filled partner set.
Weakest weakest_of(const PolyMarket& market, AgentRef agent,
                   const std::vector<AgentIndex>& partners) {
  Weakest w{kSelf, 0};
  bool any = false;
  if (partners.size() < static_cast<std::size_t>(market.quota(agent))) {
    w = {kSelf, market.self_rank(agent)};
    any = true;
  }
  for (AgentIndex p : partners) {
    const std::size_t r = market.rank(agent, p);
    if (!any || r > w.rank) {
      w = {p, r};
      any = true;
    }
  }
  return w;
}

}  // namespace

std::vector<Violation> violations(const PolyMarket& market, const Matching& matching) {
  std::vector<Violation> out;
  const auto np = market.size(Side::Proposing);
  const auto nr = market.size(Side::Receiving);
  std::vector<int> degree_p(np, 0);
  std::vector<int> degree_r(nr, 0);
  const auto& pairs = matching.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Pair& p = pairs[i];
    if (p.proposer >= np || p.receiver >= nr) {
      out.push_back({"unknown_agent", "pair references an agent outside the market"});
      continue;
    }
    if (i > 0 && pairs[i - 1] == p) {
      out.push_back({"duplicate_pair", "pair (" + market.key_of(Side::Proposing, p.proposer) +
                                           ", " + market.key_of(Side::Receiving, p.receiver) +
                                           ") is matched more than once"});
    }
    ++degree_p[p.proposer];
    ++degree_r[p.receiver];
  }
  for (Side side : {Side::Proposing, Side::Receiving}) {
    const auto& degree = side == Side::Proposing ? degree_p : degree_r;
    for (AgentIndex i = 0; i < degree.size(); ++i) {
      const int q = market.quota({side, i});
      if (degree[i] > q) {
        out.push_back({"quota", "agent '" + market.key_of(side, i) + "' holds " +
                                    std::to_string(degree[i]) + " partners but has quota " +
                                    std::to_string(q)});
      }
    }
  }
  return out;
}

std::vector<BlockingPair> find_blocking_pairs(const PolyMarket& market, const Matching& matching) {
  if (auto v = violations(market, matching); !v.empty()) {
    throw InputError("invalid_matching", "matching is not valid: " + v.front().detail);
  }
  const auto np = market.size(Side::Proposing);
  const auto nr = market.size(Side::Receiving);
  std::vector<std::vector<AgentIndex>> held_p(np), held_r(nr);
  for (const Pair& p : matching.pairs()) {
    held_p[p.proposer].push_back(p.receiver);
    held_r[p.receiver].push_back(p.proposer);
  }
  std::vector<Weakest> weak_p(np), weak_r(nr);
  for (AgentIndex m = 0; m < np; ++m) weak_p[m] = weakest_of(market, {Side::Proposing, m}, held_p[m]);
  for (AgentIndex w = 0; w < nr; ++w) weak_r[w] = weakest_of(market, {Side::Receiving, w}, held_r[w]);

  std::vector<BlockingPair> out;
  for (Side side : {Side::Proposing, Side::Receiving}) {
    const auto& weak = side == Side::Proposing ? weak_p : weak_r;
    for (AgentIndex i = 0; i < weak.size(); ++i) {
      const AgentRef ref{side, i};
      if (market.self_rank(ref) < weak[i].rank) {
        out.push_back({ref, ref, weak[i].partner, weak[i].partner});
      }
    }
  }
  for (AgentIndex m = 0; m < np; ++m) {
    const AgentRef mref{Side::Proposing, m};
    for (AgentIndex w = 0; w < nr; ++w) {
      const AgentRef wref{Side::Receiving, w};
      if (market.rank(mref, w) >= weak_p[m].rank) continue;
      if (market.rank(wref, m) >= weak_r[w].rank) continue;
      if (std::find(held_p[m].begin(), held_p[m].end(), w) != held_p[m].end()) continue;
      out.push_back({mref, wref, weak_p[m].partner, weak_r[w].partner});
    }
  }
  return out;
}

std::string describe(const PolyMarket& market, const BlockingPair& pair) {
  auto name = [&](AgentRef owner, AgentIndex partner) {
    return partner == kSelf ? market.agent(owner).id + "(self)"
                            : market.key_of(opposite(owner.side), partner);
  };
  if (pair.individual_rationality()) {
    return "(" + market.agent(pair.first).id + ", " + market.agent(pair.first).id +
           "): holds unacceptable partner " + name(pair.first, pair.first_leaves);
  }
  return "(" + market.agent(pair.first).id + ", " + market.agent(pair.second).id + "): " +
         market.agent(pair.first).id + " would drop " + name(pair.first, pair.first_leaves) +
         ", " + market.agent(pair.second).id + " would drop " +
         name(pair.second, pair.second_leaves);
}

}  // namespace polymatch
