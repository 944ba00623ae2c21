#include "polymatch/gale_shapley.hpp"

#include "polymatch/errors.hpp"
#include "polymatch/tie_breaking.hpp"

namespace polymatch {

GsResult gale_shapley(const PolyMarket& market, TieBreakSeed seed) {
  for (Side side : {Side::Proposing, Side::Receiving}) {
    for (const Agent& a : market.agents(side)) {
      if (a.quota != 1) {
        throw InputError("quota_not_one", "gale_shapley needs all quotas equal to 1, '" + a.id +
                                              "' has " + std::to_string(a.quota));
      }
    }
  }
  const PolyMarket strict = break_ties(market, seed);
  const auto np = strict.size(Side::Proposing);
  const auto nr = strict.size(Side::Receiving);

  std::vector<std::size_t> next(np, 0);
  std::vector<AgentIndex> engaged_to(nr, kSelf);
  std::vector<AgentIndex> free_men;
  for (AgentIndex m = np; m-- > 0;) free_men.push_back(m);

  std::size_t proposals = 0;
  while (!free_men.empty()) {
    const AgentIndex m = free_men.back();
    const auto& list = strict.classes({Side::Proposing, m});
    if (next[m] == list.size()) {
      free_men.pop_back();  // stays single
      continue;
    }
    const AgentIndex w = list[next[m]++].front();
    ++proposals;
    const AgentRef wref{Side::Receiving, w};
    const AgentIndex current = engaged_to[w];
    if (strict.rank(wref, m) < strict.rank(wref, current)) {
      engaged_to[w] = m;
      free_men.pop_back();
      if (current != kSelf) free_men.push_back(current);
    }
  }

  std::vector<Pair> pairs;
  for (AgentIndex w = 0; w < nr; ++w) {
    if (engaged_to[w] != kSelf) pairs.push_back({engaged_to[w], w});
  }
  return {Matching(std::move(pairs)), seed, proposals};
}

}  // namespace polymatch
