#include "polymatch/oracle.hpp"

#include <algorithm>

#include "polymatch/errors.hpp"
#include "polymatch/stability.hpp"

namespace polymatch::oracle {

namespace {

class Enumerator {
 public:
  explicit Enumerator(const PolyMarket& market)
      : market_(market),
        np_(market.size(Side::Proposing)),
        nr_(market.size(Side::Receiving)),
        rows_(np_),
        load_(nr_, 0),
        candidates_(np_) {
    for (AgentIndex m = 0; m < np_; ++m) {
      for (AgentIndex w = 0; w < nr_; ++w) {
        if (market.acceptable({Side::Proposing, m}, w) &&
            market.acceptable({Side::Receiving, w}, m)) {
          candidates_[m].push_back(w);
        }
      }
    }
  }

  std::vector<Matching> run() {
    row(0);
    return std::move(found_);
  }

 private:
  void row(AgentIndex m) {
    if (m == np_) {
      std::vector<Pair> pairs;
      for (AgentIndex p = 0; p < np_; ++p) {
        for (AgentIndex w : rows_[p]) pairs.push_back({p, w});
      }
      Matching mu(std::move(pairs));
      if (is_stable(market_, mu)) found_.push_back(std::move(mu));
      return;
    }
    choose(m, 0);
  }

  // Picks the subset of candidates_[m][from..] that joins rows_[m].
  void choose(AgentIndex m, std::size_t from) {
    if (consistent(m)) row(m + 1);
    const auto quota = static_cast<std::size_t>(market_.quota({Side::Proposing, m}));
    if (rows_[m].size() == quota) return;
    for (std::size_t k = from; k < candidates_[m].size(); ++k) {
      const AgentIndex w = candidates_[m][k];
      if (load_[w] == market_.quota({Side::Receiving, w})) continue;
      rows_[m].push_back(w);
      ++load_[w];
      choose(m, k + 1);
      --load_[w];
      rows_[m].pop_back();
    }
  }

  // Rows 0..m are final. Rejects the branch if some finished proposer m'
  // and receiver w already form a blocking pair, or can only avoid it if w
  // fills up with partners she likes at least as much as m', and too few
  // such proposers remain.
  bool consistent(AgentIndex m) const {
    for (AgentIndex p = 0; p <= m; ++p) {
      const AgentRef pref{Side::Proposing, p};
      std::size_t weakest = rows_[p].size() < static_cast<std::size_t>(market_.quota(pref))
                                ? market_.self_rank(pref)
                                : 0;
      for (AgentIndex w : rows_[p]) weakest = std::max(weakest, market_.rank(pref, w));

      for (AgentIndex w = 0; w < nr_; ++w) {
        if (market_.rank(pref, w) >= weakest) continue;
        if (std::find(rows_[p].begin(), rows_[p].end(), w) != rows_[p].end()) continue;
        const AgentRef wref{Side::Receiving, w};
        const std::size_t rp = market_.rank(wref, p);
        if (rp >= market_.self_rank(wref)) continue;

        for (AgentIndex x = 0; x <= m; ++x) {
          if (market_.rank(wref, x) > rp &&
              std::find(rows_[x].begin(), rows_[x].end(), w) != rows_[x].end()) {
            return false;
          }
        }
        int reachable = load_[w];
        for (AgentIndex x = m + 1; x < np_; ++x) {
          if (market_.rank(wref, x) <= rp &&
              std::find(candidates_[x].begin(), candidates_[x].end(), w) != candidates_[x].end()) {
            ++reachable;
          }
        }
        if (reachable < market_.quota(wref)) return false;
      }
    }
    return true;
  }

  const PolyMarket& market_;
  AgentIndex np_;
  AgentIndex nr_;
  std::vector<std::vector<AgentIndex>> rows_;
  std::vector<int> load_;
  std::vector<std::vector<AgentIndex>> candidates_;
  std::vector<Matching> found_;
};

}  // namespace

std::vector<Matching> enumerate_stable_matchings(const PolyMarket& market, const Guard& guard) {
  const std::size_t product = market.size(Side::Proposing) * market.size(Side::Receiving);
  if (product > guard.max_pair_product) {
    throw SizeError("oracle guard: " + std::to_string(product) + " agent pairs exceed the limit of " +
                    std::to_string(guard.max_pair_product));
  }
  for (Side side : {Side::Proposing, Side::Receiving}) {
    for (const Agent& a : market.agents(side)) {
      if (a.quota > guard.max_quota) {
        throw SizeError("oracle guard: agent '" + a.id + "' has quota " + std::to_string(a.quota) +
                        " above the limit of " + std::to_string(guard.max_quota));
      }
    }
  }
  auto found = Enumerator(market).run();
  std::sort(found.begin(), found.end(),
            [](const Matching& a, const Matching& b) { return a.pairs() < b.pairs(); });
  return found;
}

bool positionwise_dominates(const PolyMarket& market, Side side, const Matching& a,
                            const Matching& b) {
  for (AgentIndex i = 0; i < market.size(side); ++i) {
    const AgentRef ref{side, i};
    const auto ra = ranked_partners(market, a, ref);
    const auto rb = ranked_partners(market, b, ref);
    for (std::size_t k = 0; k < ra.size(); ++k) {
      if (market.rank(ref, ra[k]) > market.rank(ref, rb[k])) return false;
    }
  }
  return true;
}

namespace {

template <typename Beats>
Extremum extremum(std::span<const Matching> matchings, const char* what, Beats beats) {
  if (matchings.empty()) throw InputError("empty_input", "no matchings to compare");
  for (const Matching& candidate : matchings) {
    const bool wins = std::all_of(matchings.begin(), matchings.end(),
                                  [&](const Matching& other) { return beats(candidate, other); });
    if (wins) return {candidate, {}};
  }
  return {std::nullopt, std::string("no ") + what +
                            " element: positionwise dominance fails (non-strict preferences?)"};
}

}  // namespace

Extremum side_optimal(std::span<const Matching> matchings, const PolyMarket& market, Side side) {
  return extremum(matchings, "side-optimal", [&](const Matching& c, const Matching& o) {
    return positionwise_dominates(market, side, c, o);
  });
}

Extremum side_pessimal(std::span<const Matching> matchings, const PolyMarket& market, Side side) {
  return extremum(matchings, "side-pessimal", [&](const Matching& c, const Matching& o) {
    return positionwise_dominates(market, side, o, c);
  });
}

}  // namespace polymatch::oracle
