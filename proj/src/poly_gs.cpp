#include "polymatch/poly_gs.hpp"

#include <algorithm>
#include <deque>
#include <utility>

#include "polymatch/errors.hpp"
#include "polymatch/tie_breaking.hpp"

namespace polymatch {

namespace {

// Held partners of one receiver as a max-heap on strict rank: the top is the
// weakest match. Self-fills sit at the self rank.
using Held = std::pair<std::size_t, AgentIndex>;

class ProposerQueue {
 public:
  ProposerQueue(std::size_t n, const GsOptions& options)
      : queued_(n, false), schedule_(options.schedule), rng_(options.schedule_seed) {}

  void push(AgentIndex m) {
    if (queued_[m]) return;
    queued_[m] = true;
    items_.push_back(m);
  }

  bool empty() const { return items_.empty(); }

  AgentIndex take() {
    AgentIndex m;
    switch (schedule_) {
      case Schedule::Fifo:
        m = items_.front();
        items_.pop_front();
        break;
      case Schedule::Lifo:
        m = items_.back();
        items_.pop_back();
        break;
      case Schedule::Random: {
        const auto j = static_cast<std::size_t>(rng_.below(items_.size()));
        std::swap(items_[j], items_.back());
        m = items_.back();
        items_.pop_back();
        break;
      }
    }
    queued_[m] = false;
    return m;
  }

 private:
  std::deque<AgentIndex> items_;
  std::vector<bool> queued_;
  Schedule schedule_;
  Rng rng_;
};

}  // namespace

GsResult deferred_acceptance(const PolyMarket& market, const GsOptions& options) {
  if (!market.is_strict()) {
    throw InputError("not_strict", "deferred_acceptance needs strict preferences");
  }
  const auto np = market.size(Side::Proposing);
  const auto nr = market.size(Side::Receiving);

  std::vector<std::size_t> cursor(np, 0);
  std::vector<int> held_count(np, 0);
  std::vector<int> self_count(np, 0);
  std::vector<std::vector<Held>> held(nr);
  for (AgentIndex w = 0; w < nr; ++w) {
    const AgentRef ref{Side::Receiving, w};
    held[w].assign(static_cast<std::size_t>(market.quota(ref)), Held{market.self_rank(ref), kSelf});
  }

  auto spare = [&](AgentIndex m) {
    return market.quota({Side::Proposing, m}) - held_count[m] - self_count[m];
  };
  auto emit = [&](TraceEvent::Kind kind, AgentIndex m, AgentIndex w, AgentIndex displaced) {
    if (options.trace) options.trace({kind, m, w, displaced, held[w].front().first});
  };

  ProposerQueue queue(np, options);
  for (AgentIndex m = 0; m < np; ++m) queue.push(m);

  std::size_t proposals = 0;
  while (!queue.empty()) {
    const AgentIndex m = queue.take();
    const AgentRef mref{Side::Proposing, m};
    if (spare(m) <= 0) continue;

    const auto& list = market.classes(mref);
    if (cursor[m] >= list.size()) {
      // Every acceptable receiver has been tried: the rest are self-matches.
      self_count[m] += spare(m);
      continue;
    }
    const AgentIndex w = list[cursor[m]++].front();
    ++proposals;
    emit(TraceEvent::Kind::Propose, m, w, kSelf);

    auto& heap = held[w];
    const std::size_t r = market.rank({Side::Receiving, w}, m);
    if (r < heap.front().first) {
      std::pop_heap(heap.begin(), heap.end());
      const AgentIndex displaced = heap.back().second;
      heap.back() = {r, m};
      std::push_heap(heap.begin(), heap.end());
      ++held_count[m];
      emit(TraceEvent::Kind::Accept, m, w, kSelf);
      emit(TraceEvent::Kind::Displace, m, w, displaced);
      if (displaced != kSelf) {
        --held_count[displaced];
        queue.push(displaced);
      }
    } else {
      emit(TraceEvent::Kind::Reject, m, w, kSelf);
    }
    if (spare(m) > 0) queue.push(m);
  }

  std::vector<Pair> pairs;
  for (AgentIndex w = 0; w < nr; ++w) {
    for (const auto& [rank, m] : held[w]) {
      if (m != kSelf) pairs.push_back({m, w});
    }
  }
  return {Matching(std::move(pairs)), {}, proposals};
}

GsResult poly_gs(const PolyMarket& market, TieBreakSeed seed, const GsOptions& options) {
  GsResult result = deferred_acceptance(break_ties(market, seed), options);
  result.seed = seed;
  return result;
}

const char* to_string(TraceEvent::Kind kind) {
  switch (kind) {
    case TraceEvent::Kind::Propose:
      return "propose";
    case TraceEvent::Kind::Accept:
      return "accept";
    case TraceEvent::Kind::Reject:
      return "reject";
    case TraceEvent::Kind::Displace:
      return "displace";
  }
  return "unknown";
}

}  // namespace polymatch
