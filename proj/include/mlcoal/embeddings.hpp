#pragma once

#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mlcoal/cluster_state.hpp"

namespace mlcoal {

using Edge = std::pair<Size, Size>;

/// Decodes a Pruefer sequence of length n-2 (entries in [0, n)) into the n-1
/// edges of the corresponding labeled tree.
inline std::vector<Edge> prufer_to_edges(std::span<const Size> code, Size n) {
  if (n < 2 || code.size() != n - 2) throw std::invalid_argument("prufer_to_edges: bad length");
  std::vector<Size> degree(n, 1);
  for (Size v : code) {
    if (v >= n) throw std::invalid_argument("prufer_to_edges: label out of range");
    ++degree[v];
  }
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  Size ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  Size leaf = ptr;
  for (Size v : code) {
    edges.emplace_back(leaf, v);
    if (--degree[v] == 1 && v < ptr) {
      leaf = v;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  edges.emplace_back(leaf, n - 1);
  return edges;
}

/// Orients every edge as (bottom, top), bottom being the endpoint closer to `root`.
inline std::vector<Edge> orient_towards_root(const std::vector<Edge>& edges, Size n, Size root = 0) {
  std::vector<std::vector<Size>> adjacent(n);
  for (auto [a, b] : edges) {
    adjacent[a].push_back(b);
    adjacent[b].push_back(a);
  }
  std::vector<Size> parent(n, n);
  parent[root] = root;
  std::queue<Size> frontier;
  frontier.push(root);
  while (!frontier.empty()) {
    const Size v = frontier.front();
    frontier.pop();
    for (Size w : adjacent[v]) {
      if (parent[w] == n) {
        parent[w] = v;
        frontier.push(w);
      }
    }
  }
  std::vector<Edge> oriented;
  oriented.reserve(edges.size());
  for (auto [a, b] : edges) oriented.push_back(parent[b] == a ? Edge{a, b} : Edge{b, a});
  return oriented;
}

/// Inserts oriented edges in order into a forest, reporting one event per edge:
/// L is the bottom component, R the top component.
template <class Sink>
void replay_tree_edges(const std::vector<Edge>& oriented, Size n, Rng* rng, Sink&& sink) {
  DisjointSets forest(n);
  Size step = 0;
  for (auto [bottom, top] : oriented) {
    const Size rb = forest.find(bottom);
    const Size rt = forest.find(top);
    const Size predator = forest.root_size(rb);
    const Size prey = forest.root_size(rt);
    forest.unite_roots(rb, rt);
    double coin = 0.0;
    Size displacement = 0;
    if (rng != nullptr) {
      coin = rng->uniform01();
      displacement = floor_displacement(rng->uniform01(), predator);
    }
    sink(make_event(++step, predator, prey, coin, displacement));
  }
}

/// Circular parking lot; blocks are runs of occupied places closed by their
/// trailing empty place, keyed by that empty place.
class ParkingLot {
 public:
  explicit ParkingLot(Size places) : next_empty_(places), block_(places, 1) {
    for (Size i = 0; i < places; ++i) next_empty_[i] = i;
  }

  Size places() const { return next_empty_.size(); }
  Size cars() const { return cars_; }

  /// Parks the next car at its first empty place clockwise from `first_try`.
  MergeEvent park(Size first_try, double coin) {
    const Size n = places();
    if (cars_ + 1 >= n) throw std::logic_error("ParkingLot: no room for another car");
    const Size spot = find(first_try);
    next_empty_[spot] = spot + 1 == n ? 0 : spot + 1;
    const Size successor = find(spot);
    const Size predator = block_[spot];
    const Size prey = block_[successor];
    block_[successor] += predator;
    ++cars_;
    const Size displacement = spot >= first_try ? spot - first_try : spot + n - first_try;
    return make_event(cars_, predator, prey, coin, displacement);
  }

 private:
  Size find(Size place) {
    while (next_empty_[place] != place) {
      next_empty_[place] = next_empty_[next_empty_[place]];
      place = next_empty_[place];
    }
    return place;
  }

  std::vector<Size> next_empty_;
  std::vector<Size> block_;  // size of the block closed by an empty place
  Size cars_ = 0;
};

template <class Sink>
void run_direct(Size n, Rng& rng, Sink&& sink) {
  ClusterState state(n);
  while (state.clusters() > 1) sink(step_direct(state, rng));
}

template <class Sink>
void run_spanning_tree(Size n, Rng& rng, Sink&& sink) {
  if (n < 2) throw std::invalid_argument("spanning tree embedding needs n >= 2");
  std::vector<Size> code(n - 2);
  for (auto& v : code) v = rng.below(n);
  std::vector<Edge> oriented = orient_towards_root(prufer_to_edges(code, n), n);
  for (Size i = oriented.size(); i > 1; --i) std::swap(oriented[i - 1], oriented[rng.below(i)]);
  replay_tree_edges(oriented, n, &rng, sink);
}

template <class Sink>
void run_parking(Size n, Rng& rng, Sink&& sink) {
  if (n < 2) throw std::invalid_argument("parking embedding needs n >= 2");
  ParkingLot lot(n);
  for (Size car = 1; car < n; ++car) {
    const Size first_try = rng.below(n);
    sink(lot.park(first_try, rng.uniform01()));
  }
}

template <class Sink>
void run_embedding(EmbeddingKind kind, Size n, Rng& rng, Sink&& sink) {
  switch (kind) {
    case EmbeddingKind::DirectChain: run_direct(n, rng, sink); return;
    case EmbeddingKind::SpanningTree: run_spanning_tree(n, rng, sink); return;
    case EmbeddingKind::Parking: run_parking(n, rng, sink); return;
  }
}

inline std::vector<MergeEvent> simulate(EmbeddingKind kind, Size n, Rng& rng) {
  std::vector<MergeEvent> events;
  events.reserve(n > 0 ? n - 1 : 0);
  run_embedding(kind, n, rng, [&](const MergeEvent& e) { events.push_back(e); });
  return events;
}

inline std::vector<MergeEvent> simulate_spanning_tree(Size n, Rng& rng) {
  return simulate(EmbeddingKind::SpanningTree, n, rng);
}

inline std::vector<MergeEvent> simulate_parking(Size n, Rng& rng) {
  return simulate(EmbeddingKind::Parking, n, rng);
}

}  // namespace mlcoal
