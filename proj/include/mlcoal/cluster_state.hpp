#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlcoal/disjoint_sets.hpp"
#include "mlcoal/merge_event.hpp"
#include "mlcoal/rng.hpp"

namespace mlcoal {

/// Partition of n unit particles, with a dense index of live roots so that a
/// uniform cluster can be drawn in O(1).
class ClusterState {
 public:
  explicit ClusterState(Size n) : sets_(n), roots_(n), slot_(n) {
    if (n == 0) throw std::invalid_argument("ClusterState: n must be positive");
    for (Size i = 0; i < n; ++i) {
      roots_[i] = i;
      slot_[i] = i;
    }
  }

  Size n() const { return sets_.elements(); }
  Size clusters() const { return roots_.size(); }
  Size merges() const { return n() - clusters(); }
  Size largest() const { return largest_; }
  std::span<const Size> roots() const { return roots_; }
  Size root_size(Size root) const { return sets_.root_size(root); }
  Size find(Size element) { return sets_.find(element); }

  /// Merges the live roots `predator` and `prey`; returns the event (u, D unset).
  MergeEvent merge(Size predator, Size prey) {
    const Size big = sets_.root_size(predator);
    const Size small = sets_.root_size(prey);
    const Size kept = sets_.unite_roots(predator, prey);
    drop_root(kept == predator ? prey : predator);
    largest_ = std::max(largest_, big + small);
    return make_event(merges(), big, small, 0.0, 0);
  }

 private:
  void drop_root(Size root) {
    const Size pos = slot_[root];
    const Size last = roots_.back();
    roots_[pos] = last;
    slot_[last] = pos;
    roots_.pop_back();
  }

  DisjointSets sets_;
  std::vector<Size> roots_;
  std::vector<Size> slot_;  // position of a live root inside roots_
  Size largest_ = 1;
};

inline ClusterState new_monodisperse(Size n) { return ClusterState(n); }

/// One step of the predator/prey chain: size-biased predator (uniform element,
/// then its root), uniform prey among the remaining roots.
inline MergeEvent step_direct(ClusterState& state, Rng& rng) {
  const Size live = state.clusters();
  if (live < 2) throw std::logic_error("step_direct: a single cluster cannot merge");
  const Size predator = state.find(rng.below(state.n()));
  // Draw among the live-1 slots that skip the predator's slot.
  auto roots = state.roots();
  Size j = rng.below(live - 1);
  if (roots[j] == predator) j = live - 1;
  const Size prey = roots[j];
  MergeEvent e = state.merge(predator, prey);
  e.coin = rng.uniform01();
  e.displacement = floor_displacement(rng.uniform01(), e.predator);
  return e;
}

inline Size largest_cluster(const ClusterState& state) { return state.largest(); }

/// size -> number of clusters of that size.
inline std::map<Size, Size> cluster_spectrum(const ClusterState& state) {
  std::map<Size, Size> spectrum;
  for (Size r : state.roots()) ++spectrum[state.root_size(r)];
  return spectrum;
}

}  // namespace mlcoal
