#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mlcoal/disjoint_sets.hpp"

namespace mlcoal {

/// One coalescence of the additive Marcus-Lushnikov chain.
///
/// `predator` is the size-biased pick among the two merged clusters and
/// `prey` the other one, so {predator, prey} == {smaller, larger}.
struct MergeEvent {
  Size step = 0;          ///< 1-based merge index k.
  Size smaller = 0;       ///< s, the smaller merged size.
  Size larger = 0;        ///< S >= s.
  Size predator = 0;      ///< L, size-biased pick.
  Size prey = 0;          ///< R = s + S - L.
  double coin = 0.0;      ///< Auxiliary uniform u in [0,1).
  Size displacement = 0;  ///< D in {0, ..., L-1}.

  friend bool operator==(const MergeEvent&, const MergeEvent&) = default;
};

inline MergeEvent make_event(Size step, Size predator, Size prey, double coin, Size displacement) {
  return MergeEvent{step, std::min(predator, prey), std::max(predator, prey), predator, prey, coin,
                    displacement};
}

/// D = floor(u' L) for an auxiliary uniform u'.
inline Size floor_displacement(double u, Size predator) {
  auto d = static_cast<Size>(std::floor(u * static_cast<double>(predator)));
  return std::min(d, predator - 1);
}

/// Checks the event-level invariants against a population of n.
inline bool is_valid_event(const MergeEvent& e, Size n) {
  return e.smaller >= 1 && e.smaller <= e.larger && e.smaller + e.larger <= n &&
         e.predator + e.prey == e.smaller + e.larger &&
         (e.predator == e.smaller || e.predator == e.larger) && e.displacement < e.predator &&
         e.coin >= 0.0 && e.coin < 1.0 && e.step >= 1 && e.step < n;
}

enum class EmbeddingKind { DirectChain, SpanningTree, Parking };

inline std::string_view to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::DirectChain: return "direct";
    case EmbeddingKind::SpanningTree: return "tree";
    case EmbeddingKind::Parking: return "parking";
  }
  return "?";
}

inline EmbeddingKind parse_embedding(std::string_view name) {
  if (name == "direct") return EmbeddingKind::DirectChain;
  if (name == "tree") return EmbeddingKind::SpanningTree;
  if (name == "parking") return EmbeddingKind::Parking;
  throw std::invalid_argument("unknown embedding '" + std::string(name) + "'");
}

}  // namespace mlcoal
