#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mlcoal/cost.hpp"
#include "mlcoal/embeddings.hpp"

namespace mlcoal::exact {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr Size kParkingCap = 8;
inline constexpr Size kTreeCap = 6;
inline constexpr Size kDpCap = 20;
inline constexpr Size kExactPmkCap = 30;
static_assert(kParkingCap <= 15 && kTreeCap <= 15, "sequence keys pack sizes into 4 bits");

inline BigInt ipow(Size base, Size exponent) {
  BigInt r = 1;
  for (Size i = 0; i < exponent; ++i) r *= base;
  return r;
}

inline BigInt binomial(Size n, Size k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (Size i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline std::string to_string(const Rational& r) { return r.str(); }
inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// ---------------------------------------------------------------------------
// Closed formulas

inline void check_pmk_range(Size m, Size k) {
  if (m < 2 || k < 1 || k > m - 1) throw std::out_of_range("p_mk: need m >= 2 and 1 <= k <= m-1");
}

/// Probability that the predator of a final merge producing size m had size k:
/// C(m-2, k-1) k^{k-1} (m-k)^{m-k-2} / m^{m-2}.
inline Rational p_mk_exact(Size m, Size k) {
  check_pmk_range(m, k);
  // (m-k)^{m-k-2} is 1^{-1} = 1 when k = m-1.
  const BigInt tail = k == m - 1 ? BigInt(1) : ipow(m - k, m - k - 2);
  return Rational(binomial(m - 2, k - 1) * ipow(k, k - 1) * tail, ipow(m, m - 2));
}

inline double log_p_mk(Size m, Size k) {
  check_pmk_range(m, k);
  const double dm = static_cast<double>(m), dk = static_cast<double>(k);
  const double lchoose = std::lgamma(dm - 1) - std::lgamma(dk) - std::lgamma(dm - dk);
  const double tail = k == m - 1 ? 0.0 : (dm - dk - 2) * std::log(dm - dk);
  return lchoose + (dk - 1) * std::log(dk) + tail - (dm - 2) * std::log(dm);
}

/// Exact below kExactPmkCap, log-space above.
inline double p_mk(Size m, Size k) {
  if (m <= kExactPmkCap) return to_double(p_mk_exact(m, k));
  return std::exp(log_p_mk(m, k));
}

/// Borel(1) mass k^{k-1} e^{-k} / k!.
inline double borel_pmf(Size k) {
  if (k == 0) throw std::out_of_range("borel_pmf: k must be >= 1");
  const double dk = static_cast<double>(k);
  if (k < 100) return std::exp((dk - 1) * std::log(dk) - dk - std::lgamma(dk + 1));
  // Stirling series, which avoids cancelling two O(k log k) terms
  const double r = 1 / dk, r2 = r * r;
  const double tail = r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 / 1680)));
  return std::exp(-1.5 * std::log(dk) - 0.5 * std::log(2 * std::numbers::pi) - tail);
}

/// Number of configurations of k cars on n circular places whose blocks,
/// numbered clockwise from the block receiving the k-th car, have sizes b.
inline BigInt block_config_count(Size n, Size k, const std::vector<Size>& blocks) {
  if (n < 2 || k < 1 || k > n - 1) throw std::out_of_range("block_config_count: need 1 <= k <= n-1");
  if (blocks.size() != n - k + 1) return 0;
  Size total = 0;
  for (Size b : blocks) {
    if (b == 0) return 0;
    total += b;
  }
  if (total != n) return 0;
  // multinomial(k-1; b_0-1, ..., b_{n-k}-1)
  BigInt count = 1;
  Size placed = 0;
  for (Size b : blocks) {
    placed += b - 1;
    count *= binomial(placed, b - 1);
  }
  count *= n * blocks.front();
  for (Size b : blocks)
    if (b >= 2) count *= ipow(b, b - 2);
  return count;
}

// ---------------------------------------------------------------------------
// Event-sequence distributions

/// (s, S, L) of every step, 4 bits each, packed into 128 bits.
using SequenceKey = unsigned __int128;

inline SequenceKey push_event(SequenceKey key, Size smaller, Size larger, Size predator) {
  return (key << 12) | static_cast<SequenceKey>((smaller << 8) | (larger << 4) | predator);
}

using SequenceDistribution = std::map<SequenceKey, Rational>;

/// Exact per-step laws.
struct StepLaw {
  std::map<std::pair<Size, Size>, Rational> predator_prey;          // (L, R)
  std::map<std::pair<Size, Size>, Rational> predator_displacement;  // (L, D), parking only
};

struct ExactEnumeration {
  Size n = 0;
  BigInt configurations = 0;
  SequenceDistribution sequences;
  std::vector<StepLaw> steps;  // steps[k-1]
};

inline Rational total_variation(const SequenceDistribution& a, const SequenceDistribution& b) {
  Rational sum = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += abs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += abs(ib->second);
      ++ib;
    } else {
      sum += abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return sum / 2;
}

namespace detail {

struct Tally {
  explicit Tally(Size n) : n(n), pr(n, std::vector<std::uint64_t>((n + 1) * (n + 1))),
                           pd(n, std::vector<std::uint64_t>((n + 1) * (n + 1))) {}
  Size n;
  std::map<SequenceKey, std::uint64_t> sequences;
  std::vector<std::vector<std::uint64_t>> pr;  // [k-1][L*(n+1)+R]
  std::vector<std::vector<std::uint64_t>> pd;  // [k-1][L*(n+1)+D]
  std::uint64_t total = 0;

  ExactEnumeration finish(bool with_displacement) const {
    ExactEnumeration out;
    out.n = n;
    out.configurations = total;
    for (auto& [key, count] : sequences) out.sequences.emplace(key, Rational(count, total));
    out.steps.resize(n - 1);
    for (Size k = 0; k + 1 < n; ++k) {
      for (Size a = 0; a <= n; ++a) {
        for (Size b = 0; b <= n; ++b) {
          if (auto c = pr[k][a * (n + 1) + b]) out.steps[k].predator_prey[{a, b}] = Rational(c, total);
          if (!with_displacement) continue;
          if (auto c = pd[k][a * (n + 1) + b])
            out.steps[k].predator_displacement[{a, b}] = Rational(c, total);
        }
      }
    }
    return out;
  }
};

/// Plain circular-scan parking, independent of the union-find ParkingLot.
class ScanLot {
 public:
  explicit ScanLot(Size n) : occupied_(n, false) {}
  Size n() const { return occupied_.size(); }

  struct Arrival {
    Size spot, predator, prey, displacement;
  };

  Arrival arrive(Size first_try) {
    const Size places = n();
    Size spot = first_try, displacement = 0;
    while (occupied_[spot]) {
      spot = (spot + 1) % places;
      ++displacement;
    }
    Size predator = 1;
    for (Size p = (spot + places - 1) % places; occupied_[p]; p = (p + places - 1) % places) ++predator;
    Size prey = 1;
    for (Size p = (spot + 1) % places; occupied_[p]; p = (p + 1) % places) ++prey;
    occupied_[spot] = true;
    return {spot, predator, prey, displacement};
  }

  void leave(Size spot) { occupied_[spot] = false; }

  /// Block sizes clockwise, starting with the block that contains `place`.
  std::vector<Size> blocks_from(Size place) const {
    const Size places = n();
    Size first_empty = place;
    while (occupied_[first_empty]) first_empty = (first_empty + 1) % places;
    Size size = 1;
    for (Size p = (first_empty + places - 1) % places; occupied_[p]; p = (p + places - 1) % places) ++size;
    std::vector<Size> sizes{size};
    Size cur = first_empty;
    for (;;) {
      Size next = (cur + 1) % places, gap = 1;
      while (occupied_[next]) {
        next = (next + 1) % places;
        ++gap;
      }
      if (next == first_empty) break;
      sizes.push_back(gap);
      cur = next;
    }
    return sizes;
  }

 private:
  std::vector<bool> occupied_;
};

inline void parking_dfs(ScanLot& lot, Size car, SequenceKey key, Tally& tally) {
  const Size n = lot.n();
  if (car + 1 == n) {
    ++tally.sequences[key];
    ++tally.total;
    return;
  }
  // Each subtree below this car has n^{remaining} leaves; tally marginals per leaf.
  std::uint64_t leaves = 1;
  for (Size i = car + 2; i < n; ++i) leaves *= n;
  for (Size t = 0; t < n; ++t) {
    const auto a = lot.arrive(t);
    tally.pr[car][a.predator * (n + 1) + a.prey] += leaves;
    tally.pd[car][a.predator * (n + 1) + a.displacement] += leaves;
    parking_dfs(lot, car + 1,
                push_event(key, std::min(a.predator, a.prey), std::max(a.predator, a.prey), a.predator),
                tally);
    lot.leave(a.spot);
  }
}

}  // namespace detail

/// All n^{n-1} first-try vectors, replayed by plain circular scan.
inline ExactEnumeration enumerate_parking(Size n) {
  if (n < 2 || n > kParkingCap)
    throw std::out_of_range("enumerate_parking: n must be in [2, " + std::to_string(kParkingCap) + "]");
  detail::Tally tally(n);
  detail::ScanLot lot(n);
  detail::parking_dfs(lot, 0, 0, tally);
  return tally.finish(true);
}

/// Counts configurations of k cars by anchored block vector (blocks before the
/// k-th arrival, starting from the one its first try lands in).
inline std::map<std::vector<Size>, BigInt> enumerate_block_vectors(Size n, Size k) {
  if (n < 2 || n > kParkingCap || k < 1 || k > n - 1)
    throw std::out_of_range("enumerate_block_vectors: need 2 <= n <= cap and 1 <= k <= n-1");
  std::map<std::vector<Size>, BigInt> counts;
  detail::ScanLot lot(n);
  auto dfs = [&](auto&& self, Size car) -> void {
    if (car + 1 == k) {
      for (Size t = 0; t < n; ++t) counts[lot.blocks_from(t)] += 1;
      return;
    }
    for (Size t = 0; t < n; ++t) {
      const auto a = lot.arrive(t);
      self(self, car + 1);
      lot.leave(a.spot);
    }
  };
  dfs(dfs, 0);
  return counts;
}

/// All labeled trees (via Pruefer codes) times all edge orders, rooted at vertex 0.
inline ExactEnumeration enumerate_spanning_trees(Size n) {
  if (n < 2 || n > kTreeCap)
    throw std::out_of_range("enumerate_spanning_trees: n must be in [2, " + std::to_string(kTreeCap) + "]");
  detail::Tally tally(n);
  std::vector<Size> code(n - 2, 0);
  std::vector<Size> order(n - 1);
  for (;;) {
    const auto oriented = orient_towards_root(prufer_to_edges(code, n), n);
    std::iota(order.begin(), order.end(), Size{0});
    do {
      std::vector<Edge> sequence;
      for (Size i : order) sequence.push_back(oriented[i]);
      SequenceKey key = 0;
      replay_tree_edges(sequence, n, nullptr, [&](const MergeEvent& e) {
        tally.pr[e.step - 1][e.predator * (n + 1) + e.prey] += 1;
        key = push_event(key, e.smaller, e.larger, e.predator);
      });
      ++tally.sequences[key];
      ++tally.total;
    } while (std::next_permutation(order.begin(), order.end()));
    // next Pruefer code
    Size pos = 0;
    while (pos < code.size() && ++code[pos] == n) code[pos++] = 0;
    if (pos == code.size()) break;
  }
  return tally.finish(false);
}

// ---------------------------------------------------------------------------
// Partition dynamic programming

using Partition = std::vector<Size>;  // nonincreasing

inline Rational conditional_cost_exact(Functional f, Size x, Size y) {
  const Rational rx(x), ry(y);
  switch (f) {
    case Functional::QF: return (rx + ry) / 2;
    case Functional::QFW: return Rational(std::min(x, y));
    case Functional::QFB:
    case Functional::Prey: return 2 * rx * ry / (rx + ry);
    case Functional::Predator: return (rx * rx + ry * ry) / (rx + ry);
    case Functional::Displacement: return ((rx * rx + ry * ry) / (rx + ry) - 1) / 2;
  }
  return 0;
}

namespace detail {

/// Ordered (predator, prey) value pairs with their transition probabilities
/// x / (n (N-1)), multiplicities included.
template <class Visit>
void for_each_transition(const Partition& part, Size n, Visit&& visit) {
  std::map<Size, Size> mult;
  for (Size x : part) ++mult[x];
  const Size live = part.size();
  for (auto [a, ma] : mult) {
    for (auto [b, mb] : mult) {
      const Size pairs = a == b ? ma * (ma - 1) : ma * mb;
      if (pairs == 0) continue;
      const Rational prob(BigInt(pairs) * a, BigInt(n) * (live - 1));
      Partition next;
      bool a_done = false, b_done = false;
      for (Size x : part) {
        if (!a_done && x == a) { a_done = true; continue; }
        if (!b_done && x == b) { b_done = true; continue; }
        next.push_back(x);
      }
      next.push_back(a + b);
      std::sort(next.begin(), next.end(), std::greater<>());
      visit(a, b, prob, std::move(next));
    }
  }
}

}  // namespace detail

struct PartitionDpResult {
  Size n = 0;
  std::vector<StepLaw> steps;                          // (L, R) law per step
  std::map<Functional, std::vector<Rational>> expected_cost;  // E[cost_k], k = 1..n-1
  std::map<Functional, std::vector<Rational>> cumulative;     // E[C_{n,m}], m = 1..n-1

  Rational total(Functional f) const { return cumulative.at(f).back(); }
};

/// Forward DP over canonical partitions with exact transition probabilities.
inline PartitionDpResult partition_dp(Size n) {
  if (n < 2 || n > kDpCap)
    throw std::out_of_range("partition_dp: n must be in [2, " + std::to_string(kDpCap) + "]");
  PartitionDpResult out;
  out.n = n;
  out.steps.resize(n - 1);
  for (Functional f : kAllFunctionals) {
    out.expected_cost[f].assign(n - 1, 0);
    out.cumulative[f].assign(n - 1, 0);
  }
  std::map<Partition, Rational> states{{Partition(n, 1), Rational(1)}};
  for (Size k = 1; k < n; ++k) {
    std::map<Partition, Rational> next_states;
    auto& law = out.steps[k - 1].predator_prey;
    for (const auto& [part, weight] : states) {
      detail::for_each_transition(part, n, [&](Size a, Size b, const Rational& prob, Partition next) {
        const Rational w = weight * prob;
        law[{a, b}] += w;
        next_states[std::move(next)] += w;
      });
    }
    for (const auto& [lr, w] : law) {
      for (Functional f : kAllFunctionals) {
        // realized costs are functions of (L, R, coin, u'), so condition on (L, R)
        Rational c;
        switch (f) {
          case Functional::QF: c = Rational(lr.first + lr.second, 2); break;
          case Functional::QFW: c = Rational(std::min(lr.first, lr.second)); break;
          case Functional::QFB:
          case Functional::Prey: c = Rational(lr.second); break;
          case Functional::Predator: c = Rational(lr.first); break;
          case Functional::Displacement: c = Rational(lr.first - 1, 2); break;
        }
        out.expected_cost[f][k - 1] += w * c;
      }
    }
    states = std::move(next_states);
  }
  for (Functional f : kAllFunctionals) {
    Rational run = 0;
    for (Size k = 0; k + 1 < n; ++k) out.cumulative[f][k] = run += out.expected_cost[f][k];
  }
  return out;
}

/// Full (s, S, L) sequence law of the chain, by expanding histories (n <= kTreeCap).
inline SequenceDistribution sequence_distribution_dp(Size n) {
  if (n < 2 || n > kTreeCap)
    throw std::out_of_range("sequence_distribution_dp: n must be in [2, " + std::to_string(kTreeCap) + "]");
  std::map<std::pair<Partition, SequenceKey>, Rational> states{{{Partition(n, 1), 0}, Rational(1)}};
  for (Size k = 1; k < n; ++k) {
    std::map<std::pair<Partition, SequenceKey>, Rational> next_states;
    for (const auto& [state, weight] : states) {
      detail::for_each_transition(state.first, n, [&](Size a, Size b, const Rational& prob, Partition next) {
        next_states[{std::move(next), push_event(state.second, std::min(a, b), std::max(a, b), a)}] +=
            weight * prob;
      });
    }
    states = std::move(next_states);
  }
  SequenceDistribution out;
  for (const auto& [state, weight] : states) out[state.second] += weight;
  return out;
}

/// E[R_k | L_k = l] for every reachable (k, l), from a per-step (L, R) law.
inline std::map<std::pair<Size, Size>, Rational> conditional_prey_means(const std::vector<StepLaw>& steps) {
  std::map<std::pair<Size, Size>, Rational> mass, first;
  for (Size k = 1; k <= steps.size(); ++k) {
    for (const auto& [lr, w] : steps[k - 1].predator_prey) {
      mass[{k, lr.first}] += w;
      first[{k, lr.first}] += w * lr.second;
    }
  }
  std::map<std::pair<Size, Size>, Rational> out;
  for (const auto& [key, m] : mass) out[key] = first[key] / m;
  return out;
}

/// Law of the predator size at step k.
inline std::map<Size, Rational> predator_marginal(const StepLaw& law) {
  std::map<Size, Rational> out;
  for (const auto& [lr, w] : law.predator_prey) out[lr.first] += w;
  return out;
}

}  // namespace mlcoal::exact
