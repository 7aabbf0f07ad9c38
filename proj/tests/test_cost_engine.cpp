#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "mlcoal/cost.hpp"
#include "mlcoal/embeddings.hpp"
#include "mlcoal/exact.hpp"

using namespace mlcoal;
using exact::Rational;

namespace {

std::shared_ptr<const CheckpointPlan> plan(Size n, std::vector<double> a = default_alpha_grid(),
                                           std::vector<double> b = {}) {
  return std::make_shared<const CheckpointPlan>(n, std::move(a), std::move(b));
}

CostTrace run_trace(Functional f, Size n, std::uint64_t seed, std::shared_ptr<const CheckpointPlan> p,
                    EmbeddingKind kind = EmbeddingKind::DirectChain) {
  CostTrace trace(f, std::move(p));
  Rng rng(seed);
  run_embedding(kind, n, rng, [&](const MergeEvent& e) { trace.accumulate(e); });
  return trace;
}

}  // namespace

TEST(InstantaneousCost, SpecificEvents) {
  // predator 2 eats prey 5
  const MergeEvent e = make_event(1, 2, 5, 0.25, 1);
  EXPECT_EQ(instantaneous_cost(Functional::QFW, e), 2u);
  EXPECT_EQ(instantaneous_cost(Functional::QF, e), 2u);
  EXPECT_EQ(instantaneous_cost(Functional::Prey, e), 5u);
  EXPECT_EQ(instantaneous_cost(Functional::QFB, e), 5u);
  EXPECT_EQ(instantaneous_cost(Functional::Predator, e), 2u);
  EXPECT_EQ(instantaneous_cost(Functional::Displacement, e), 1u);
  MergeEvent heads = e;
  heads.coin = 0.75;
  EXPECT_EQ(instantaneous_cost(Functional::QF, heads), 5u);
  EXPECT_EQ(instantaneous_cost(Functional::Predator, make_event(3, 3, 1, 0.1, 0)), 3u);
  EXPECT_DOUBLE_EQ(conditional_cost(Functional::QF, 2, 5), 3.5);
}

TEST(InstantaneousCost, PerEventIdentities) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    for (const auto& e : simulate(EmbeddingKind::Parking, 300, rng)) {
      const Size s = e.smaller, S = e.larger;
      const Size qf = instantaneous_cost(Functional::QF, e);
      const Size qfw = instantaneous_cost(Functional::QFW, e);
      EXPECT_TRUE(qf == s || qf == S);
      EXPECT_LE(qfw, qf);
      EXPECT_LE(qf, s + S - qfw);
      EXPECT_EQ(instantaneous_cost(Functional::Prey, e), instantaneous_cost(Functional::QFB, e));
      EXPECT_EQ(instantaneous_cost(Functional::Prey, e) + instantaneous_cost(Functional::Predator, e), s + S);
      EXPECT_LT(instantaneous_cost(Functional::Displacement, e), e.predator);
    }
  }
}

TEST(ConditionalCost, MatchesAveragingOverPredatorChoice) {
  // predator is x with probability x/(x+y); coin and u' average out
  for (double x : {1.0, 2.0, 7.0})
    for (double y : {1.0, 3.0, 10.0}) {
      const double px = x / (x + y), py = y / (x + y);
      EXPECT_DOUBLE_EQ(conditional_cost(Functional::Predator, x, y), px * x + py * y);
      EXPECT_DOUBLE_EQ(conditional_cost(Functional::Prey, x, y), px * y + py * x);
      EXPECT_DOUBLE_EQ(conditional_cost(Functional::Displacement, x, y), px * (x - 1) / 2 + py * (y - 1) / 2);
      EXPECT_DOUBLE_EQ(conditional_cost(Functional::QFW, x, y), std::min(x, y));
    }
}

TEST(Functional, NamesRoundTrip) {
  for (Functional f : kAllFunctionals) EXPECT_EQ(parse_functional(to_string(f)), f);
  EXPECT_EQ(parse_functional("qfw"), Functional::QFW);
  EXPECT_THROW(parse_functional("union-by-rank"), std::invalid_argument);
}

TEST(CostTrace, RejectsOutOfOrderAndSurplusEvents) {
  CostTrace t(Functional::QF, plan(4));
  EXPECT_THROW(t.accumulate(make_event(2, 1, 1, 0.1, 0)), std::invalid_argument);
  t.accumulate(make_event(1, 1, 1, 0.1, 0));
  EXPECT_THROW(t.accumulate(make_event(1, 1, 1, 0.1, 0)), std::invalid_argument);
  t.accumulate(make_event(2, 2, 1, 0.1, 0));
  t.accumulate(make_event(3, 3, 1, 0.1, 0));
  EXPECT_TRUE(t.complete());
  EXPECT_THROW(t.accumulate(make_event(4, 1, 1, 0.1, 0)), std::invalid_argument);
}

TEST(CostTrace, FirstEventCostsOne) {
  for (Functional f : kAllFunctionals) {
    CostTrace t(f, plan(10));
    t.accumulate(make_event(1, 1, 1, 0.9, 0));
    EXPECT_EQ(t.total(), f == Functional::Displacement ? 0u : 1u) << to_string(f);
  }
}

TEST(CostTrace, IncompleteTraceHasNoCurve) {
  CostTrace t(Functional::QF, plan(10));
  EXPECT_THROW(partial_cost_curve(t), std::logic_error);
  EXPECT_THROW(w_curve(t), std::logic_error);
}

TEST(Checkpoints, StepConventions) {
  EXPECT_EQ(alpha_step(0.15, 100), 15u);  // ceil(15.000000000000002) must not round up
  EXPECT_EQ(alpha_step(0.0, 100), 0u);
  EXPECT_EQ(alpha_step(0.151, 100), 16u);
  EXPECT_EQ(alpha_step(0.9999, 100), 99u);
  EXPECT_EQ(beta_step(0.0, 100), 99u);
  EXPECT_EQ(beta_step(1.0, 100), 90u);
  EXPECT_EQ(beta_step(50.0, 100), 0u);
  EXPECT_THROW(CheckpointPlan(10, {1.0}, {}), std::invalid_argument);
  EXPECT_THROW(CheckpointPlan(10, {}, {-0.5}), std::invalid_argument);
}

TEST(Checkpoints, CurvesAtTheirBoundaries) {
  constexpr Size n = 400;
  const auto p = plan(n, {0.0, 0.5}, {0.0, 1.0, 2.0, 20.0});
  for (Functional f : kAllFunctionals) {
    const auto t = run_trace(f, n, 5, p);
    const auto partial = partial_cost_curve(t);
    EXPECT_EQ(partial[0].second, 0.0);
    const auto w = w_curve(t);
    EXPECT_DOUBLE_EQ(w[0].second, to_double(t.total()) * std::pow(double(n), -1.5));
    EXPECT_EQ(w[3].second, 0.0);  // beta beyond sqrt(n): no merges yet
    EXPECT_GE(w[0].second, w[1].second);
    EXPECT_GE(w[1].second, w[2].second);
  }
}

TEST(Checkpoints, PartialCostCurveIsNondecreasing) {
  for (Functional f : kAllFunctionals) {
    const auto t = run_trace(f, 2000, 17, plan(2000), EmbeddingKind::Parking);
    const auto curve = partial_cost_curve(t);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_GE(curve[i].second, curve[i - 1].second);
    EXPECT_LE(curve.back().second * 2000, to_double(t.total()));
  }
}

TEST(CostTraceSet, OneStreamFeedsAllFunctionals) {
  const std::vector<Functional> fs(kAllFunctionals.begin(), kAllFunctionals.end());
  CostTraceSet set(plan(50), fs);
  Rng rng(11);
  const auto events = simulate(EmbeddingKind::DirectChain, 50, rng);
  for (const auto& e : events) set.accumulate(e);
  for (const auto& t : set.traces()) {
    CostAccumulator expected = 0;
    for (const auto& e : events) expected += instantaneous_cost(t.functional(), e);
    EXPECT_EQ(t.total(), expected);
  }
}

// Independent route: average realised costs over all n^{n-1} parking histories,
// both coin halves and every u' cell, and compare with the partition DP.
TEST(ExactTotals, ParkingEnumerationAgreesWithPartitionDp) {
  for (Size n = 2; n <= 6; ++n) {
    std::map<Functional, Rational> totals;
    Size configs = 0;
    std::vector<Size> tries(n - 1, 0);
    for (;;) {
      exact::detail::ScanLot lot(n);
      ++configs;
      for (Size car = 0; car + 1 < n; ++car) {
        const auto a = lot.arrive(tries[car]);
        for (Functional f : kAllFunctionals) {
          Rational c = 0;
          // coin below / above 1/2 and u' over L equal cells
          for (double coin : {0.25, 0.75})
            for (Size cell = 0; cell < a.predator; ++cell) {
              const double u = (cell + 0.5) / double(a.predator);
              const MergeEvent e = make_event(car + 1, a.predator, a.prey, coin,
                                              floor_displacement(u, a.predator));
              c += Rational(instantaneous_cost(f, e), 2 * a.predator);
            }
          totals[f] += c;
        }
      }
      Size pos = 0;
      while (pos < tries.size() && ++tries[pos] == n) tries[pos++] = 0;
      if (pos == tries.size()) break;
    }
    const auto dp = exact::partition_dp(n);
    for (Functional f : kAllFunctionals) EXPECT_EQ(totals[f] / configs, dp.total(f)) << to_string(f) << " n=" << n;
  }
}

TEST(ExactTotals, ThreeParticleValues) {
  const auto dp = exact::partition_dp(3);
  EXPECT_EQ(dp.total(Functional::Predator), Rational(8, 3));
  EXPECT_EQ(dp.total(Functional::QFB), Rational(7, 3));
  EXPECT_EQ(dp.total(Functional::Prey), Rational(7, 3));
  EXPECT_EQ(dp.total(Functional::QF), Rational(5, 2));
  EXPECT_EQ(dp.total(Functional::QFW), Rational(2));
  EXPECT_EQ(dp.total(Functional::Displacement), Rational(1, 3));
  const auto two = exact::partition_dp(2);
  for (Functional f : kAllFunctionals)
    EXPECT_EQ(two.total(f), f == Functional::Displacement ? Rational(0) : Rational(1));
}

TEST(ExactTotals, DisplacementGivenPredatorIsUniform) {
  for (Size n = 2; n <= 6; ++n) {
    const auto en = exact::enumerate_parking(n);
    for (const auto& step : en.steps) {
      std::map<Size, Rational> mass;
      for (const auto& [ld, p] : step.predator_displacement) mass[ld.first] += p;
      for (const auto& [ld, p] : step.predator_displacement) {
        EXPECT_EQ(p, mass[ld.first] / ld.first) << "L=" << ld.first << " D=" << ld.second;
        EXPECT_LT(ld.second, ld.first);
      }
    }
  }
}
