#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "mlcoal/exact.hpp"

using namespace mlcoal;
using namespace mlcoal::exact;

namespace {

BigInt factorial(Size n) {
  BigInt r = 1;
  for (Size i = 2; i <= n; ++i) r *= i;
  return r;
}

void for_each_composition(Size total, Size parts, const std::function<void(const std::vector<Size>&)>& visit) {
  std::vector<Size> cur;
  std::function<void(Size, Size)> rec = [&](Size left, Size slots) {
    if (slots == 1) {
      cur.push_back(left);
      visit(cur);
      cur.pop_back();
      return;
    }
    for (Size b = 1; b + slots - 1 <= left; ++b) {
      cur.push_back(b);
      rec(left - b, slots - 1);
      cur.pop_back();
    }
  };
  rec(total, parts);
}

}  // namespace

TEST(Pmk, SmallValues) {
  EXPECT_EQ(p_mk_exact(2, 1), Rational(1));
  EXPECT_EQ(p_mk_exact(3, 1), Rational(1, 3));
  EXPECT_EQ(p_mk_exact(3, 2), Rational(2, 3));
  // m = 4: C(2,k-1) k^{k-1} (4-k)^{2-k} / 16
  EXPECT_EQ(p_mk_exact(4, 1), Rational(3, 16));
  EXPECT_EQ(p_mk_exact(4, 2), Rational(4, 16));
  EXPECT_EQ(p_mk_exact(4, 3), Rational(9, 16));
}

TEST(Pmk, RowsSumToOneExactly) {
  for (Size m = 2; m <= kExactPmkCap; ++m) {
    Rational row = 0;
    for (Size k = 1; k < m; ++k) row += p_mk_exact(m, k);
    EXPECT_EQ(row, 1) << "m=" << m;
  }
}

TEST(Pmk, LogSpaceAgreesWithExact) {
  for (Size m : {5u, 17u, 30u})
    for (Size k = 1; k < m; ++k)
      EXPECT_NEAR(std::exp(log_p_mk(m, k)) / to_double(p_mk_exact(m, k)), 1.0, 1e-11) << m << "," << k;
}

TEST(Pmk, RangeChecks) {
  EXPECT_THROW(p_mk_exact(3, 3), std::out_of_range);
  EXPECT_THROW(p_mk_exact(3, 0), std::out_of_range);
  EXPECT_THROW(p_mk(1, 1), std::out_of_range);
}

TEST(Pmk, EqualsFinalMergePredatorLawOfParking) {
  for (Size m = 2; m <= 7; ++m) {
    const auto law = predator_marginal(enumerate_parking(m).steps[m - 2]);
    for (Size k = 1; k < m; ++k) {
      const auto it = law.find(k);
      EXPECT_EQ(it == law.end() ? Rational(0) : it->second, p_mk_exact(m, k)) << m << "," << k;
    }
  }
}

TEST(Borel, Values) {
  EXPECT_NEAR(borel_pmf(1), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(borel_pmf(2), std::exp(-2.0), 1e-16);
  EXPECT_NEAR(borel_pmf(3), 1.5 * std::exp(-3.0), 1e-16);
  EXPECT_THROW(borel_pmf(0), std::out_of_range);
  // the two evaluation branches meet smoothly
  const double d = 99.0;
  const double direct = std::exp((d - 1) * std::log(d) - d - std::lgamma(d + 1));
  EXPECT_NEAR(borel_pmf(99) / direct, 1.0, 1e-12);
  EXPECT_NEAR(borel_pmf(100) / borel_pmf(99), std::pow(100.0 / 99.0, 98) * std::exp(-1.0), 1e-12);
}

TEST(Borel, MassIsOne) {
  // k^{-3/2} tail: sum to K and add the Euler-Maclaurin tail of the Stirling expansion
  constexpr Size K = 1'000'000;
  double sum = 0.0;
  for (Size k = K; k >= 1; --k) sum += borel_pmf(k);
  const double c = 1 / std::sqrt(2 * std::numbers::pi), x = double(K);
  auto g = [&](double v) { return c * (std::pow(v, -1.5) - std::pow(v, -2.5) / 12 + std::pow(v, -3.5) / 288); };
  const double integral = c * (2 * std::pow(x, -0.5) - std::pow(x, -1.5) / 18 + std::pow(x, -2.5) / 720);
  const double tail = integral - g(x) / 2 + 1.5 * c * std::pow(x, -2.5) / 12;
  EXPECT_NEAR(sum + tail, 1.0, 1e-9);
}

TEST(Borel, LimitOfFinalMergePrey) {
  constexpr Size m = 10000;
  for (Size k = 1; k <= 10; ++k) EXPECT_LT(std::abs(p_mk(m, m - k) - borel_pmf(k)), 1e-3) << k;
}

TEST(Enumeration, TwoAndThreeParticles) {
  const auto p2 = enumerate_parking(2);
  EXPECT_EQ(p2.configurations, 2);
  ASSERT_EQ(p2.sequences.size(), 1u);
  EXPECT_EQ(p2.sequences.begin()->second, 1);
  const auto p3 = enumerate_parking(3);
  EXPECT_EQ(p3.configurations, 9);
  EXPECT_EQ(predator_marginal(p3.steps[1]).at(2), Rational(2, 3));
  const auto t3 = enumerate_spanning_trees(3);
  EXPECT_EQ(t3.configurations, 6);
  EXPECT_EQ(predator_marginal(t3.steps[1]).at(2), Rational(2, 3));
}

TEST(Enumeration, ConfigurationCounts) {
  for (Size n = 2; n <= 6; ++n) {
    EXPECT_EQ(enumerate_parking(n).configurations, ipow(n, n - 1));
    EXPECT_EQ(enumerate_spanning_trees(n).configurations, ipow(n, n - 2) * factorial(n - 1));
  }
}

TEST(Enumeration, CapsAreEnforced) {
  EXPECT_THROW(enumerate_parking(kParkingCap + 1), std::out_of_range);
  EXPECT_THROW(enumerate_parking(1), std::out_of_range);
  EXPECT_THROW(enumerate_spanning_trees(kTreeCap + 1), std::out_of_range);
  EXPECT_THROW(partition_dp(kDpCap + 1), std::out_of_range);
  EXPECT_THROW(sequence_distribution_dp(kTreeCap + 1), std::out_of_range);
  EXPECT_THROW(enumerate_block_vectors(kParkingCap + 1, 2), std::out_of_range);
}

TEST(Enumeration, ThreeRoutesGiveTheSameSequenceLaw) {
  for (Size n = 2; n <= 6; ++n) {
    const auto parking = enumerate_parking(n).sequences;
    const auto trees = enumerate_spanning_trees(n).sequences;
    const auto chain = sequence_distribution_dp(n);
    Rational mass = 0;
    for (const auto& [key, p] : chain) mass += p;
    EXPECT_EQ(mass, 1);
    EXPECT_EQ(total_variation(parking, trees), 0) << n;
    EXPECT_EQ(total_variation(parking, chain), 0) << n;
    EXPECT_EQ(total_variation(trees, chain), 0) << n;
  }
}

TEST(Enumeration, TotalVariationOfDisjointLaws) {
  SequenceDistribution a{{1, Rational(1)}}, b{{2, Rational(1)}}, c{{1, Rational(1, 2)}, {2, Rational(1, 2)}};
  EXPECT_EQ(total_variation(a, b), 1);
  EXPECT_EQ(total_variation(a, c), Rational(1, 2));
  EXPECT_EQ(total_variation(a, a), 0);
}

TEST(Enumeration, PerStepLawsMatchPartitionDp) {
  for (Size n = 2; n <= 7; ++n) {
    const auto dp = partition_dp(n);
    const auto parking = enumerate_parking(n);
    for (Size k = 0; k + 1 < n; ++k) EXPECT_EQ(parking.steps[k].predator_prey, dp.steps[k].predator_prey) << n;
    if (n <= kTreeCap) {
      const auto trees = enumerate_spanning_trees(n);
      for (Size k = 0; k + 1 < n; ++k) EXPECT_EQ(trees.steps[k].predator_prey, dp.steps[k].predator_prey) << n;
    }
  }
}

TEST(PartitionDp, ExpectedPreyGivenPredator) {
  // E[R_k | L_k = l] = (n - l)/(n - k)
  for (Size n = 2; n <= 12; ++n)
    for (const auto& [key, value] : conditional_prey_means(partition_dp(n).steps))
      EXPECT_EQ(value, Rational(n - key.second, n - key.first)) << "n=" << n << " k=" << key.first;
  for (Size n = 2; n <= 6; ++n)
    for (const auto& [key, value] : conditional_prey_means(enumerate_parking(n).steps))
      EXPECT_EQ(value, Rational(n - key.second, n - key.first));
}

TEST(PartitionDp, StepLawsAreProbabilities) {
  const auto dp = partition_dp(kDpCap);
  for (const auto& step : dp.steps) {
    Rational mass = 0;
    for (const auto& [lr, p] : step.predator_prey) mass += p;
    EXPECT_EQ(mass, 1);
  }
  // the last merge ends the process
  for (const auto& [lr, p] : dp.steps.back().predator_prey) EXPECT_EQ(lr.first + lr.second, kDpCap);
}

TEST(PartitionDp, ConditionalCostsReproduceExpectedCosts) {
  for (Size n = 2; n <= 10; ++n) {
    const auto dp = partition_dp(n);
    for (Functional f : kAllFunctionals) {
      for (Size k = 0; k + 1 < n; ++k) {
        Rational e = 0;
        for (const auto& [lr, p] : dp.steps[k].predator_prey) e += p * conditional_cost_exact(f, lr.first, lr.second);
        EXPECT_EQ(e, dp.expected_cost.at(f)[k]) << to_string(f) << " n=" << n << " k=" << k;
      }
    }
  }
}

TEST(PartitionDp, CumulativeIsRunningSum) {
  const auto dp = partition_dp(8);
  for (Functional f : kAllFunctionals) {
    Rational run = 0;
    for (Size k = 0; k < 7; ++k) {
      run += dp.expected_cost.at(f)[k];
      EXPECT_EQ(dp.cumulative.at(f)[k], run);
    }
  }
}

TEST(BlockCount, TwoPlacesOneCar) { EXPECT_EQ(block_config_count(2, 1, {1, 1}), 2); }

TEST(BlockCount, InfeasibleVectorsCountZero) {
  EXPECT_EQ(block_config_count(5, 2, {1, 1, 1}), 0);      // sums to 3
  EXPECT_EQ(block_config_count(5, 2, {2, 2, 1, 0}), 0);   // wrong length
  EXPECT_EQ(block_config_count(5, 2, {0, 3, 2, 0}), 0);
  EXPECT_THROW(block_config_count(5, 5, {5}), std::out_of_range);
}

TEST(BlockCount, CompletenessOverAllBlockVectors) {
  for (Size n = 2; n <= 7; ++n) {
    for (Size k = 1; k < n; ++k) {
      BigInt total = 0;
      for_each_composition(n, n - k + 1, [&](const std::vector<Size>& b) { total += block_config_count(n, k, b); });
      EXPECT_EQ(total, ipow(n, k)) << "n=" << n << " k=" << k;
    }
  }
}

TEST(BlockCount, AgreesWithEnumeration) {
  for (Size n = 2; n <= 6; ++n) {
    for (Size k = 1; k < n; ++k) {
      const auto counted = enumerate_block_vectors(n, k);
      for (const auto& [blocks, count] : counted) EXPECT_EQ(block_config_count(n, k, blocks), count);
      for_each_composition(n, n - k + 1, [&](const std::vector<Size>& b) {
        if (!counted.contains(b)) EXPECT_EQ(block_config_count(n, k, b), 0);
      });
    }
  }
}

TEST(BlockCount, ExchangeableAfterTheAnchoredBlock) {
  const std::vector<Size> base{3, 1, 4, 2, 1};
  const Size n = 11, k = n - base.size() + 1;
  const BigInt ref = block_config_count(n, k, base);
  std::vector<Size> rest(base.begin() + 1, base.end());
  std::sort(rest.begin(), rest.end());
  do {
    std::vector<Size> b{base[0]};
    b.insert(b.end(), rest.begin(), rest.end());
    EXPECT_EQ(block_config_count(n, k, b), ref);
  } while (std::next_permutation(rest.begin(), rest.end()));
}
