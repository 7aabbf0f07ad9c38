#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "mlcoal/config.hpp"
#include "mlcoal/exact.hpp"
#include "mlcoal/experiment.hpp"
#include "mlcoal/smoluchowski.hpp"
#include "mlcoal/table.hpp"

#ifndef MLCOAL_VERSION
#define MLCOAL_VERSION "unknown"
#endif

namespace mlcoal {

inline constexpr const char* kVersion = MLCOAL_VERSION;

inline Size single_n(const RunConfig& cfg) {
  if (cfg.n.size() != 1) throw UsageError("this subcommand takes exactly one --n");
  return cfg.n.front();
}

inline ExperimentSpec experiment_from(const RunConfig& cfg) {
  ExperimentSpec spec;
  spec.n = single_n(cfg);
  if (spec.n < 2) throw UsageError("--n must be at least 2");
  if (cfg.reps < 1) throw UsageError("--reps must be at least 1");
  if (cfg.functionals.empty()) throw UsageError("no functional selected");
  spec.embedding = cfg.embedding;
  spec.functionals = cfg.functionals;
  spec.reps = cfg.reps;
  spec.seed = cfg.seed;
  spec.alphas = cfg.alpha_grid.value_or(default_alpha_grid());
  spec.betas = cfg.beta_grid ? *cfg.beta_grid : default_beta_grid(spec.n);
  spec.workers = cfg.workers;
  spec.raw_path = cfg.raw_out;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

/// Per-checkpoint summaries: terminal totals, alpha rows (C/n) and beta rows (n^{-3/2} C).
inline Table cmd_simulate(const RunConfig& cfg) {
  const ExperimentSpec spec = experiment_from(cfg);
  const MonteCarloResult result = run_monte_carlo(spec);
  Table t{{"seed", "n", "reps", "embedding", "version", "grid", "alpha_or_beta", "functional", "mean", "stderr"}, {}};
  auto prov = [&](std::string grid, double point, Functional f, const SummaryStats& s) {
    t.add({spec.seed, static_cast<std::int64_t>(spec.n),
           static_cast<std::int64_t>(spec.reps), std::string(to_string(spec.embedding)), std::string(kVersion),
           std::move(grid), point, std::string(to_string(f)), s.mean(), s.stderr_mean()});
  };
  for (const auto& s : result.summaries) {
    prov("total", NAN, s.functional, s.total);
    for (std::size_t i = 0; i < spec.alphas.size(); ++i) prov("alpha", spec.alphas[i], s.functional, s.alpha[i]);
    for (std::size_t i = 0; i < spec.betas.size(); ++i) prov("beta", spec.betas[i], s.functional, s.beta[i]);
  }
  return t;
}

/// Limit curves: normalized value, quadrature value and published table value.
inline Table cmd_limit(const RunConfig& cfg) {
  const auto alphas = cfg.alpha_grid.value_or(default_alpha_grid());
  for (double a : alphas)
    if (!(a >= 0.0 && a < 1.0)) throw UsageError("alpha grid must lie in [0, 1)");
  if (!(cfg.tol > 0)) throw UsageError("--tol must be positive");
  smol::QuadratureOptions opts;
  opts.tol = cfg.tol;
  Table t{{"alpha", "functional", "phi_normalized", "phi_quadrature", "phi_paper_table", "quadrature_error_estimate",
           "converged"},
          {}};
  for (Functional f : cfg.functionals) {
    for (double a : alphas) {
      const auto quad = smol::phi_quadrature(f, a, opts);
      const double normalized = smol::phi_closed_form(f, a).value_or(quad.value);
      t.add({a, std::string(to_string(f)), normalized, quad.value, smol::phi_paper_table(f, a).value_or(NAN),
             quad.error_estimate, std::string(quad.converged ? "true" : "false")});
    }
  }
  return t;
}

/// Exact oracle tables: pmk | borel | dp | conditional-r | parking | trees | block-count.
inline Table cmd_exact(const RunConfig& cfg) {
  using namespace exact;
  const Size n = single_n(cfg);
  auto cap = [&](Size lo, Size hi, const char* what) {
    if (n < lo || n > hi)
      throw UsageError(std::string(what) + " supports n in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "], got " + std::to_string(n));
  };
  Table t;
  const std::string& o = cfg.oracle;
  if (o == "pmk") {
    if (n < 2) throw UsageError("pmk needs m = --n >= 2");
    t.columns = {"m", "k", "p_exact", "p_decimal"};
    for (Size k = 1; k < n; ++k) {
      const bool small = n <= kExactPmkCap;
      t.add({static_cast<std::int64_t>(n), static_cast<std::int64_t>(k),
             small ? exact::to_string(p_mk_exact(n, k)) : std::string(), p_mk(n, k)});
    }
  } else if (o == "borel") {
    t.columns = {"k", "borel_pmf"};
    for (Size k = 1; k <= n; ++k) t.add({static_cast<std::int64_t>(k), borel_pmf(k)});
  } else if (o == "dp") {
    cap(2, kDpCap, "dp");
    const auto dp = partition_dp(n);
    t.columns = {"n", "functional", "step", "expected_cost", "expected_cumulative", "expected_cumulative_decimal"};
    for (Functional f : cfg.functionals)
      for (Size k = 1; k < n; ++k)
        t.add({static_cast<std::int64_t>(n), std::string(to_string(f)), static_cast<std::int64_t>(k),
               exact::to_string(dp.expected_cost.at(f)[k - 1]), exact::to_string(dp.cumulative.at(f)[k - 1]),
               exact::to_double(dp.cumulative.at(f)[k - 1])});
  } else if (o == "conditional-r") {
    cap(2, kDpCap, "conditional-r");
    const auto dp = partition_dp(n);
    t.columns = {"n", "step", "predator", "expected_prey", "formula", "match"};
    for (const auto& [key, value] : conditional_prey_means(dp.steps)) {
      const Rational formula(n - key.second, n - key.first);
      t.add({static_cast<std::int64_t>(n), static_cast<std::int64_t>(key.first),
             static_cast<std::int64_t>(key.second), exact::to_string(value), exact::to_string(formula),
             std::string(value == formula ? "true" : "false")});
    }
  } else if (o == "parking" || o == "trees") {
    const auto en = o == "parking" ? (cap(2, kParkingCap, "parking"), enumerate_parking(n))
                                   : (cap(2, kTreeCap, "trees"), enumerate_spanning_trees(n));
    t.columns = {"n", "step", "predator", "prey", "probability", "probability_decimal"};
    for (Size k = 1; k < n; ++k)
      for (const auto& [lr, p] : en.steps[k - 1].predator_prey)
        t.add({static_cast<std::int64_t>(n), static_cast<std::int64_t>(k), static_cast<std::int64_t>(lr.first),
               static_cast<std::int64_t>(lr.second), exact::to_string(p), exact::to_double(p)});
  } else if (o == "block-count") {
    cap(2, kParkingCap, "block-count");
    if (cfg.k < 1 || cfg.k >= n) throw UsageError("block-count needs 1 <= --k <= n-1");
    t.columns = {"n", "k", "blocks", "count_formula", "count_enumerated"};
    for (const auto& [blocks, count] : enumerate_block_vectors(n, cfg.k)) {
      std::string b;
      for (Size i = 0; i < blocks.size(); ++i) b += (i ? " " : "") + std::to_string(blocks[i]);
      t.add({static_cast<std::int64_t>(n), static_cast<std::int64_t>(cfg.k), b,
             block_config_count(n, cfg.k, blocks).str(), count.str()});
    }
  } else {
    throw UsageError("unknown oracle '" + o + "' (pmk, borel, dp, conditional-r, parking, trees, block-count)");
  }
  return t;
}

/// Largest-cluster fractions on both sides of the transition window.
inline Table cmd_sweep(const RunConfig& cfg) {
  if (cfg.n.empty()) throw UsageError("sweep needs at least one --n");
  for (Size n : cfg.n)
    if (n < 2) throw UsageError("--n must be at least 2");
  if (!(cfg.epsilon > 0 && cfg.epsilon < 0.5)) throw UsageError("--epsilon must be in (0, 1/2)");
  if (cfg.reps < 1) throw UsageError("--reps must be at least 1");
  const auto rows = regime_sweep(cfg.n, cfg.epsilon, cfg.reps, cfg.seed, cfg.embedding, cfg.workers);
  Table t{{"seed", "n", "reps", "embedding", "version", "epsilon", "sparse_step", "sparse_mean", "sparse_stderr",
           "full_step", "full_mean", "full_stderr"},
          {}};
  for (const auto& r : rows)
    t.add({cfg.seed, static_cast<std::int64_t>(r.n), static_cast<std::int64_t>(cfg.reps),
           std::string(to_string(cfg.embedding)), std::string(kVersion), cfg.epsilon,
           static_cast<std::int64_t>(r.sparse_step), r.sparse.mean(), r.sparse.stderr_mean(),
           static_cast<std::int64_t>(r.full_step), r.full.mean(), r.full.stderr_mean()});
  return t;
}

}  // namespace mlcoal
