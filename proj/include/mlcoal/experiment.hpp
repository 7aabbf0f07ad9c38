#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mlcoal/cost.hpp"
#include "mlcoal/embeddings.hpp"
#include "mlcoal/stats.hpp"

namespace mlcoal {

/// Runs job(i) for i in [0, count) on `workers` threads; results are returned
/// in index order, so the outcome does not depend on scheduling.
template <class Job>
auto replicate(Size count, unsigned workers, Job&& job) {
  using Result = decltype(job(Size{0}));
  std::vector<std::optional<Result>> slots(count);
  std::atomic<Size> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_lock;
  auto drain = [&] {
    for (Size i = next++; i < count && !failed; i = next++) {
      try {
        slots[i].emplace(job(i));
      } catch (...) {
        std::lock_guard guard(error_lock);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct ExperimentSpec {
  Size n = 1000;
  EmbeddingKind embedding = EmbeddingKind::DirectChain;
  std::vector<Functional> functionals{kAllFunctionals.begin(), kAllFunctionals.end()};
  Size reps = 1;
  std::uint64_t seed = 1;
  std::vector<double> alphas = default_alpha_grid();
  std::vector<double> betas = default_beta_grid();
  std::vector<Size> largest_steps;  // record the largest cluster after these many merges
  unsigned workers = 1;
  std::optional<std::string> raw_path;

  void validate() const {
    if (n < 2) throw std::invalid_argument("experiment: n must be >= 2");
    if (reps < 1) throw std::invalid_argument("experiment: reps must be >= 1");
    if (functionals.empty()) throw std::invalid_argument("experiment: no functional selected");
    for (double a : alphas)
      if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("experiment: alpha grid must lie in [0, 1)");
    const double root = std::sqrt(static_cast<double>(n));
    for (double b : betas)
      if (!(b >= 0.0 && b <= root + kGridSlack))
        throw std::invalid_argument("experiment: beta grid must lie in [0, sqrt(n)]");
    for (Size k : largest_steps)
      if (k >= n) throw std::invalid_argument("experiment: largest-cluster step beyond n-1");
  }
};

/// Default beta grid restricted to [0, sqrt(n)].
inline std::vector<double> default_beta_grid(Size n) {
  std::vector<double> grid;
  for (double b : default_beta_grid())
    if (b <= std::sqrt(static_cast<double>(n)) + kGridSlack) grid.push_back(b);
  return grid;
}

struct ReplicationResult {
  std::uint64_t seed = 0;
  std::vector<CostAccumulator> totals;       // [functional]
  std::vector<std::vector<double>> alpha;    // [functional][alpha] C/n
  std::vector<std::vector<double>> beta;     // [functional][beta] n^{-3/2} C
  std::vector<Size> largest;                 // [largest_steps]
  Size final_predator = 0;
};

inline ReplicationResult run_replication(const ExperimentSpec& spec,
                                         const std::shared_ptr<const CheckpointPlan>& plan, Size index) {
  ReplicationResult r;
  r.seed = substream_seed(spec.seed, index);
  Rng rng(r.seed);
  CostTraceSet traces(plan, spec.functionals);
  r.largest.assign(spec.largest_steps.size(), 1);
  Size largest = 1;
  run_embedding(spec.embedding, spec.n, rng, [&](const MergeEvent& e) {
    traces.accumulate(e);
    largest = std::max(largest, e.smaller + e.larger);
    for (std::size_t i = 0; i < spec.largest_steps.size(); ++i)
      if (spec.largest_steps[i] == e.step) r.largest[i] = largest;
    r.final_predator = e.predator;
  });
  for (const auto& t : traces.traces()) {
    r.totals.push_back(t.total());
    std::vector<double> a, b;
    for (auto [x, v] : partial_cost_curve(t)) a.push_back(v);
    for (auto [x, v] : w_curve(t)) b.push_back(v);
    r.alpha.push_back(std::move(a));
    r.beta.push_back(std::move(b));
  }
  return r;
}

struct FunctionalSummary {
  Functional functional;
  std::vector<SummaryStats> alpha;
  std::vector<SummaryStats> beta;
  SummaryStats total;
};

struct MonteCarloResult {
  ExperimentSpec spec;
  std::vector<FunctionalSummary> summaries;  // in spec.functionals order
  std::vector<ReplicationResult> replications;

  const FunctionalSummary& summary(Functional f) const {
    for (const auto& s : summaries)
      if (s.functional == f) return s;
    throw std::out_of_range("functional not simulated");
  }

  /// Per-replication values of one functional's terminal total.
  std::vector<double> totals(Functional f) const {
    std::size_t idx = 0;
    while (idx < spec.functionals.size() && spec.functionals[idx] != f) ++idx;
    if (idx == spec.functionals.size()) throw std::out_of_range("functional not simulated");
    std::vector<double> out;
    for (const auto& r : replications) out.push_back(to_double(r.totals[idx]));
    return out;
  }
};

inline std::string to_string(CostAccumulator v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

/// Replicates the chain, folds summaries in replication order and optionally
/// streams per-replication totals as whitespace-separated records.
inline MonteCarloResult run_monte_carlo(const ExperimentSpec& spec) {
  spec.validate();
  auto plan = std::make_shared<const CheckpointPlan>(spec.n, spec.alphas, spec.betas);
  MonteCarloResult out;
  out.spec = spec;
  out.replications = replicate(spec.reps, spec.workers, [&](Size i) { return run_replication(spec, plan, i); });
  for (std::size_t fi = 0; fi < spec.functionals.size(); ++fi) {
    FunctionalSummary s{spec.functionals[fi], std::vector<SummaryStats>(spec.alphas.size()),
                        std::vector<SummaryStats>(spec.betas.size()), {}};
    for (const auto& r : out.replications) {
      for (std::size_t a = 0; a < spec.alphas.size(); ++a) s.alpha[a].add(r.alpha[fi][a]);
      for (std::size_t b = 0; b < spec.betas.size(); ++b) s.beta[b].add(r.beta[fi][b]);
      s.total.add(to_double(r.totals[fi]));
    }
    out.summaries.push_back(std::move(s));
  }
  if (spec.raw_path) {
    std::ofstream raw(*spec.raw_path);
    if (!raw) throw std::runtime_error("cannot open raw sample file " + *spec.raw_path);
    for (Size i = 0; i < out.replications.size(); ++i) {
      const auto& r = out.replications[i];
      raw << i << ' ' << r.seed;
      for (auto t : r.totals) raw << ' ' << to_string(t);
      raw << '\n';
      if (!raw) throw std::runtime_error("write failure in raw sample file at replication " + std::to_string(i));
    }
  }
  return out;
}

struct RegimeRow {
  Size n = 0;
  Size sparse_step = 0;  // floor(n - n^{1/2+eps})
  Size full_step = 0;    // floor(n - n^{1/2-eps})
  SummaryStats sparse;   // B/n at sparse_step
  SummaryStats full;     // B/n at full_step
};

inline Size regime_step(Size n, double exponent) {
  const double dn = static_cast<double>(n);
  const double raw = std::floor(dn - std::pow(dn, exponent) + kGridSlack);
  return raw <= 0 ? 0 : std::min(static_cast<Size>(raw), n - 1);
}

/// Mean largest-cluster fraction on both sides of the sqrt(n) transition window.
inline std::vector<RegimeRow> regime_sweep(const std::vector<Size>& n_list, double epsilon, Size reps,
                                           std::uint64_t seed, EmbeddingKind embedding = EmbeddingKind::DirectChain,
                                           unsigned workers = 1) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("regime_sweep: epsilon must be in (0, 1/2)");
  std::vector<RegimeRow> rows;
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const Size n = n_list[idx];
    ExperimentSpec spec;
    spec.n = n;
    spec.embedding = embedding;
    spec.functionals = {Functional::QF};
    spec.reps = reps;
    spec.seed = mix64(seed + idx);
    spec.alphas = {};
    spec.betas = {};
    RegimeRow row;
    row.n = n;
    row.sparse_step = regime_step(n, 0.5 + epsilon);
    row.full_step = regime_step(n, 0.5 - epsilon);
    spec.largest_steps = {row.sparse_step, row.full_step};
    spec.workers = workers;
    const auto result = run_monte_carlo(spec);
    for (const auto& r : result.replications) {
      row.sparse.add(static_cast<double>(r.largest[0]) / static_cast<double>(n));
      row.full.add(static_cast<double>(r.largest[1]) / static_cast<double>(n));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mlcoal
