#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlcoal/commands.hpp"

namespace mlcoal::acceptance {

/// Statistical checks run at these recorded seeds. Each one is probabilistic
/// and has a false-failure rate of roughly its test level.
inline constexpr std::uint64_t kSeedPartialCosts = 0x5EED0006;
inline constexpr std::uint64_t kSeedQuickFind = 0x5EED0007;
inline constexpr std::uint64_t kSeedDisplacement = 0x5EED0107;
inline constexpr std::uint64_t kSeedSweep = 0x5EED0008;
inline constexpr std::uint64_t kSeedDeterminism = 0x5EED0012;
inline constexpr std::uint64_t kSeedChiSquare = 0x5EED0013;

struct Options {
  unsigned workers = 1;
  bool mutate_pmk = false;  // evaluate p_mk at k -> m-k to check the harness detects it
};

struct Outcome {
  std::string id;
  std::string title;
  bool fatal = true;
  bool passed = false;
  double measured = NAN;
  double target = NAN;
  double tolerance = NAN;
  std::string detail;
  double seconds = 0.0;

  std::string status() const {
    if (fatal) return passed ? "pass" : "fail";
    return passed ? "informative-pass" : "informative-fail";
  }
};

/// Shared Monte Carlo runs and the p_mk formula under test.
class Context {
 public:
  explicit Context(Options opts) : opts_(opts) {}
  const Options& options() const { return opts_; }

  exact::Rational pmk_exact(Size m, Size k) const {
    return exact::p_mk_exact(m, opts_.mutate_pmk ? m - k : k);
  }
  double pmk(Size m, Size k) const { return exact::p_mk(m, opts_.mutate_pmk ? m - k : k); }

  /// n in {1e3, 1e4, 1e5}, 100 reps each: QF, QFW, QFB totals, QF at
  /// floor(n - n^{3/4}), largest cluster at both regime checkpoints.
  const std::vector<MonteCarloResult>& sweep() {
    if (sweep_.empty()) {
      std::uint64_t idx = 0;
      for (Size n : sweep_sizes()) {
        ExperimentSpec spec;
        spec.n = n;
        spec.functionals = {Functional::QF, Functional::QFW, Functional::QFB};
        spec.reps = 100;
        spec.seed = substream_seed(kSeedSweep, idx++);
        spec.alphas = {};
        spec.betas = {std::pow(static_cast<double>(n), 0.25)};
        spec.largest_steps = {regime_step(n, 0.65), regime_step(n, 0.35)};
        spec.workers = opts_.workers;
        sweep_.push_back(run_monte_carlo(spec));
      }
    }
    return sweep_;
  }

  static std::vector<Size> sweep_sizes() { return {1000, 10000, 100000}; }

 private:
  Options opts_;
  std::vector<MonteCarloResult> sweep_;
};

struct Criterion {
  std::string id;
  std::string title;
  bool fatal;
  std::function<Outcome(Context&)> run;
};

inline std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------

inline Outcome oracle_equivalence(Context&) {
  Outcome o;
  o.tolerance = 1e-12;
  o.target = 0.0;
  double worst = 0.0;
  std::ostringstream detail;
  for (Size n = 2; n <= 6; ++n) {
    const auto parking = exact::enumerate_parking(n).sequences;
    const auto trees = exact::enumerate_spanning_trees(n).sequences;
    const auto chain = exact::sequence_distribution_dp(n);
    const double tv = std::max({exact::to_double(exact::total_variation(parking, trees)),
                                exact::to_double(exact::total_variation(parking, chain)),
                                exact::to_double(exact::total_variation(trees, chain))});
    worst = std::max(worst, tv);
    detail << "n=" << n << " sequences=" << chain.size() << " tv=" << fmt(tv) << "; ";
  }
  o.measured = worst;
  o.passed = worst < o.tolerance;
  o.detail = detail.str();
  return o;
}

inline Outcome comb_basic(Context& ctx) {
  Outcome o;
  o.target = 0.0;
  o.tolerance = 0.0;
  int mismatches = 0;
  for (Size m = 2; m <= 8; ++m) {
    const auto final_law = exact::predator_marginal(exact::enumerate_parking(m).steps[m - 2]);
    for (Size k = 1; k < m; ++k) {
      const auto it = final_law.find(k);
      const exact::Rational enumerated = it == final_law.end() ? exact::Rational(0) : it->second;
      if (enumerated != ctx.pmk_exact(m, k)) ++mismatches;
    }
  }
  int bad_rows = 0;
  for (Size m = 2; m <= 30; ++m) {
    exact::Rational row = 0;
    for (Size k = 1; k < m; ++k) row += ctx.pmk_exact(m, k);
    if (row != 1) ++bad_rows;
  }
  o.measured = mismatches + bad_rows;
  o.passed = mismatches == 0 && bad_rows == 0;
  o.detail = "enumeration mismatches (m<=8): " + std::to_string(mismatches) +
             ", rows not summing to 1 (m<=30): " + std::to_string(bad_rows);
  return o;
}

inline Outcome borel_limit(Context& ctx) {
  Outcome o;
  o.target = 0.0;
  o.tolerance = 1e-3;
  const Size m = 10000;
  double worst = 0.0;
  for (Size k = 1; k <= 10; ++k) worst = std::max(worst, std::abs(ctx.pmk(m, m - k) - exact::borel_pmf(k)));
  o.measured = worst;
  o.passed = worst < o.tolerance;
  o.detail = "max_k<=10 |p_mk(1e4, 1e4-k) - borel(k)|";
  return o;
}

inline Outcome conditional_prey(Context&) {
  Outcome o;
  o.target = 0.0;
  o.tolerance = 0.0;
  int mismatches = 0, checked = 0;
  for (Size n = 2; n <= 8; ++n) {
    const auto from_parking = exact::conditional_prey_means(exact::enumerate_parking(n).steps);
    const auto from_dp = exact::conditional_prey_means(exact::partition_dp(n).steps);
    if (from_parking.size() != from_dp.size()) ++mismatches;
    for (const auto& [key, value] : from_parking) {
      ++checked;
      const exact::Rational formula(n - key.second, n - key.first);
      if (value != formula) ++mismatches;
      const auto it = from_dp.find(key);
      if (it == from_dp.end() || it->second != formula) ++mismatches;
    }
  }
  o.measured = mismatches;
  o.passed = mismatches == 0;
  o.detail = std::to_string(checked) + " reachable (n, k, l) checked against (n-l)/(n-k)";
  return o;
}

inline Outcome smoluchowski_identities(Context&) {
  Outcome o;
  o.target = 0.0;
  std::ostringstream detail;
  double moment_dev = 0.0;
  for (double t : {0.1, 1.0, 3.0})
    for (unsigned p : {0u, 1u, 2u})
      moment_dev = std::max(moment_dev, std::abs(smol::truncated_moment(t, p) - smol::moment(t, p)));
  // dq/dt against the coagulation right-hand side at t = 1
  const double t = 1.0, h = 1e-5;
  const auto spectrum = smol::truncate_spectrum(t, 1, 1e-14);
  const auto& qv = spectrum.values;
  double m0 = 0.0, m1 = 0.0;
  for (Size j = qv.size(); j >= 1; --j) {
    m0 += qv[j - 1];
    m1 += static_cast<double>(j) * qv[j - 1];
  }
  double ode_dev = 0.0;
  for (Size k = 1; k <= 20; ++k) {
    const double dk = static_cast<double>(k);
    const double derivative = (smol::q(k, t + h) - smol::q(k, t - h)) / (2 * h);
    double gain = 0.0;
    for (Size j = 1; j < k; ++j) gain += dk * qv[j - 1] * qv[k - j - 1];
    const double rhs = 0.5 * gain - qv[k - 1] * (m1 + dk * m0);
    ode_dev = std::max(ode_dev, std::abs(derivative - rhs));
  }
  double phi_dev = 0.0;
  for (double a : default_alpha_grid())
    phi_dev = std::max(phi_dev, std::abs(smol::phi_quadrature(Functional::Prey, a).value - smol::alpha_to_time(a)));
  const double score = std::max({moment_dev / 1e-8, ode_dev / 1e-6, phi_dev / 1e-6});
  o.measured = score;
  o.tolerance = 1.0;
  o.passed = score < 1.0;
  detail << "moments dev=" << fmt(moment_dev) << " (tol 1e-8); ODE dev=" << fmt(ode_dev)
         << " (tol 1e-6); Prey quadrature dev=" << fmt(phi_dev) << " (tol 1e-6); measured = max dev/tol";
  o.detail = detail.str();
  return o;
}

inline Outcome partial_cost_limits(Context& ctx) {
  Outcome o;
  o.tolerance = 1.0;
  o.target = 0.0;
  ExperimentSpec spec;
  spec.n = 100000;
  spec.reps = 100;
  spec.seed = kSeedPartialCosts;
  spec.functionals = {Functional::Prey, Functional::Predator, Functional::Displacement, Functional::QF,
                      Functional::QFW};
  spec.alphas = {};
  for (double a : default_alpha_grid())
    if (a <= 0.9 + 1e-12) spec.alphas.push_back(a);
  spec.betas = {};
  spec.workers = ctx.options().workers;
  const auto result = run_monte_carlo(spec);
  std::ostringstream detail;
  double worst = 0.0;
  for (Functional f : spec.functionals) {
    const auto& s = result.summary(f);
    double fworst = 0.0, worst_alpha = 0.0;
    for (std::size_t i = 0; i < spec.alphas.size(); ++i) {
      const double phi = smol::phi_normalized(f, spec.alphas[i]);
      const double ratio = std::abs(s.alpha[i].mean() - phi) / (0.02 * (1 + phi));
      if (ratio > fworst) {
        fworst = ratio;
        worst_alpha = spec.alphas[i];
      }
    }
    worst = std::max(worst, fworst);
    detail << to_string(f) << ": sup |C/n - phi| / (0.02 (1+phi)) = " << fmt(fworst) << " at alpha=" << worst_alpha
           << "; ";
  }
  o.measured = worst;
  o.passed = worst < 1.0;
  o.detail = detail.str();
  return o;
}

inline Outcome quick_find_total(Context& ctx) {
  Outcome o;
  o.target = std::sqrt(std::numbers::pi / 8);
  o.tolerance = 0.05;
  const double scale = std::pow(1e5, -1.5);
  ExperimentSpec qf;
  qf.n = 100000;
  qf.reps = 500;
  qf.seed = kSeedQuickFind;
  qf.functionals = {Functional::QF};
  qf.alphas = {};
  qf.betas = {};
  qf.workers = ctx.options().workers;
  std::vector<double> qf_sample = run_monte_carlo(qf).totals(Functional::QF);
  for (double& v : qf_sample) v *= scale;
  ExperimentSpec disp = qf;
  disp.embedding = EmbeddingKind::Parking;
  disp.seed = kSeedDisplacement;
  disp.functionals = {Functional::Displacement};
  std::vector<double> d_sample = run_monte_carlo(disp).totals(Functional::Displacement);
  for (double& v : d_sample) v *= scale;

  SummaryStats first200;
  for (std::size_t i = 0; i < 200; ++i) first200.add(qf_sample[i]);
  const double rel = std::abs(first200.mean() - o.target) / o.target;
  const auto ks = ks_two_sample(qf_sample, d_sample, 0.001);
  o.measured = first200.mean();
  o.passed = rel < o.tolerance && !ks.rejected;
  std::ostringstream detail;
  detail << "mean n^-1.5 C^QF (200 reps) = " << fmt(first200.mean()) << " rel.err " << fmt(rel)
         << " (tol 0.05); KS(QF, parking D_n; 500 vs 500) D=" << fmt(ks.statistic) << " p=" << fmt(ks.p_value)
         << (ks.rejected ? " REJECTED" : " not rejected") << " at 0.001";
  o.detail = detail.str();
  return o;
}

/// a of the least-squares fit y = a + b / log n over the sweep sizes.
inline std::pair<double, std::string> extrapolate_total(Context& ctx, Functional f) {
  std::vector<double> x, y;
  std::ostringstream detail;
  for (const auto& r : ctx.sweep()) {
    const double n = static_cast<double>(r.spec.n);
    const double ratio = r.summary(f).total.mean() / (n * std::log(n));
    x.push_back(1 / std::log(n));
    y.push_back(ratio);
    detail << "n=" << r.spec.n << " C/(n log n)=" << fmt(ratio) << "; ";
  }
  const auto [a, b] = fit_line(x, y);
  detail << "fit a=" << fmt(a) << " b=" << fmt(b);
  return {a, detail.str()};
}

inline Outcome qfb_total(Context& ctx) {
  Outcome o;
  o.target = 0.5;
  o.tolerance = 0.10;
  auto [a, detail] = extrapolate_total(ctx, Functional::QFB);
  o.measured = a;
  o.passed = std::abs(a - o.target) / o.target < o.tolerance;
  o.detail = detail;
  return o;
}

inline Outcome qfw_conjecture(Context& ctx) {
  Outcome o;
  o.fatal = false;
  o.target = 1 / std::numbers::pi;
  o.tolerance = 0.15;
  auto [a, detail] = extrapolate_total(ctx, Functional::QFW);
  o.measured = a;
  o.passed = std::abs(a - o.target) / o.target < o.tolerance;
  o.detail = detail;
  return o;
}

inline Outcome phase_transition(Context& ctx) {
  Outcome o;
  o.target = 0.0;
  o.tolerance = 0.05;
  std::vector<double> means;
  std::ostringstream detail;
  for (const auto& r : ctx.sweep()) {
    means.push_back(r.summary(Functional::QF).beta[0].mean());
    detail << "n=" << r.spec.n << " mean=" << fmt(means.back()) << "; ";
  }
  const bool decreasing = means[0] > means[1] && means[1] > means[2];
  o.measured = means.back();
  o.passed = decreasing && means.back() < o.tolerance;
  detail << (decreasing ? "strictly decreasing" : "NOT strictly decreasing");
  o.detail = detail.str();
  return o;
}

inline Outcome regime_sweep_check(Context& ctx) {
  Outcome o;
  o.target = 0.5;
  std::vector<double> sparse, full;
  std::ostringstream detail;
  for (const auto& r : ctx.sweep()) {
    SummaryStats s, f;
    const double n = static_cast<double>(r.spec.n);
    for (const auto& rep : r.replications) {
      s.add(static_cast<double>(rep.largest[0]) / n);
      f.add(static_cast<double>(rep.largest[1]) / n);
    }
    sparse.push_back(s.mean());
    full.push_back(f.mean());
    detail << "n=" << r.spec.n << " B/n sparse=" << fmt(s.mean()) << " full=" << fmt(f.mean()) << "; ";
  }
  const bool down = sparse[0] > sparse[1] && sparse[1] > sparse[2];
  const bool up = full[0] < full[1] && full[1] < full[2];
  const double gap = full.back() - sparse.back();
  o.measured = gap;
  o.passed = down && up && gap > 0.5;
  detail << "sparse " << (down ? "decreasing" : "NOT decreasing") << ", full " << (up ? "increasing" : "NOT increasing")
         << ", gap at 1e5 = " << fmt(gap) << " (> 0.5)";
  o.detail = detail.str();
  return o;
}

inline Outcome determinism(Context&) {
  Outcome o;
  o.target = 0.0;
  o.tolerance = 0.0;
  RunConfig cfg;
  cfg.n = {3000};
  cfg.reps = 24;
  cfg.seed = kSeedDeterminism;
  cfg.embedding = EmbeddingKind::Parking;
  auto render = [&](unsigned workers) {
    RunConfig c = cfg;
    c.workers = workers;
    std::ostringstream out;
    write_table(cmd_simulate(c), OutputFormat::Csv, out);
    return out.str();
  };
  const std::string a = render(1), b = render(1), c = render(8);
  const int differences = (a != b) + (a != c);
  o.measured = differences;
  o.passed = differences == 0;
  o.detail = "simulate output bytes: run1 vs run2 " + std::string(a == b ? "identical" : "DIFFER") +
             ", 1 vs 8 workers " + std::string(a == c ? "identical" : "DIFFER");
  return o;
}

inline Outcome pmk_chi_square(Context& ctx) {
  Outcome o;
  o.tolerance = 0.01;
  o.target = 0.0;
  const Size m = 50, runs = 100000;
  ExperimentSpec spec;
  spec.n = m;
  spec.reps = runs;
  spec.seed = kSeedChiSquare;
  spec.functionals = {Functional::Predator};
  spec.alphas = {};
  spec.betas = {};
  spec.workers = ctx.options().workers;
  std::vector<double> observed(m - 1, 0.0), expected(m - 1, 0.0);
  for (const auto& r : run_monte_carlo(spec).replications) observed[r.final_predator - 1] += 1;
  for (Size k = 1; k < m; ++k) expected[k - 1] = ctx.pmk(m, k);
  const auto chi = chi_square_gof(observed, expected, 0.01);
  o.measured = chi.p_value;
  o.passed = !chi.rejected;
  o.detail = "final-merge predator size at m=50, 1e5 runs: chi2=" + fmt(chi.statistic) + " df=" +
             std::to_string(chi.degrees_of_freedom) + " p=" + fmt(chi.p_value) + " (reject below 0.01)";
  return o;
}

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"oracle-equivalence", "parking, spanning-tree and chain sequence laws agree (n <= 6)", true, oracle_equivalence},
      {"comb-basic", "p_mk matches enumeration (m <= 8) and rows sum to 1 (m <= 30)", true, comb_basic},
      {"borel-limit", "p_mk(1e4, 1e4-k) close to the Borel pmf for k <= 10", true, borel_limit},
      {"conditional-prey-mean", "E[R_k | L_k = l] = (n-l)/(n-k) exactly (n <= 8)", true, conditional_prey},
      {"smoluchowski-identities", "moments, coagulation ODE and Prey quadrature", true, smoluchowski_identities},
      {"partial-cost-limits", "C_{n,ceil(alpha n)}/n tracks phi on alpha <= 0.9 (n = 1e5)", true,
       partial_cost_limits},
      {"quick-find-total", "n^-1.5 C^QF mean near sqrt(pi/8); same law as parking D_n", true, quick_find_total},
      {"qfb-total", "C^QFB/(n log n) extrapolates to 1/2", true, qfb_total},
      {"qfw-conjecture", "C^QFW/(n log n) extrapolates to 1/pi (conjecture, informative)", false, qfw_conjecture},
      {"phase-transition", "n^-1.5 C^QF at n - n^0.75 decreases and is small", true, phase_transition},
      {"regime-sweep", "largest cluster vanishes below and fills above the sqrt(n) window", true, regime_sweep_check},
      {"determinism", "simulate output is byte-identical across runs and worker counts", true, determinism},
      {"pmk-chi-square", "simulated final-merge predator size fits p_mk (m = 50)", true, pmk_chi_square},
  };
  return all;
}

/// Runs every criterion (or only `only`), reporting each through `on_result`.
inline std::vector<Outcome> run_all(const Options& opts, const std::optional<std::string>& only = std::nullopt,
                                    const std::function<void(const Outcome&)>& on_result = {}) {
  Context ctx(opts);
  std::vector<Outcome> outcomes;
  bool matched = false;
  for (const auto& c : criteria()) {
    if (only && *only != c.id) continue;
    matched = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    o.id = c.id;
    o.title = c.title;
    o.fatal = c.fatal;
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(o);
    outcomes.push_back(std::move(o));
  }
  if (only && !matched) throw UsageError("unknown criterion '" + *only + "'");
  return outcomes;
}

inline bool all_fatal_passed(const std::vector<Outcome>& outcomes) {
  for (const auto& o : outcomes)
    if (o.fatal && !o.passed) return false;
  return true;
}

inline nlohmann::json to_json(const std::vector<Outcome>& outcomes) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json report;
  report["version"] = kVersion;
  report["passed"] = all_fatal_passed(outcomes);
  report["criteria"] = nlohmann::json::array();
  for (const auto& o : outcomes) {
    report["criteria"].push_back({{"id", o.id},
                                  {"title", o.title},
                                  {"status", o.status()},
                                  {"measured", num(o.measured)},
                                  {"target", num(o.target)},
                                  {"tolerance", num(o.tolerance)},
                                  {"detail", o.detail},
                                  {"seconds", o.seconds}});
  }
  return report;
}

}  // namespace mlcoal::acceptance
