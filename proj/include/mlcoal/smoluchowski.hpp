#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mlcoal/cost.hpp"

namespace mlcoal::smol {

/// log q(k, t) for the additive Smoluchowski solution started from monomers;
/// -inf where q vanishes.
inline double log_q(Size k, double t) {
  if (k == 0) throw std::invalid_argument("q: k must be >= 1");
  if (t < 0) throw std::invalid_argument("q: t must be >= 0");
  if (t == 0) return k == 1 ? 0.0 : -INFINITY;
  const double a = -std::expm1(-t);
  const double dk = static_cast<double>(k);
  if (k == 1) return -a - t;
  return (dk - 2) * std::log(dk) + (dk - 1) * std::log(a) - dk * a - t - std::lgamma(dk);
}

/// q(k,t) = (1/k) [k(1-e^{-t})]^{k-1}/(k-1)! e^{-t-k(1-e^{-t})}.
inline double q(Size k, double t) { return std::exp(log_q(k, t)); }

/// <mu_t, x^p> for p in {0, 1, 2}: e^{-t}, 1, e^{2t}.
inline double moment(double t, unsigned p) {
  if (t < 0) throw std::invalid_argument("moment: t must be >= 0");
  switch (p) {
    case 0: return std::exp(-t);
    case 1: return 1.0;
    case 2: return std::exp(2 * t);
    default: throw std::invalid_argument("moment: p must be 0, 1 or 2");
  }
}

/// Upper bound on q(k+1,t)/q(k,t) for every k.
inline double ratio_bound(double t) {
  const double a = -std::expm1(-t);
  return a * std::exp(1 - a);
}

inline constexpr double kResidualMass = 1e-10;
inline constexpr double kTailTolerance = 1e-13;
inline constexpr Size kMaxTruncation = 20'000'000;

/// Truncated spectrum q(1..K, t), with K certified so that
/// sum_{k>K} k^degree q(k,t) < tail_tol and 1 - sum_{k<=K} k q(k,t) < kResidualMass.
struct Truncation {
  std::vector<double> values;  // values[k-1] = q(k, t)
  double tail_bound = 0.0;
  Size cutoff() const { return values.size(); }
};

inline Truncation truncate_spectrum(double t, unsigned degree, double tail_tol = kTailTolerance) {
  Truncation out;
  if (t == 0) {
    out.values = {1.0};
    return out;
  }
  const double rho = ratio_bound(t);
  double mass = 0.0;
  for (Size k = 1; k <= kMaxTruncation; ++k) {
    const double qk = q(k, t);
    const double dk = static_cast<double>(k);
    out.values.push_back(qk);
    mass += dk * qk;
    const double growth = rho * std::pow(1.0 + 1.0 / dk, degree);
    if (growth < 1.0) {
      const double term = std::pow(dk, degree) * qk;
      const double tail = term * growth / (1.0 - growth);
      if (tail < tail_tol && 1.0 - mass < kResidualMass) {
        out.tail_bound = tail;
        return out;
      }
    }
  }
  throw std::runtime_error("truncate_spectrum: truncation budget exceeded");
}

/// sum_{k<=K} k^p q(k,t) with an adaptively certified K.
inline double truncated_moment(double t, unsigned p) {
  const Truncation tr = truncate_spectrum(t, p);
  double s = 0.0;
  for (Size k = tr.cutoff(); k >= 1; --k) s += std::pow(static_cast<double>(k), p) * tr.values[k - 1];
  return s;
}

/// t_alpha = -log(1 - alpha).
inline double alpha_to_time(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::domain_error("alpha_to_time: alpha must be in [0, 1)");
  return -std::log1p(-alpha);
}

/// Cost rate sum_k sum_l c(k,l) (k+l)/2 q(k,t) q(l,t) for a built-in
/// functional, using factored O(K) forms of the truncated double sum.
inline double cost_rate(Functional f, const Truncation& tr) {
  const Size K = tr.cutoff();
  const auto& qv = tr.values;
  if (f == Functional::QFW) {
    // min(k,l)(k+l)/2 summed with suffix sums of q and l q.
    double suffix0 = 0.0, suffix1 = 0.0, acc = 0.0;
    for (Size k = K; k >= 1; --k) {
      const double dk = static_cast<double>(k);
      const double qk = qv[k - 1];
      acc += dk * dk * qk * qk + dk * qk * (dk * suffix0 + suffix1);
      suffix0 += qk;
      suffix1 += dk * qk;
    }
    return acc;
  }
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (Size k = K; k >= 1; --k) {
    const double dk = static_cast<double>(k);
    const double qk = qv[k - 1];
    m0 += qk;
    m1 += dk * qk;
    m2 += dk * dk * qk;
  }
  switch (f) {
    case Functional::QF: return 0.5 * (m2 * m0 + m1 * m1);
    case Functional::QFB:
    case Functional::Prey: return m1 * m1;
    case Functional::Predator: return m2 * m0;
    case Functional::Displacement: return 0.5 * (m2 * m0 - m1 * m0);
    case Functional::QFW: break;
  }
  return 0.0;
}

/// Same rate for an arbitrary conditional cost, O(K^2).
inline double cost_rate(const ConditionalCost& c, const Truncation& tr) {
  const Size K = tr.cutoff();
  double acc = 0.0;
  for (Size k = 1; k <= K; ++k) {
    const double dk = static_cast<double>(k);
    double row = 0.0;
    for (Size l = 1; l <= K; ++l) {
      const double dl = static_cast<double>(l);
      row += c.cost(dk, dl) * (dk + dl) * 0.5 * tr.values[l - 1];
    }
    acc += row * tr.values[k - 1];
  }
  return acc;
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  Size panels = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double tol = 1e-8;
  Size initial_panels = 64;
  Size max_panels = Size{1} << 16;
};

/// Composite Simpson on [0, upper] with panel doubling until two successive
/// estimates differ by less than opts.tol.
template <class Integrand>
QuadratureResult simpson_doubling(Integrand&& f, double upper, const QuadratureOptions& opts) {
  QuadratureResult r;
  if (upper == 0.0) {
    r.converged = true;
    return r;
  }
  Size panels = opts.initial_panels;
  double h = upper / static_cast<double>(panels);
  const double ends = f(0.0) + f(upper);
  double evens = 0.0, odds = 0.0;
  for (Size i = 1; i < panels; ++i) (i % 2 == 0 ? evens : odds) += f(h * static_cast<double>(i));
  double estimate = h / 3 * (ends + 4 * odds + 2 * evens);
  while (panels < opts.max_panels) {
    panels *= 2;
    h /= 2;
    evens += odds;
    odds = 0.0;
    for (Size i = 1; i < panels; i += 2) odds += f(h * static_cast<double>(i));
    const double refined = h / 3 * (ends + 4 * odds + 2 * evens);
    r.error_estimate = std::abs(refined - estimate);
    estimate = refined;
    if (r.error_estimate < opts.tol) {
      r.converged = true;
      break;
    }
  }
  r.value = estimate;
  r.panels = panels;
  return r;
}

inline QuadratureResult phi_quadrature(Functional f, double alpha, const QuadratureOptions& opts = {}) {
  const double upper = alpha_to_time(alpha);
  return simpson_doubling([f](double t) { return cost_rate(f, truncate_spectrum(t, 2)); }, upper, opts);
}

inline QuadratureResult phi_quadrature(const ConditionalCost& c, double alpha,
                                       const QuadratureOptions& opts = {}) {
  const double upper = alpha_to_time(alpha);
  const unsigned degree = std::max(c.degree_x, c.degree_y) + 1;
  return simpson_doubling([&](double t) { return cost_rate(c, truncate_spectrum(t, degree)); }, upper,
                          opts);
}

/// Closed-form limit of C_{n, ceil(alpha n)}/n, normalized to vanish at 0.
/// QFW has none.
inline std::optional<double> phi_closed_form(Functional f, double alpha) {
  const double t = alpha_to_time(alpha);
  const double ratio = alpha / (1 - alpha);
  switch (f) {
    case Functional::QF: return 0.5 * ratio + 0.5 * t;
    case Functional::QFB:
    case Functional::Prey: return t;
    case Functional::Predator: return ratio;
    case Functional::Displacement: return 0.5 * ratio - 0.5 * alpha;
    case Functional::QFW: return std::nullopt;
  }
  return std::nullopt;
}

/// The published table entries, which carry additive constants (and, for the
/// displacement, the continuous U L convention).
inline std::optional<double> phi_paper_table(Functional f, double alpha) {
  const double t = alpha_to_time(alpha);
  switch (f) {
    case Functional::QF: return 0.5 * (1 / (1 - alpha) + t);
    case Functional::Prey: return t;
    case Functional::Predator: return 1 / (1 - alpha);
    case Functional::Displacement: return 1 / (2 * (1 - alpha));
    default: return std::nullopt;
  }
}

/// Normalized limit curve value: closed form when one exists, quadrature otherwise.
inline double phi_normalized(Functional f, double alpha, const QuadratureOptions& opts = {}) {
  if (auto v = phi_closed_form(f, alpha)) return *v;
  QuadratureResult r = phi_quadrature(f, alpha, opts);
  if (!r.converged) throw std::runtime_error("phi_normalized: quadrature did not converge");
  return r.value;
}

/// Asymptotic probability that the first parked car sits in a size-k cluster
/// after ceil(alpha n) arrivals. Size-1 clusters hold no car, so k = 1 gives 0.
inline double tagged_size_prob(Size k, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("tagged_size_prob: alpha must be in (0, 1)");
  if (k == 0) throw std::invalid_argument("tagged_size_prob: k must be >= 1");
  if (k == 1) return 0.0;
  const double dk = static_cast<double>(k);
  const double lp = std::log1p(-alpha) + (dk - 2) * std::log(alpha) + (dk - 2) * std::log(dk) -
                    std::lgamma(dk - 1) - alpha * dk;
  return std::exp(lp);
}

}  // namespace mlcoal::smol
