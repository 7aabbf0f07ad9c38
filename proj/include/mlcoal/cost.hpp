#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlcoal/merge_event.hpp"

namespace mlcoal {

/// Label-update cost models.
///
///   QF           Quick-Find: s or S on a fair coin (the event's `coin`).
///   QFW          Quick-Find-Weighted: s.
///   QFB          Quick-Find-Biased: R, the non size-biased side.
///   Prey         prey size R (uniform pick); per event identical to QFB.
///   Predator     predator size L (size-biased pick).
///   Displacement D = floor(u' L).
enum class Functional { QF, QFW, QFB, Prey, Predator, Displacement };

inline constexpr std::array<Functional, 6> kAllFunctionals = {
    Functional::QF,   Functional::QFW,      Functional::QFB,
    Functional::Prey, Functional::Predator, Functional::Displacement};

inline std::string_view to_string(Functional f) {
  switch (f) {
    case Functional::QF: return "QF";
    case Functional::QFW: return "QFW";
    case Functional::QFB: return "QFB";
    case Functional::Prey: return "Prey";
    case Functional::Predator: return "Predator";
    case Functional::Displacement: return "Displacement";
  }
  return "?";
}

inline Functional parse_functional(std::string_view name) {
  for (Functional f : kAllFunctionals) {
    std::string lower(to_string(f));
    std::string candidate(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    std::transform(candidate.begin(), candidate.end(), candidate.begin(), ::tolower);
    if (lower == candidate) return f;
  }
  throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

inline Size instantaneous_cost(Functional f, const MergeEvent& e) {
  switch (f) {
    case Functional::QF: return e.coin < 0.5 ? e.smaller : e.larger;
    case Functional::QFW: return e.smaller;
    case Functional::QFB: return e.prey;
    case Functional::Prey: return e.prey;
    case Functional::Predator: return e.predator;
    case Functional::Displacement: return e.displacement;
  }
  return 0;
}

/// E[cost | merged sizes {x, y}].
inline double conditional_cost(Functional f, double x, double y) {
  switch (f) {
    case Functional::QF: return (x + y) / 2;
    case Functional::QFW: return std::min(x, y);
    case Functional::QFB:
    case Functional::Prey: return 2 * x * y / (x + y);
    case Functional::Predator: return (x * x + y * y) / (x + y);
    case Functional::Displacement: return ((x * x + y * y) / (x + y) - 1) / 2;
  }
  return 0;
}

/// User-supplied conditional cost c(x, y) with a declared bound A x^p y^q.
struct ConditionalCost {
  std::string name;
  std::function<double(double, double)> cost;
  unsigned degree_x = 1;
  unsigned degree_y = 1;
  double bound = 1.0;
};

inline ConditionalCost builtin_cost(Functional f) {
  return ConditionalCost{std::string(to_string(f)),
                         [f](double x, double y) { return conditional_cost(f, x, y); }, 1, 1, 1.0};
}

/// Default partial-cost grid: 0.05, 0.10, ..., 0.95.
inline std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

/// Default excursion-scale grid: 0, 0.25, ..., 4.
inline std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back(i / 4.0);
  return grid;
}

inline constexpr double kGridSlack = 1e-7;

/// Step ceil(alpha n), clamped to n-1.
inline Size alpha_step(double alpha, Size n) {
  const double raw = std::ceil(alpha * static_cast<double>(n) - kGridSlack);
  const Size last = n > 0 ? n - 1 : 0;
  return raw <= 0 ? 0 : std::min(static_cast<Size>(raw), last);
}

/// Step floor(n - beta sqrt(n)), clamped to [0, n-1].
inline Size beta_step(double beta, Size n) {
  const double dn = static_cast<double>(n);
  const double raw = std::floor(dn - beta * std::sqrt(dn) + kGridSlack);
  const Size last = n > 0 ? n - 1 : 0;
  return raw <= 0 ? 0 : std::min(static_cast<Size>(raw), last);
}

/// Steps at which cumulative costs are recorded.
class CheckpointPlan {
 public:
  CheckpointPlan(Size n, std::vector<double> alphas, std::vector<double> betas)
      : n_(n), alphas_(std::move(alphas)), betas_(std::move(betas)) {
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
      if (!(alphas_[i] >= 0.0 && alphas_[i] < 1.0))
        throw std::invalid_argument("alpha checkpoints must lie in [0, 1)");
      marks_.push_back({alpha_step(alphas_[i], n), i});
    }
    for (std::size_t i = 0; i < betas_.size(); ++i) {
      if (!(betas_[i] >= 0.0)) throw std::invalid_argument("beta checkpoints must be >= 0");
      marks_.push_back({beta_step(betas_[i], n), alphas_.size() + i});
    }
    std::stable_sort(marks_.begin(), marks_.end(),
                     [](const Mark& a, const Mark& b) { return a.step < b.step; });
  }

  struct Mark {
    Size step;
    std::size_t slot;  // alphas first, then betas
  };

  Size n() const { return n_; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& betas() const { return betas_; }
  const std::vector<Mark>& marks() const { return marks_; }
  std::size_t slots() const { return alphas_.size() + betas_.size(); }

 private:
  Size n_;
  std::vector<double> alphas_;
  std::vector<double> betas_;
  std::vector<Mark> marks_;
};

using CostAccumulator = unsigned __int128;

/// Running cumulative cost of one functional with grid checkpoints.
class CostTrace {
 public:
  CostTrace(Functional f, std::shared_ptr<const CheckpointPlan> plan)
      : functional_(f), plan_(std::move(plan)), values_(plan_->slots(), 0) {
    record();
  }

  Functional functional() const { return functional_; }
  Size n() const { return plan_->n(); }
  Size steps() const { return step_; }
  CostAccumulator total() const { return total_; }
  bool complete() const { return step_ + 1 >= n(); }
  const CheckpointPlan& plan() const { return *plan_; }

  void accumulate(const MergeEvent& e) {
    if (e.step != step_ + 1) throw std::invalid_argument("CostTrace: out-of-order event");
    if (e.step >= n()) throw std::invalid_argument("CostTrace: more than n-1 events");
    step_ = e.step;
    total_ += instantaneous_cost(functional_, e);
    record();
  }

  CostAccumulator alpha_value(std::size_t i) const { return values_[i]; }
  CostAccumulator beta_value(std::size_t i) const { return values_[plan_->alphas().size() + i]; }

 private:
  void record() {
    const auto& marks = plan_->marks();
    while (next_ < marks.size() && marks[next_].step == step_) values_[marks[next_++].slot] = total_;
  }

  Functional functional_;
  std::shared_ptr<const CheckpointPlan> plan_;
  std::vector<CostAccumulator> values_;
  CostAccumulator total_ = 0;
  Size step_ = 0;
  std::size_t next_ = 0;
};

inline void accumulate(CostTrace& trace, const MergeEvent& e) { trace.accumulate(e); }

inline double to_double(CostAccumulator v) { return static_cast<double>(v); }

/// (alpha, C_{n, ceil(alpha n)} / n) on the plan's alpha grid.
inline std::vector<std::pair<double, double>> partial_cost_curve(const CostTrace& trace) {
  if (!trace.complete()) throw std::logic_error("partial_cost_curve: trace not complete");
  std::vector<std::pair<double, double>> curve;
  const double n = static_cast<double>(trace.n());
  const auto& alphas = trace.plan().alphas();
  for (std::size_t i = 0; i < alphas.size(); ++i)
    curve.emplace_back(alphas[i], to_double(trace.alpha_value(i)) / n);
  return curve;
}

/// (beta, n^{-3/2} C_{n, floor(n - beta sqrt n)}) on the plan's beta grid.
inline std::vector<std::pair<double, double>> w_curve(const CostTrace& trace) {
  if (!trace.complete()) throw std::logic_error("w_curve: trace not complete");
  std::vector<std::pair<double, double>> curve;
  const double scale = std::pow(static_cast<double>(trace.n()), -1.5);
  const auto& betas = trace.plan().betas();
  for (std::size_t i = 0; i < betas.size(); ++i)
    curve.emplace_back(betas[i], to_double(trace.beta_value(i)) * scale);
  return curve;
}

/// One trace per functional, all fed by the same event stream.
class CostTraceSet {
 public:
  CostTraceSet(std::shared_ptr<const CheckpointPlan> plan, const std::vector<Functional>& functionals) {
    for (Functional f : functionals) traces_.emplace_back(f, plan);
  }
  void accumulate(const MergeEvent& e) {
    for (auto& t : traces_) t.accumulate(e);
  }
  const std::vector<CostTrace>& traces() const { return traces_; }

 private:
  std::vector<CostTrace> traces_;
};

}  // namespace mlcoal
