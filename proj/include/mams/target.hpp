#ifndef MAMS_TARGET_HPP
#define MAMS_TARGET_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "mams/rng.hpp"

namespace mams {

using Vector = Eigen::VectorXd;

/// Which per-coordinate observable the bias metric is computed on.
enum class Observable {
  SecondMoment,   ///< f_i(x) = x_i^2
  NegLogDensity,  ///< f_i(x) = -log p_i(x_i), for product targets with heavy tails
};

/// How per-coordinate errors are reduced to one number.
enum class Reduction { Max, Avg };

/// Exact mean and variance of each coordinate's observable.
struct GroundTruth {
  Observable observable = Observable::SecondMoment;
  Vector mean;
  Vector variance;
};

/**
 * A differentiable target p(x) = exp(-L(x)) / Z on R^dim.
 *
 * The evaluator returns L(x) and optionally writes grad L(x). Every
 * evaluation that produces a gradient goes through `evaluate` or `gradient`
 * and bumps an atomic counter shared between copies of the same target, so
 * the total gradient cost of a run can be audited after the fact.
 *
 * Targets may carry a diagonal reparameterization x = scales * x_tilde
 * (see `precondition`). Observables and ground truth always refer to the
 * original coordinates; `to_original` maps a sampler position back.
 */
class TargetDensity {
 public:
  using Evaluator = std::function<double(const Vector& x, Vector* grad)>;
  using ObservableFn = std::function<void(const Vector& x, Vector& out)>;
  using ExactSampler = std::function<Vector(Rng&)>;

  TargetDensity(std::string name, int dim, Evaluator evaluator);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  /// L(x). Does not count as a gradient call.
  double neg_log_density(const Vector& x) const;
  /// grad L(x). Counted.
  Vector gradient(const Vector& x) const;
  /// L(x) with grad L(x) written into `grad`. Counted.
  double evaluate(const Vector& x, Vector& grad) const;

  std::uint64_t gradient_calls() const { return counter_->load(); }
  void reset_gradient_calls() const { counter_->store(0); }

  const Vector& scales() const { return scales_; }
  Vector to_original(const Vector& x) const;

  /// Per-coordinate observable values at sampler position `x`.
  void observe(const Vector& x, Vector& out) const;

  const std::optional<GroundTruth>& ground_truth() const { return truth_; }
  Reduction default_reduction() const { return reduction_; }

  bool has_exact_sampler() const { return static_cast<bool>(sampler_); }
  /// Exact draw in sampler coordinates.
  Vector draw_exact(Rng& rng) const;

  TargetDensity& with_ground_truth(GroundTruth truth);
  TargetDensity& with_observable(Observable kind, ObservableFn fn);
  TargetDensity& with_exact_sampler(ExactSampler sampler);
  TargetDensity& with_reduction(Reduction reduction);

  /// Uncounted access to the underlying evaluator, for composition.
  const Evaluator& evaluator() const { return evaluator_; }

 private:
  friend TargetDensity precondition(const TargetDensity& target,
                                    const Vector& scales);

  std::string name_;
  int dim_;
  Evaluator evaluator_;
  Vector scales_;
  ObservableFn observable_;
  std::optional<GroundTruth> truth_;
  ExactSampler sampler_;
  Reduction reduction_ = Reduction::Max;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

/**
 * Reparameterize by x = diag(scales) x_tilde. The returned target has
 * L~(x_tilde) = L(scales * x_tilde) (the constant log-Jacobian is dropped)
 * and grad L~ = scales * grad L. It keeps the original observables, ground
 * truth and exact sampler, and starts a fresh gradient counter.
 */
TargetDensity precondition(const TargetDensity& target, const Vector& scales);

/// Central finite-difference gradient of L, used by gradient checks.
Vector finite_difference_gradient(const TargetDensity& target, const Vector& x,
                                  double step = 1e-5);

}  // namespace mams

#endif  // MAMS_TARGET_HPP
