#include "mams/target.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mams/errors.hpp"

namespace mams {

TargetDensity::TargetDensity(std::string name, int dim, Evaluator evaluator)
    : name_(std::move(name)),
      dim_(dim),
      evaluator_(std::move(evaluator)),
      scales_(Vector::Ones(dim < 0 ? 0 : dim)),
      counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (dim_ < 2) {
    throw ConfigurationError("target dimension must be at least 2, got " +
                             std::to_string(dim_));
  }
  observable_ = [](const Vector& x, Vector& out) { out = x.array().square(); };
}

double TargetDensity::neg_log_density(const Vector& x) const {
  return evaluator_(x, nullptr);
}

Vector TargetDensity::gradient(const Vector& x) const {
  Vector grad(dim_);
  evaluate(x, grad);
  return grad;
}

double TargetDensity::evaluate(const Vector& x, Vector& grad) const {
  counter_->fetch_add(1, std::memory_order_relaxed);
  if (grad.size() != dim_) grad.resize(dim_);
  return evaluator_(x, &grad);
}

Vector TargetDensity::to_original(const Vector& x) const {
  return scales_.cwiseProduct(x);
}

void TargetDensity::observe(const Vector& x, Vector& out) const {
  observable_(to_original(x), out);
}

Vector TargetDensity::draw_exact(Rng& rng) const {
  if (!sampler_) {
    throw ConfigurationError("target '" + name_ + "' has no exact sampler");
  }
  return sampler_(rng).cwiseQuotient(scales_);
}

TargetDensity& TargetDensity::with_ground_truth(GroundTruth truth) {
  if (truth.mean.size() != dim_ || truth.variance.size() != dim_) {
    throw ConfigurationError("ground truth size does not match dimension");
  }
  truth_ = std::move(truth);
  return *this;
}

TargetDensity& TargetDensity::with_observable(Observable kind, ObservableFn fn) {
  observable_ = std::move(fn);
  if (truth_) truth_->observable = kind;
  return *this;
}

TargetDensity& TargetDensity::with_exact_sampler(ExactSampler sampler) {
  sampler_ = std::move(sampler);
  return *this;
}

TargetDensity& TargetDensity::with_reduction(Reduction reduction) {
  reduction_ = reduction;
  return *this;
}

TargetDensity precondition(const TargetDensity& target, const Vector& scales) {
  if (scales.size() != target.dim()) {
    throw ConfigurationError("preconditioner size does not match dimension");
  }
  if (!(scales.array() > 0.0).all() || !scales.allFinite()) {
    throw ConfigurationError("preconditioner scales must be positive and finite");
  }
  auto base = target.evaluator_;
  Vector s = scales;
  TargetDensity::Evaluator wrapped = [base, s](const Vector& x, Vector* grad) {
    const Vector original = s.cwiseProduct(x);
    const double value = base(original, grad);
    if (grad) grad->array() *= s.array();
    return value;
  };
  TargetDensity out(target.name_, target.dim_, std::move(wrapped));
  out.scales_ = target.scales_.cwiseProduct(scales);
  out.observable_ = target.observable_;
  out.truth_ = target.truth_;
  out.sampler_ = target.sampler_;
  out.reduction_ = target.reduction_;
  return out;
}

Vector finite_difference_gradient(const TargetDensity& target, const Vector& x,
                                  double step) {
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = target.neg_log_density(probe);
    probe[i] = x[i] - h;
    const double down = target.neg_log_density(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace mams
