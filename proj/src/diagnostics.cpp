#include "mams/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mams/errors.hpp"

namespace mams {

double b_squared(double est, double truth, double var_truth) {
  if (!(var_truth > 0.0)) {
    throw DomainError("b^2 needs a positive ground-truth variance");
  }
  const double diff = est - truth;
  return diff * diff / var_truth;
}

double tau_int(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 100) {
    throw DomainError("tau_int needs at least 100 points");
  }
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  std::vector<double> centered(n);
  double c0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = series[i] - mean;
    c0 += centered[i] * centered[i];
  }
  c0 /= static_cast<double>(n);
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw DegenerateSeriesError("series has zero or non-finite variance");
  }

  auto rho = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += centered[i] * centered[i + lag];
    return acc / (static_cast<double>(n) * c0);
  };

  // Initial positive sequence: Gamma_k = rho_{2k} + rho_{2k+1}.
  double pair_sum = 0.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double gamma = (k == 0 ? 1.0 : rho(2 * k)) + rho(2 * k + 1);
    if (!(gamma > 0.0)) break;
    pair_sum += gamma;
  }
  return std::max(1e-6, -1.0 + 2.0 * pair_sum);
}

double harmonic_mean_tau(std::span<const double> taus) {
  if (taus.empty()) throw DomainError("harmonic mean of an empty sequence");
  double inv = 0.0;
  for (double t : taus) {
    if (!(t > 0.0)) throw DomainError("autocorrelation times must be positive");
    inv += 1.0 / t;
  }
  return static_cast<double>(taus.size()) / inv;
}

Vector coordinate_bias(const Vector& estimate, const GroundTruth& truth) {
  Vector out(estimate.size());
  for (Eigen::Index i = 0; i < estimate.size(); ++i) {
    out[i] = b_squared(estimate[i], truth.mean[i], truth.variance[i]);
  }
  return out;
}

double reduce_bias(const Vector& coordinate_b2, Reduction reduction) {
  return reduction == Reduction::Max ? coordinate_b2.maxCoeff()
                                     : coordinate_b2.mean();
}

std::vector<std::uint64_t> geometric_grid(std::uint64_t first,
                                          std::uint64_t last, double ratio) {
  if (first == 0) first = 1;
  if (!(ratio > 1.0)) throw ConfigurationError("grid ratio must exceed 1");
  std::vector<std::uint64_t> grid;
  double g = static_cast<double>(first);
  while (g <= static_cast<double>(last)) {
    const auto value = static_cast<std::uint64_t>(std::ceil(g));
    if (value > last) break;
    if (grid.empty() || value > grid.back()) grid.push_back(value);
    g *= ratio;
  }
  if (grid.empty() || grid.back() != last) {
    if (last >= first) grid.push_back(last);
  }
  return grid;
}

BiasRecorder::BiasRecorder(const TargetDensity& target,
                           std::vector<std::uint64_t> grid, Reduction reduction)
    : target_(&target), grid_(std::move(grid)), tracker_(target.dim()) {
  if (!target.ground_truth()) {
    throw ConfigurationError("target '" + target.name() + "' has no ground truth");
  }
  truth_ = *target.ground_truth();
  curve_.reduction = reduction;
  curve_.gradient_calls.reserve(grid_.size());
  curve_.values.reserve(grid_.size());
}

double BiasRecorder::current() const {
  if (tracker_.count() == 0) return std::numeric_limits<double>::quiet_NaN();
  return reduce_bias(coordinate_bias(tracker_.mean(), truth_), curve_.reduction);
}

void BiasRecorder::record(const Vector& position, std::uint64_t gradient_calls) {
  target_->observe(position, scratch_);
  tracker_.add(scratch_);
  if (next_ >= grid_.size() || gradient_calls < grid_[next_]) return;
  const double value = current();
  while (next_ < grid_.size() && gradient_calls >= grid_[next_]) {
    curve_.gradient_calls.push_back(grid_[next_]);
    curve_.values.push_back(value);
    ++next_;
  }
}

BiasCurve median_curve(std::span<const BiasCurve> curves) {
  if (curves.empty()) throw AlignmentError("no curves to reduce");
  BiasCurve out;
  out.reduction = curves.front().reduction;
  out.gradient_calls = curves.front().gradient_calls;
  for (const auto& c : curves) {
    if (c.gradient_calls != out.gradient_calls ||
        c.values.size() != c.gradient_calls.size()) {
      throw AlignmentError("bias curves are recorded on different grids");
    }
  }
  std::vector<double> column(curves.size());
  out.values.resize(out.gradient_calls.size());
  for (std::size_t k = 0; k < out.gradient_calls.size(); ++k) {
    for (std::size_t c = 0; c < curves.size(); ++c) column[c] = curves[c].values[k];
    std::sort(column.begin(), column.end());
    const std::size_t m = column.size();
    out.values[k] = m % 2 == 1 ? column[m / 2]
                               : 0.5 * (column[m / 2 - 1] + column[m / 2]);
  }
  return out;
}

std::optional<std::uint64_t> gradients_to_threshold(
    std::span<const BiasCurve> curves, double threshold) {
  const BiasCurve median = median_curve(curves);
  std::optional<std::uint64_t> crossing;
  for (std::size_t k = 0; k < median.values.size(); ++k) {
    if (median.values[k] < threshold) {
      if (!crossing) crossing = median.gradient_calls[k];
    } else {
      crossing.reset();
    }
  }
  return crossing;
}

double AcceptanceStats::rate() const {
  return proposals == 0 ? 0.0
                        : static_cast<double>(accepted) / static_cast<double>(proposals);
}

double AcceptanceStats::mean_accept_prob() const {
  return proposals == 0 ? 0.0 : accept_prob_sum / static_cast<double>(proposals);
}

double ks_statistic_normal(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-samples[i] / std::sqrt(2.0));
    d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double x = statistic * (rn + 0.12 + 0.11 / rn);
  if (x < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace mams
