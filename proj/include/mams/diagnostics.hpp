#ifndef MAMS_DIAGNOSTICS_HPP
#define MAMS_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mams/target.hpp"

namespace mams {

/// Squared error of an expectation normalized by the observable variance,
/// (est - truth)^2 / var_truth. Throws DomainError if var_truth <= 0.
double b_squared(double est, double truth, double var_truth);

/**
 * Integrated autocorrelation time 1 + 2 sum_t rho_t, with the sum truncated
 * by Geyer's initial positive sequence rule (pairs rho_{2k} + rho_{2k+1}
 * are summed while positive). Floored at 1e-6.
 * Requires at least 100 points; throws DegenerateSeriesError for a series
 * with zero variance.
 */
double tau_int(std::span<const double> series);

/// n / sum(1 / tau_i). Throws DomainError on empty input or tau <= 0.
double harmonic_mean_tau(std::span<const double> taus);

/// Running per-coordinate means of an observable vector.
class MomentTracker {
 public:
  explicit MomentTracker(int dim) : mean_(Vector::Zero(dim)) {}

  void add(const Vector& values) {
    ++count_;
    mean_ += (values - mean_) / static_cast<double>(count_);
  }

  const Vector& mean() const { return mean_; }
  std::uint64_t count() const { return count_; }

 private:
  Vector mean_;
  std::uint64_t count_ = 0;
};

/// Per-coordinate b^2 of the tracked means against ground truth.
Vector coordinate_bias(const Vector& estimate, const GroundTruth& truth);

/// Max or mean of the per-coordinate b^2.
double reduce_bias(const Vector& coordinate_b2, Reduction reduction);

struct BiasCurve {
  Reduction reduction = Reduction::Max;
  std::vector<std::uint64_t> gradient_calls;
  std::vector<double> values;
};

/// Gradient counts first, first*ratio, ... up to and including `last`,
/// rounded up and deduplicated so the sequence is strictly increasing.
std::vector<std::uint64_t> geometric_grid(std::uint64_t first,
                                          std::uint64_t last,
                                          double ratio = 1.05);

/**
 * Records a chain's bias curve on a fixed gradient grid. Feed it every
 * sample with the chain's cumulative sampling gradient count; the current
 * reduced b^2 is written for each grid point the count has reached.
 */
class BiasRecorder {
 public:
  BiasRecorder(const TargetDensity& target, std::vector<std::uint64_t> grid,
               Reduction reduction);

  void record(const Vector& position, std::uint64_t gradient_calls);

  const BiasCurve& curve() const { return curve_; }
  const MomentTracker& tracker() const { return tracker_; }
  /// Current reduced b^2 (NaN before the first sample).
  double current() const;

 private:
  const TargetDensity* target_;
  GroundTruth truth_;
  std::vector<std::uint64_t> grid_;
  std::size_t next_ = 0;
  MomentTracker tracker_;
  Vector scratch_;
  BiasCurve curve_;
};

/// Pointwise median across chains. Throws AlignmentError on mismatched grids.
BiasCurve median_curve(std::span<const BiasCurve> curves);

/**
 * First grid gradient count at which the across-chain median b^2 is below
 * `threshold` and stays below for the rest of the recorded curve; nullopt
 * if that never happens.
 */
std::optional<std::uint64_t> gradients_to_threshold(
    std::span<const BiasCurve> curves, double threshold = 0.01);

struct AcceptanceStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  std::uint64_t divergences = 0;
  std::uint64_t gradient_calls = 0;
  double accept_prob_sum = 0.0;

  double rate() const;
  double mean_accept_prob() const;
};

/// One-sample Kolmogorov-Smirnov statistic against N(0, 1).
double ks_statistic_normal(std::vector<double> samples);

/// Asymptotic p-value of a KS statistic from n samples.
double ks_pvalue(double statistic, std::size_t n);

}  // namespace mams

#endif  // MAMS_DIAGNOSTICS_HPP
