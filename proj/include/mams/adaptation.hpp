#ifndef MAMS_ADAPTATION_HPP
#define MAMS_ADAPTATION_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mams/kernel.hpp"
#include "mams/target.hpp"

namespace mams {

// REFERENCE: Hoffman, M.D. and Gelman, A., 2014. The No-U-Turn sampler:
// adaptively setting path lengths in Hamiltonian Monte Carlo. JMLR 15.

struct DualAveragingSettings {
  double target_accept = 0.9;
  double gamma = 0.05;
  double t0 = 10.0;
  double kappa = 0.75;
};

struct DualAveragingState {
  double log_eps = 0.0;
  double log_eps_avg = 0.0;
  double h_avg = 0.0;
  double iteration = 1.0;
  double mu = 0.0;
  DualAveragingSettings settings;

  /// Starts at eps0 with shrinkage center log(10 eps0).
  static DualAveragingState start(double eps0, DualAveragingSettings settings);

  /// Step size to use for the next proposal.
  double step_size() const;
  /// Averaged step size, the value to freeze after adaptation.
  double final_step_size() const;
};

/// One dual-averaging iteration driven by the acceptance probability
/// min(1, exp(-W)) of the last proposal.
DualAveragingState dual_averaging_update(DualAveragingState state,
                                         double accept_prob);

/// Per-coordinate standard deviations, floored at 1e-10. Needs >= 100 samples.
Vector estimate_preconditioner(std::span<const Vector> samples);

struct AlbaState {
  double trajectory_length = 1.0;
  double constant = 0.3;
};

struct AlbaUpdate {
  AlbaState state;
  double tau_bar = 0.0;
  /// True when the window looked non-stationary and L was kept.
  bool held = false;
};

/**
 * L <- c L tau_bar, with tau_bar the harmonic mean over coordinates of the
 * integrated autocorrelation time of x_i in the window. Needs >= 200
 * samples. If tau_bar exceeds a tenth of the window L is held.
 */
AlbaUpdate alba_update(const AlbaState& state, std::span<const Vector> window);

/// Gradient budget for the three tuning stages.
struct TuningSchedule {
  std::uint64_t total_budget = 0;
  std::array<double, 3> stage_fractions{0.1, 0.1, 0.1};

  std::uint64_t stage_budget(int stage) const;
  std::uint64_t tuning_budget() const;
  /// Budget left for sampling after tuning.
  std::uint64_t sampling_budget() const;
  void validate() const;
};

struct TuningOptions {
  /// NaN selects the sampler default.
  double target_accept = std::numeric_limits<double>::quiet_NaN();
  bool precondition = true;
  /// Skips trajectory-length adaptation and uses this L.
  std::optional<double> fixed_trajectory_length;
  /// Skips step-size adaptation and uses this eps.
  std::optional<double> fixed_step_size;
  StepSequence sequence = StepSequence::Halton;
  int alba_rounds = 3;
  /// Start position in original coordinates; a standard normal draw if empty.
  std::optional<Vector> initial_position;
};

struct TuningResult {
  KernelConfig config;
  /// Target the chain lives on (preconditioned when enabled).
  TargetDensity target;
  /// Warm chain state on `target`.
  ChainState state;
  Vector scales;
  std::uint64_t gradient_calls = 0;
  double tau_bar = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

/**
 * Halve from eps = 1 until a single leapfrog step from `state` is
 * non-divergent. Each trial costs one gradient, counted into `calls`.
 */
double initial_step_size(const ChainState& state, const TargetDensity& target,
                         Flavor flavor, std::uint64_t max_calls,
                         std::uint64_t& calls);

/**
 * Three-stage adaptation on a single chain:
 *  1. dual averaging of eps at L = sqrt(d) (1 for HMC);
 *  2. diagonal preconditioner from the second half of the stage-1 samples,
 *     then eps re-tuned on the preconditioned target;
 *  3. `alba_rounds` rounds of an ALBA window followed by a dual-averaging
 *     burst.
 * Never spends more than `schedule.tuning_budget()` gradient calls.
 * Throws TuningError if eps collapses (acceptance stays below 0.1 as eps
 * hits its floor).
 */
TuningResult run_tuning(const TargetDensity& target,
                        const TuningSchedule& schedule, SamplerKind kind,
                        Rng& rng, const TuningOptions& options = {});

/// Continuous-time MALT ESS of the second moment on N(0, sigma^2):
/// (1 - rho^2) / (1 + rho^2), rho = exp(-beta T)(cos wT + (beta/w) sin wT),
/// w = sqrt(1/sigma^2 - beta^2). Throws DomainError for beta >= 1/sigma.
double continuous_malt_ess(double beta, double T, double sigma);

/// Minimum of continuous_malt_ess over sigma in (0, sigma_max].
double worst_direction_malt_ess(double beta, double T, double sigma_max,
                                int grid_points = 4000);

struct MaltOptimum {
  double beta_sigma;   ///< beta * sigma_max
  double time_sigma;   ///< T / sigma_max
  double ess_per_time;
  /// (1 / beta) / T, the partial-to-full refresh time scale ratio.
  double ratio() const { return 1.0 / (beta_sigma * time_sigma); }
};

/// Grid search (with successive refinement) for the (beta, T) maximizing
/// the worst-direction ESS per unit trajectory time, for sigma_max = 1.
MaltOptimum optimize_malt_settings(int sigma_grid_points = 4000);

}  // namespace mams

#endif  // MAMS_ADAPTATION_HPP
