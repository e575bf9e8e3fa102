#ifndef MAMS_PROPOSAL_HPP
#define MAMS_PROPOSAL_HPP

#include <cstdint>
#include <limits>

#include "mams/dynamics.hpp"
#include "mams/schedule.hpp"

namespace mams {

/// Per-step energy components beyond this magnitude count as divergent.
inline constexpr double kDivergenceThreshold = 1e10;

/// Hyperparameters shared by every kernel.
struct KernelConfig {
  double step_size = 1.0;
  double trajectory_length = 1.0;
  /// Partial-refresh scale; only used by the Langevin kernel.
  double l_partial = std::numeric_limits<double>::infinity();
  Flavor flavor = Flavor::Microcanonical;
  StepSequence sequence = StepSequence::Halton;
  double target_accept = 0.9;
  /// When false the proposal is always taken (unadjusted chain).
  bool metropolis = true;

  /// Mean leapfrog steps per proposal, L / eps, floored at 1.
  double avg_steps() const;
};

struct ProposalOutcome {
  ChainState end_state;
  double work = 0.0;
  int steps_taken = 0;
  bool accepted = false;
  bool divergent = false;
  std::uint64_t grad_calls = 0;

  /// min(1, exp(-W)); zero for a divergent proposal.
  double accept_prob() const;
};

/// Uniform draw on the unit sphere S^{d-1}.
Vector refresh_velocity(int dim, Rng& rng);

/// Standard normal velocity.
Vector refresh_gaussian_velocity(int dim, Rng& rng);

/**
 * Deterministic proposal T o Phi_eps^n. Accumulates W as the sum of the
 * potential and kinetic energy changes of all n steps. A non-finite or
 * oversized energy term marks the proposal divergent with W = +inf.
 */
ProposalOutcome propose(const ChainState& start, double eps, int n,
                        const TargetDensity& target, Flavor flavor);

/// Accept with probability min(1, exp(-W)); consumes one uniform.
bool metropolis_accept(double work, Rng& rng);

/**
 * One Metropolis-adjusted transition. Draws n from the schedule, proposes,
 * accepts with min(1, exp(-W)) and then fully refreshes the velocity of
 * whichever state is kept (sphere for microcanonical, Gaussian for
 * canonical). `state` is updated in place.
 */
ProposalOutcome mh_step(ChainState& state, const KernelConfig& cfg,
                        TrajectorySchedule& schedule,
                        const TargetDensity& target, Rng& rng);

}  // namespace mams

#endif  // MAMS_PROPOSAL_HPP
