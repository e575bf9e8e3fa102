#ifndef MAMS_LANGEVIN_HPP
#define MAMS_LANGEVIN_HPP

#include "mams/proposal.hpp"

namespace mams {

/// Ratio of the partial-refresh scale to the trajectory length.
inline constexpr double kPartialRefreshRatio = 1.25;

struct LangevinConfig {
  double step_size = 1.0;
  int steps_per_sample = 1;
  double l_partial = 1.25;

  /// n = max(1, round(L / eps)) and the configured L_partial.
  static LangevinConfig from_kernel(const KernelConfig& cfg);
};

/**
 * Sphere-normalized partial refreshment
 *   O(u) = (c1 u + c2 Z / sqrt(d)) / |c1 u + c2 Z / sqrt(d)|,
 * c1 = exp(-eps / l_partial), c2 = sqrt(1 - c1^2). When c2 is exactly zero
 * (l_partial = inf) u is returned unchanged and no noise is drawn.
 */
Vector partial_refresh(const Vector& u, double eps, double l_partial, Rng& rng);

/// O, then the deterministic leapfrog step, then O, in place. Returns the
/// energy change of the deterministic part only.
EnergyDelta obabo_step(ChainState& state, const LangevinConfig& cfg,
                       const TargetDensity& target, Rng& rng);

/**
 * One MALT-style sample: fresh uniform velocity, `steps_per_sample` OBABO
 * steps accumulating the deterministic energy error, then accept the final
 * position with probability min(1, exp(-delta)). On rejection `state` keeps
 * its starting position. RNG draw order: velocity, per-step O noise (two
 * draws of d normals), accept uniform.
 */
ProposalOutcome malt_sample_step(ChainState& state, const LangevinConfig& cfg,
                                 const TargetDensity& target, Rng& rng);

}  // namespace mams

#endif  // MAMS_LANGEVIN_HPP
