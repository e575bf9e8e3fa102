#ifndef MAMS_HMC_HPP
#define MAMS_HMC_HPP

#include "mams/proposal.hpp"

namespace mams {

/// Target acceptance used when tuning the HMC baseline.
inline constexpr double kHmcTargetAccept = 0.8;

/// Plain HMC transition: leapfrog on dx = u, du = -grad L, Metropolis on the
/// canonical energy error, Gaussian velocity refresh afterwards.
ProposalOutcome hmc_step(ChainState& state, const KernelConfig& cfg,
                         TrajectorySchedule& schedule,
                         const TargetDensity& target, Rng& rng);

/// Canonical energy L(x) + |u|^2 / 2.
double hamiltonian(const ChainState& state);

}  // namespace mams

#endif  // MAMS_HMC_HPP
