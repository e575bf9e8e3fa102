#include "mams/hmc.hpp"

namespace mams {

ProposalOutcome hmc_step(ChainState& state, const KernelConfig& cfg,
                         TrajectorySchedule& schedule,
                         const TargetDensity& target, Rng& rng) {
  KernelConfig canonical = cfg;
  canonical.flavor = Flavor::Canonical;
  return mh_step(state, canonical, schedule, target, rng);
}

double hamiltonian(const ChainState& state) {
  return state.potential + 0.5 * state.z.u.squaredNorm();
}

}  // namespace mams
