#include "mams/proposal.hpp"

#include <algorithm>
#include <cmath>

#include "mams/errors.hpp"

namespace mams {

double KernelConfig::avg_steps() const {
  return std::max(1.0, trajectory_length / step_size);
}

double ProposalOutcome::accept_prob() const {
  if (divergent || std::isnan(work)) return 0.0;
  return work <= 0.0 ? 1.0 : std::exp(-work);
}

Vector refresh_velocity(int dim, Rng& rng) {
  Vector u = rng.normal_vector(dim);
  u.normalize();
  return u;
}

Vector refresh_gaussian_velocity(int dim, Rng& rng) {
  return rng.normal_vector(dim);
}

ProposalOutcome propose(const ChainState& start, double eps, int n,
                        const TargetDensity& target, Flavor flavor) {
  ProposalOutcome out;
  out.end_state = start;
  try {
    for (int i = 0; i < n; ++i) {
      const EnergyDelta delta = leapfrog_step(out.end_state, eps, target, flavor);
      ++out.steps_taken;
      if (!delta.finite() || std::abs(delta.potential) > kDivergenceThreshold ||
          std::abs(delta.kinetic) > kDivergenceThreshold) {
        out.divergent = true;
        break;
      }
      out.work += delta.total();
    }
  } catch (const DivergenceError&) {
    out.divergent = true;
    ++out.steps_taken;
  }
  // One new gradient per step; the start gradient is cached in the state.
  out.grad_calls = static_cast<std::uint64_t>(out.steps_taken);
  if (out.divergent) {
    out.work = std::numeric_limits<double>::infinity();
  } else {
    out.end_state.z = time_reverse(std::move(out.end_state.z));
  }
  return out;
}

bool metropolis_accept(double work, Rng& rng) {
  return rng.uniform() < std::exp(-work);
}

ProposalOutcome mh_step(ChainState& state, const KernelConfig& cfg,
                        TrajectorySchedule& schedule,
                        const TargetDensity& target, Rng& rng) {
  const int n = schedule.draw_steps(rng);
  ProposalOutcome out = propose(state, cfg.step_size, n, target, cfg.flavor);
  if (cfg.metropolis) {
    out.accepted = metropolis_accept(out.work, rng);
  } else {
    out.accepted = !out.divergent;
  }
  if (out.accepted) state = out.end_state;
  state.z.u = cfg.flavor == Flavor::Microcanonical
                  ? refresh_velocity(target.dim(), rng)
                  : refresh_gaussian_velocity(target.dim(), rng);
  return out;
}

}  // namespace mams
