#include "mams/langevin.hpp"

#include <algorithm>
#include <cmath>

#include "mams/errors.hpp"

namespace mams {

LangevinConfig LangevinConfig::from_kernel(const KernelConfig& cfg) {
  LangevinConfig out;
  out.step_size = cfg.step_size;
  out.steps_per_sample =
      std::max(1, static_cast<int>(std::lround(cfg.avg_steps())));
  out.l_partial = cfg.l_partial;
  return out;
}

Vector partial_refresh(const Vector& u, double eps, double l_partial, Rng& rng) {
  if (!(l_partial > 0.0)) {
    throw ConfigurationError("partial refresh scale must be positive");
  }
  const double c1 = std::exp(-eps / l_partial);
  const double c2 = std::sqrt(-std::expm1(-2.0 * eps / l_partial));
  if (c2 == 0.0) return u;
  const double noise = c2 / std::sqrt(static_cast<double>(u.size()));
  Vector out = c1 * u + noise * rng.normal_vector(u.size());
  out.normalize();
  return out;
}

EnergyDelta obabo_step(ChainState& state, const LangevinConfig& cfg,
                       const TargetDensity& target, Rng& rng) {
  state.z.u = partial_refresh(state.z.u, cfg.step_size, cfg.l_partial, rng);
  const EnergyDelta delta =
      leapfrog_step(state, cfg.step_size, target, Flavor::Microcanonical);
  state.z.u = partial_refresh(state.z.u, cfg.step_size, cfg.l_partial, rng);
  return delta;
}

ProposalOutcome malt_sample_step(ChainState& state, const LangevinConfig& cfg,
                                 const TargetDensity& target, Rng& rng) {
  if (cfg.steps_per_sample < 1) {
    throw ConfigurationError("steps per sample must be >= 1");
  }
  ProposalOutcome out;
  out.end_state = state;
  out.end_state.z.u = refresh_velocity(target.dim(), rng);
  try {
    for (int i = 0; i < cfg.steps_per_sample; ++i) {
      const EnergyDelta delta = obabo_step(out.end_state, cfg, target, rng);
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
  out.grad_calls = static_cast<std::uint64_t>(out.steps_taken);
  if (out.divergent) out.work = std::numeric_limits<double>::infinity();
  out.accepted = metropolis_accept(out.work, rng);
  if (out.accepted) state = out.end_state;
  return out;
}

}  // namespace mams
