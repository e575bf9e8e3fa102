#include "mams/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "mams/errors.hpp"
#include "mams/hmc.hpp"

namespace mams {

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Mams: return "MAMS";
    case SamplerKind::MamsLangevin: return "MAMS-Langevin";
    case SamplerKind::Hmc: return "HMC";
  }
  return "Unknown";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "MAMS") return SamplerKind::Mams;
  if (name == "MAMS-Langevin") return SamplerKind::MamsLangevin;
  if (name == "HMC") return SamplerKind::Hmc;
  throw ConfigurationError("unknown sampler '" + name + "'");
}

Flavor flavor_of(SamplerKind kind) {
  return kind == SamplerKind::Hmc ? Flavor::Canonical : Flavor::Microcanonical;
}

double default_target_accept(SamplerKind kind) {
  return kind == SamplerKind::Hmc ? kHmcTargetAccept : 0.9;
}

double alba_constant(SamplerKind kind) {
  return kind == SamplerKind::MamsLangevin ? 0.23 : 0.3;
}

double initial_trajectory_length(SamplerKind kind, int dim) {
  return kind == SamplerKind::Hmc ? 1.0 : std::sqrt(static_cast<double>(dim));
}

ChainState initial_state(SamplerKind kind, const Vector& x,
                         const TargetDensity& target, Rng& rng) {
  const Vector u = kind == SamplerKind::Hmc
                       ? refresh_gaussian_velocity(target.dim(), rng)
                       : refresh_velocity(target.dim(), rng);
  return make_state(x, u, target);
}

Chain::Chain(SamplerKind kind, KernelConfig cfg, ChainState state,
             std::uint64_t halton_start)
    : kind_(kind),
      cfg_(cfg),
      state_(std::move(state)),
      schedule_(cfg.avg_steps(), cfg.sequence, halton_start) {
  cfg_.flavor = flavor_of(kind);
  if (kind_ == SamplerKind::MamsLangevin && !std::isfinite(cfg_.l_partial)) {
    cfg_.l_partial = kPartialRefreshRatio * cfg_.trajectory_length;
  }
}

ProposalOutcome Chain::step(const TargetDensity& target, Rng& rng) {
  switch (kind_) {
    case SamplerKind::Mams:
      return mh_step(state_, cfg_, schedule_, target, rng);
    case SamplerKind::Hmc:
      return hmc_step(state_, cfg_, schedule_, target, rng);
    case SamplerKind::MamsLangevin:
      return malt_sample_step(state_, LangevinConfig::from_kernel(cfg_), target,
                              rng);
  }
  throw ConfigurationError("unhandled sampler kind");
}

int Chain::max_steps() const {
  if (kind_ == SamplerKind::MamsLangevin) {
    return LangevinConfig::from_kernel(cfg_).steps_per_sample;
  }
  if (cfg_.sequence == StepSequence::Fixed) {
    return std::max(1, static_cast<int>(std::lround(cfg_.avg_steps())));
  }
  return std::max(1, static_cast<int>(std::ceil(schedule_.scale())));
}

void Chain::set_hyperparameters(double step_size, double trajectory_length) {
  if (!(step_size > 0.0) || !(trajectory_length > 0.0)) {
    throw ConfigurationError("step size and trajectory length must be positive");
  }
  cfg_.step_size = step_size;
  cfg_.trajectory_length = trajectory_length;
  if (kind_ == SamplerKind::MamsLangevin) {
    cfg_.l_partial = kPartialRefreshRatio * trajectory_length;
  }
  schedule_ = TrajectorySchedule(cfg_.avg_steps(), cfg_.sequence,
                                 schedule_.halton_index());
}

}  // namespace mams
