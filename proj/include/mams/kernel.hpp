#ifndef MAMS_KERNEL_HPP
#define MAMS_KERNEL_HPP

#include <string>

#include "mams/langevin.hpp"
#include "mams/proposal.hpp"

namespace mams {

enum class SamplerKind { Mams, MamsLangevin, Hmc };

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(const std::string& name);

Flavor flavor_of(SamplerKind kind);

/// Default acceptance target: 0.9 for both MAMS variants, 0.8 for HMC.
double default_target_accept(SamplerKind kind);

/// ALBA proportionality constant: 0.3 plain, 0.23 Langevin.
double alba_constant(SamplerKind kind);

/// Initial trajectory length: sqrt(d) for unit-speed microcanonical
/// dynamics, 1 for HMC whose speed is already ~ sqrt(d).
double initial_trajectory_length(SamplerKind kind, int dim);

/// A fresh chain state at x with a velocity appropriate for `kind`.
ChainState initial_state(SamplerKind kind, const Vector& x,
                         const TargetDensity& target, Rng& rng);

/**
 * A single chain: kernel configuration plus the trajectory schedule state.
 * `step` advances the chain by one sample.
 */
class Chain {
 public:
  Chain(SamplerKind kind, KernelConfig cfg, ChainState state,
        std::uint64_t halton_start = 1);

  ProposalOutcome step(const TargetDensity& target, Rng& rng);

  /// Largest number of gradient calls the next `step` can spend.
  int max_steps() const;

  const ChainState& state() const { return state_; }
  ChainState& state() { return state_; }
  const KernelConfig& config() const { return cfg_; }
  SamplerKind kind() const { return kind_; }

  /// Change eps / L; rebuilds the schedule (keeping its Halton position)
  /// and, for Langevin, resets L_partial to 1.25 L.
  void set_hyperparameters(double step_size, double trajectory_length);

 private:
  SamplerKind kind_;
  KernelConfig cfg_;
  ChainState state_;
  TrajectorySchedule schedule_;
};

}  // namespace mams

#endif  // MAMS_KERNEL_HPP
