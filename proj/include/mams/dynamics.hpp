#ifndef MAMS_DYNAMICS_HPP
#define MAMS_DYNAMICS_HPP

#include <cstdint>

#include "mams/target.hpp"

namespace mams {

/// Microcanonical: unit-norm velocity, isokinetic flow. Canonical: HMC.
enum class Flavor { Microcanonical, Canonical };

struct PhasePoint {
  Vector x;
  Vector u;
};

/// Potential and kinetic energy change of one or more updates.
struct EnergyDelta {
  double potential = 0.0;
  double kinetic = 0.0;

  double total() const { return potential + kinetic; }
  bool finite() const;
  EnergyDelta& operator+=(const EnergyDelta& other) {
    potential += other.potential;
    kinetic += other.kinetic;
    return *this;
  }
};

struct VelocityUpdate {
  Vector u;
  double delta_k = 0.0;
};

/// Below this gradient norm the velocity update is skipped.
inline constexpr double kZeroGradient = 1e-300;

/// x' = x + eps u.
PhasePoint position_update(const PhasePoint& z, double eps);

/**
 * Exact solution of the microcanonical velocity flow
 * du/dt = -(I - u u^T) grad / (d - 1) at fixed position, for time eps.
 *
 * With e = -grad/|grad| and delta = eps |grad| / (d - 1):
 *   u' = [u + (sinh delta + (e.u)(cosh delta - 1)) e]
 *        / (cosh delta + (e.u) sinh delta),
 * renormalized to unit length, and
 *   delta_k = (d - 1) log(cosh delta + (e.u) sinh delta).
 * Evaluated in a form that stays finite for delta in the hundreds.
 *
 * Throws DivergenceError on a non-finite gradient.
 */
VelocityUpdate velocity_update_micro(const Vector& u, const Vector& grad,
                                     double eps);

/// u' = u - eps grad; delta_k = |u'|^2/2 - |u|^2/2.
VelocityUpdate velocity_update_hmc(const Vector& u, const Vector& grad,
                                   double eps);

/// In-place variants used by the integrators; return delta_k.
double velocity_update_micro_inplace(Vector& u, const Vector& grad, double eps);
double velocity_update_hmc_inplace(Vector& u, const Vector& grad, double eps);

/// (x, u) -> (x, -u).
PhasePoint time_reverse(PhasePoint z);

/// Divergence of the microcanonical velocity field, -|grad| (e.u).
double micro_divergence(const Vector& u, const Vector& grad);

/**
 * A phase point together with L(x) and grad L(x), so consecutive leapfrog
 * steps share the gradient at their common position.
 */
struct ChainState {
  PhasePoint z;
  double potential = 0.0;
  Vector grad;
};

/// Evaluate L and grad L at x (one gradient call).
ChainState make_state(const Vector& x, const Vector& u,
                      const TargetDensity& target);

/**
 * One leapfrog step B_{eps/2} A_eps B_{eps/2}, in place. Uses the cached
 * gradient in `state` and evaluates exactly one new gradient.
 * Throws DivergenceError if the new gradient or energy is non-finite.
 */
EnergyDelta leapfrog_step(ChainState& state, double eps,
                          const TargetDensity& target, Flavor flavor);

}  // namespace mams

#endif  // MAMS_DYNAMICS_HPP
