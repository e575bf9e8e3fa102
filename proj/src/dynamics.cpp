#include "mams/dynamics.hpp"

#include <cmath>

#include "mams/errors.hpp"

namespace mams {

bool EnergyDelta::finite() const {
  return std::isfinite(potential) && std::isfinite(kinetic);
}

PhasePoint position_update(const PhasePoint& z, double eps) {
  return {z.x + eps * z.u, z.u};
}

double velocity_update_micro_inplace(Vector& u, const Vector& grad, double eps) {
  const double g_norm = grad.norm();
  if (!std::isfinite(g_norm)) {
    throw DivergenceError("non-finite gradient in velocity update");
  }
  if (g_norm < kZeroGradient || eps == 0.0) return 0.0;

  const double dof = static_cast<double>(u.size() - 1);
  Vector e = -grad / g_norm;
  double delta = eps * g_norm / dof;
  double c = e.dot(u);
  // B_{-eps} with direction e equals B_{eps} with direction -e.
  if (delta < 0.0) {
    delta = -delta;
    e = -e;
    c = -c;
  }

  // Numerator and denominator multiplied by 2 exp(-delta).
  const double a = std::exp(-delta);
  const double one_minus_a2 = -std::expm1(-2.0 * delta);
  const double one_minus_a = -std::expm1(-delta);
  const double den = 2.0 - (1.0 - c) * one_minus_a2;
  const double coef_e = one_minus_a2 + c * one_minus_a * one_minus_a;

  u = (2.0 * a) * u + coef_e * e;
  u /= den;
  u.normalize();

  // log(cosh d + c sinh d) = d + log(1 - (1 - c)(1 - exp(-2d))/2)
  return dof * (delta + std::log1p(-0.5 * (1.0 - c) * one_minus_a2));
}

double velocity_update_hmc_inplace(Vector& u, const Vector& grad, double eps) {
  if (!grad.allFinite()) {
    throw DivergenceError("non-finite gradient in velocity update");
  }
  const double delta_k = -eps * grad.dot(u) + 0.5 * eps * eps * grad.squaredNorm();
  u -= eps * grad;
  return delta_k;
}

VelocityUpdate velocity_update_micro(const Vector& u, const Vector& grad,
                                     double eps) {
  VelocityUpdate out{u, 0.0};
  out.delta_k = velocity_update_micro_inplace(out.u, grad, eps);
  return out;
}

VelocityUpdate velocity_update_hmc(const Vector& u, const Vector& grad,
                                   double eps) {
  VelocityUpdate out{u, 0.0};
  out.delta_k = velocity_update_hmc_inplace(out.u, grad, eps);
  return out;
}

PhasePoint time_reverse(PhasePoint z) {
  z.u = -z.u;
  return z;
}

double micro_divergence(const Vector& u, const Vector& grad) {
  const double g_norm = grad.norm();
  if (g_norm < kZeroGradient) return 0.0;
  // e.u = -grad.u / |grad|, so -|grad| (e.u) = grad.u
  return grad.dot(u);
}

ChainState make_state(const Vector& x, const Vector& u,
                      const TargetDensity& target) {
  ChainState state;
  state.z = {x, u};
  state.grad.resize(x.size());
  state.potential = target.evaluate(x, state.grad);
  return state;
}

namespace {

double half_kick(Vector& u, const Vector& grad, double eps, Flavor flavor) {
  return flavor == Flavor::Microcanonical
             ? velocity_update_micro_inplace(u, grad, eps)
             : velocity_update_hmc_inplace(u, grad, eps);
}

}  // namespace

EnergyDelta leapfrog_step(ChainState& state, double eps,
                          const TargetDensity& target, Flavor flavor) {
  EnergyDelta delta;
  delta.kinetic += half_kick(state.z.u, state.grad, 0.5 * eps, flavor);
  state.z.x += eps * state.z.u;
  const double potential = target.evaluate(state.z.x, state.grad);
  if (!std::isfinite(potential)) {
    throw DivergenceError("non-finite potential after position update");
  }
  delta.potential = potential - state.potential;
  state.potential = potential;
  delta.kinetic += half_kick(state.z.u, state.grad, 0.5 * eps, flavor);
  return delta;
}

}  // namespace mams
