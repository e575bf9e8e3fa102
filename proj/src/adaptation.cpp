#include "mams/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mams/diagnostics.hpp"
#include "mams/errors.hpp"

namespace mams {

DualAveragingState DualAveragingState::start(double eps0,
                                             DualAveragingSettings settings) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    throw ConfigurationError("initial step size must be positive and finite");
  }
  DualAveragingState state;
  state.log_eps = std::log(eps0);
  state.log_eps_avg = state.log_eps;
  state.mu = std::log(10.0 * eps0);
  state.settings = settings;
  return state;
}

double DualAveragingState::step_size() const { return std::exp(log_eps); }

double DualAveragingState::final_step_size() const {
  return std::exp(log_eps_avg);
}

DualAveragingState dual_averaging_update(DualAveragingState state,
                                         double accept_prob) {
  const auto& cfg = state.settings;
  const double alpha = std::isfinite(accept_prob) ? std::clamp(accept_prob, 0.0, 1.0) : 0.0;
  const double m = state.iteration;
  const double w = 1.0 / (m + cfg.t0);
  state.h_avg = (1.0 - w) * state.h_avg + w * (cfg.target_accept - alpha);
  state.log_eps = state.mu - std::sqrt(m) / cfg.gamma * state.h_avg;
  const double eta = std::pow(m, -cfg.kappa);
  state.log_eps_avg = eta * state.log_eps + (1.0 - eta) * state.log_eps_avg;
  state.iteration = m + 1.0;
  return state;
}

Vector estimate_preconditioner(std::span<const Vector> samples) {
  if (samples.size() < 100) {
    throw ConfigurationError("preconditioner estimate needs at least 100 samples");
  }
  const Eigen::Index dim = samples.front().size();
  Vector mean = Vector::Zero(dim);
  Vector m2 = Vector::Zero(dim);
  double n = 0.0;
  for (const auto& x : samples) {
    n += 1.0;
    const Vector delta = x - mean;
    mean += delta / n;
    m2 += delta.cwiseProduct(x - mean);
  }
  Vector sd = (m2 / (n - 1.0)).cwiseSqrt();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(sd[i] >= 1e-10)) sd[i] = 1e-10;
  }
  return sd;
}

AlbaUpdate alba_update(const AlbaState& state, std::span<const Vector> window) {
  if (window.size() < 200) {
    throw ConfigurationError("ALBA window needs at least 200 samples");
  }
  AlbaUpdate out{state, 0.0, false};
  const Eigen::Index dim = window.front().size();
  std::vector<double> series(window.size());
  std::vector<double> taus(dim);
  try {
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (std::size_t t = 0; t < window.size(); ++t) series[t] = window[t][i];
      taus[i] = tau_int(series);
    }
  } catch (const DegenerateSeriesError&) {
    out.held = true;
    out.tau_bar = std::numeric_limits<double>::infinity();
    return out;
  }
  out.tau_bar = harmonic_mean_tau(taus);
  if (out.tau_bar > static_cast<double>(window.size()) / 10.0) {
    out.held = true;
    return out;
  }
  out.state.trajectory_length = state.constant * state.trajectory_length * out.tau_bar;
  return out;
}

std::uint64_t TuningSchedule::stage_budget(int stage) const {
  return static_cast<std::uint64_t>(
      std::floor(stage_fractions.at(stage) * static_cast<double>(total_budget)));
}

std::uint64_t TuningSchedule::tuning_budget() const {
  return stage_budget(0) + stage_budget(1) + stage_budget(2);
}

std::uint64_t TuningSchedule::sampling_budget() const {
  return total_budget - tuning_budget();
}

void TuningSchedule::validate() const {
  double sum = 0.0;
  for (double f : stage_fractions) {
    if (!(f >= 0.0)) throw ConfigurationError("stage fractions must be non-negative");
    sum += f;
  }
  if (!(sum < 1.0)) throw ConfigurationError("stage fractions must sum to less than 1");
}

double initial_step_size(const ChainState& state, const TargetDensity& target,
                         Flavor flavor, std::uint64_t max_calls,
                         std::uint64_t& calls) {
  double eps = 1.0;
  for (int i = 0; i < 64 && calls < max_calls; ++i) {
    ChainState probe = state;
    ++calls;
    try {
      const EnergyDelta delta = leapfrog_step(probe, eps, target, flavor);
      if (delta.finite() && std::abs(delta.potential) <= kDivergenceThreshold &&
          std::abs(delta.kinetic) <= kDivergenceThreshold) {
        return eps;
      }
    } catch (const DivergenceError&) {
    }
    eps *= 0.5;
  }
  return eps;
}

namespace {

constexpr double kMinStepSize = 1e-8;

/// Shared bookkeeping for one tuning run.
struct Tuner {
  Rng& rng;
  std::uint64_t used = 0;
  double target_accept;
  bool adapt_step;

  /// Run the chain until `limit` gradient calls have been spent overall.
  /// With `adapt` the step size follows dual averaging and is frozen at the
  /// averaged value at the end.
  void run(Chain& chain, const TargetDensity& target, std::uint64_t limit,
           bool adapt, std::vector<Vector>* samples) {
    adapt = adapt && adapt_step;
    DualAveragingState da = DualAveragingState::start(
        chain.config().step_size, {target_accept, 0.05, 10.0, 0.75});
    double accept_sum = 0.0;
    std::uint64_t proposals = 0;
    while (used + static_cast<std::uint64_t>(chain.max_steps()) <= limit) {
      const ProposalOutcome out = chain.step(target, rng);
      used += out.grad_calls;
      ++proposals;
      accept_sum += out.accept_prob();
      if (samples) samples->push_back(chain.state().z.x);
      if (adapt) {
        da = dual_averaging_update(da, out.accept_prob());
        const double eps = std::min(da.step_size(), 1e6);
        if (eps < kMinStepSize && accept_sum / proposals < 0.1) {
          throw TuningError("step size collapsed: acceptance stays below 0.1");
        }
        chain.set_hyperparameters(std::max(eps, kMinStepSize),
                                  chain.config().trajectory_length);
      }
    }
    if (adapt && proposals > 0) {
      chain.set_hyperparameters(std::max(da.final_step_size(), kMinStepSize),
                                chain.config().trajectory_length);
    }
  }
};

}  // namespace

TuningResult run_tuning(const TargetDensity& target,
                        const TuningSchedule& schedule, SamplerKind kind,
                        Rng& rng, const TuningOptions& options) {
  schedule.validate();
  const int dim = target.dim();
  const Flavor flavor = flavor_of(kind);
  const double accept = std::isnan(options.target_accept)
                            ? default_target_accept(kind)
                            : options.target_accept;
  const bool adapt_length =
      !options.fixed_trajectory_length && options.alba_rounds > 0;

  KernelConfig cfg;
  cfg.flavor = flavor;
  cfg.sequence = options.sequence;
  cfg.target_accept = accept;
  cfg.trajectory_length = options.fixed_trajectory_length.value_or(
      initial_trajectory_length(kind, dim));
  cfg.step_size = options.fixed_step_size.value_or(1.0);
  if (kind == SamplerKind::MamsLangevin) {
    cfg.l_partial = kPartialRefreshRatio * cfg.trajectory_length;
  }

  const Vector x0 = options.initial_position ? *options.initial_position
                                             : rng.normal_vector(dim);
  TuningResult result{cfg, target, ChainState{}, Vector::Ones(dim), 0, {}, {}};
  result.tau_bar = std::numeric_limits<double>::quiet_NaN();

  const std::uint64_t limit1 = schedule.stage_budget(0);
  const std::uint64_t limit2 = limit1 + schedule.stage_budget(1);
  const std::uint64_t limit3 = limit2 + schedule.stage_budget(2);
  if (limit3 == 0) {
    // Nothing to spend: defaults, and a state whose gradient is still unknown.
    result.state.z = {x0, Vector()};
    return result;
  }

  Tuner tuner{rng, 0, accept, !options.fixed_step_size};
  TargetDensity current = target;
  ChainState state = initial_state(kind, x0, current, rng);
  tuner.used = 1;
  if (!options.fixed_step_size) {
    cfg.step_size = initial_step_size(state, current, flavor, limit1, tuner.used);
  }
  Chain chain(kind, cfg, state);

  // Stage 1: step size at the initial trajectory length.
  std::vector<Vector> stage1;
  tuner.run(chain, current, limit1, true, &stage1);

  // Stage 2: diagonal preconditioning, then step size again.
  const std::size_t half = stage1.size() / 2;
  if (options.precondition && stage1.size() - half >= 100 && tuner.used + 2 <= limit2) {
    const std::span<const Vector> tail(stage1.data() + half, stage1.size() - half);
    result.scales = estimate_preconditioner(tail);
    current = precondition(target, result.scales);
    const Vector x = chain.state().z.x.cwiseQuotient(result.scales);
    ChainState moved = initial_state(kind, x, current, rng);
    ++tuner.used;
    KernelConfig next = chain.config();
    if (!options.fixed_step_size) {
      next.step_size = initial_step_size(moved, current, flavor, limit2, tuner.used);
    }
    chain = Chain(kind, next, std::move(moved));
  } else if (options.precondition) {
    result.warnings.push_back("too few stage-1 samples to estimate a preconditioner");
  }
  tuner.run(chain, current, limit2, true, nullptr);

  // Stage 3: trajectory length.
  if (!adapt_length) {
    tuner.run(chain, current, limit3, true, nullptr);
  } else {
    const std::uint64_t start = tuner.used;
    const std::uint64_t span = limit3 > start ? limit3 - start : 0;
    const int rounds = options.alba_rounds;
    for (int r = 0; r < rounds; ++r) {
      const std::uint64_t round_end = start + span * (r + 1) / rounds;
      const std::uint64_t round_start = std::max(tuner.used, start + span * r / rounds);
      const std::uint64_t window_end = round_start + (round_end - round_start) * 2 / 3;
      std::vector<Vector> window;
      tuner.run(chain, current, window_end, false, &window);
      if (window.size() >= 200) {
        const AlbaUpdate update =
            alba_update({chain.config().trajectory_length, alba_constant(kind)}, window);
        result.tau_bar = update.tau_bar;
        if (update.held) {
          result.warnings.push_back("ALBA window looked non-stationary; L held");
        } else {
          chain.set_hyperparameters(chain.config().step_size,
                                    update.state.trajectory_length);
        }
      } else {
        result.warnings.push_back("ALBA window shorter than 200 samples; L held");
      }
      tuner.run(chain, current, round_end, true, nullptr);
    }
  }

  result.config = chain.config();
  result.target = current;
  result.state = chain.state();
  result.gradient_calls = tuner.used;
  return result;
}

}  // namespace mams
