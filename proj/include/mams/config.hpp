#ifndef MAMS_CONFIG_HPP
#define MAMS_CONFIG_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mams/kernel.hpp"
#include "mams/models.hpp"

namespace mams {

/**
 * Everything needed to run one experiment. Serialized as JSON; every field
 * has a default so a config file only lists what it changes.
 *
 * `budget` is the per-chain gradient budget. The tuning stages take the
 * fractions in `stage_fractions` of it, sampling gets the rest.
 */
struct ExperimentConfig {
  ModelSpec model;
  SamplerKind sampler = SamplerKind::Mams;
  int chains = 32;
  std::uint64_t budget = 20000;
  std::array<double, 3> stage_fractions{0.1, 0.1, 0.1};
  /// NaN selects the sampler default (0.9 MAMS, 0.8 HMC).
  double target_accept = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  /// Empty selects the model default.
  std::optional<Reduction> reduction;
  bool precondition = true;
  std::optional<double> trajectory_length;
  std::optional<double> step_size;
  StepSequence sequence = StepSequence::Halton;
  int alba_rounds = 3;
  bool metropolis = true;
  double threshold = 0.01;
  double grid_ratio = 1.05;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 0;
  /// Bins of the x_1 histogram; 0 disables it.
  int histogram_bins = 0;
  double histogram_range = 5.0;
  /// Trajectory lengths for grid-l.
  std::vector<double> l_grid;
  /// Model x sampler sweep for benchmark.
  std::vector<ModelSpec> benchmark_models;
  std::vector<SamplerKind> benchmark_samplers;

  void validate() const;
  Reduction resolved_reduction() const;
};

/// Tuned hyperparameters and warm start, enough to skip tuning on replay.
struct TunedState {
  double step_size = 1.0;
  double trajectory_length = 1.0;
  double l_partial = std::numeric_limits<double>::infinity();
  Vector scales;
  /// Warm position in sampler (preconditioned) coordinates.
  Vector position;
  std::uint64_t tuning_gradient_calls = 0;
  double tau_bar = std::numeric_limits<double>::quiet_NaN();
};

std::string to_string(Reduction reduction);
Reduction parse_reduction(const std::string& name);

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

std::string tuned_to_json(const TunedState& tuned);
TunedState tuned_from_json(const std::string& text);

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace mams

#endif  // MAMS_CONFIG_HPP
