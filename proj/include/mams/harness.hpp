#ifndef MAMS_HARNESS_HPP
#define MAMS_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mams/adaptation.hpp"
#include "mams/config.hpp"
#include "mams/diagnostics.hpp"

namespace mams {

inline constexpr const char* kVersion = "mams 0.1.0";

/// One chain's bias trace, one row per grid point it reached.
struct ChainTrace {
  int chain = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> gradient_calls;
  std::vector<double> b2_max;
  std::vector<double> b2_avg;
  std::vector<double> accept_rate;
  std::vector<std::uint64_t> divergences;
  AcceptanceStats stats;
  /// All gradient calls this chain made, including its start evaluation.
  std::uint64_t total_gradient_calls = 0;
  /// x_1 in original coordinates after every sample (histogram runs only).
  std::vector<double> first_coordinate;

  BiasCurve curve(Reduction reduction) const;
};

struct RunSummary {
  ExperimentConfig config;
  TunedState tuned;
  std::vector<std::string> warnings;
  std::vector<ChainTrace> chains;
  BiasCurve median;
  std::optional<std::uint64_t> gradients_to_threshold;
  /// Sum of the per-chain counts and the target's own counter; equal when
  /// the accounting is sound.
  std::uint64_t recorded_gradient_calls = 0;
  std::uint64_t counted_gradient_calls = 0;
  double accept_rate = 0.0;
  std::optional<double> ks_statistic;
  std::optional<double> ks_pvalue;
};

/// Per-chain seed: base seed plus chain index.
std::uint64_t chain_seed(const ExperimentConfig& cfg, int chain);

/// Tune once on a single chain. The tuning chain uses its own stream
/// derived from the base seed.
TunedState tune(const ExperimentConfig& cfg, std::vector<std::string>* warnings = nullptr);

/**
 * Run `cfg.chains` chains from the tuned warm state, each with
 * `budget - tuning budget` gradient calls, and reduce their bias curves.
 * Results do not depend on the number of threads or their scheduling.
 */
RunSummary run_chains(const ExperimentConfig& cfg, const TunedState& tuned);

/// Tune, sample and write trace CSV, summary CSV and manifest to
/// `cfg.out_dir` (histogram CSV too when enabled).
RunSummary run_experiment(const ExperimentConfig& cfg);

/// Re-run the chains recorded in a manifest, skipping tuning.
RunSummary replay_manifest(const std::string& path);

void write_outputs(const RunSummary& summary, const std::string& dir);
std::string summary_csv(const RunSummary& summary);
std::string trace_csv(const RunSummary& summary);
std::string manifest_json(const RunSummary& summary);
std::string histogram_csv(const RunSummary& summary);

/// Writes `tuned.json` (config plus tuned state) to `cfg.out_dir`.
void write_tuned(const ExperimentConfig& cfg, const TunedState& tuned,
                 const std::vector<std::string>& warnings);

struct GridRow {
  double trajectory_length = 0.0;
  double step_size = 0.0;
  double accept_rate = 0.0;
  std::optional<std::uint64_t> gradients_to_threshold;
};

/// For each L: re-tune eps at fixed L, run the chains, record the
/// gradients to threshold. Writes grid_l.csv to `cfg.out_dir`.
std::vector<GridRow> grid_search_L(const ExperimentConfig& cfg,
                                   const std::vector<double>& grid,
                                   bool write = true);

/// Model x sampler sweep; writes one run directory per pair and
/// benchmark.csv to `cfg.out_dir`.
std::vector<RunSummary> run_benchmark(const ExperimentConfig& cfg);

}  // namespace mams

#endif  // MAMS_HARNESS_HPP
