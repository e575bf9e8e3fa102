#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mams/errors.hpp"
#include "mams/harness.hpp"

using namespace mams;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mams_test_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

ExperimentConfig small_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.model = default_spec(ModelKind::StandardGaussian);
  cfg.model.dim = 20;
  cfg.chains = 4;
  cfg.budget = 8000;
  cfg.seed = 17;
  cfg.out_dir = temp_dir(name);
  return cfg;
}

}  // namespace

TEST(Config, RoundTrip) {
  ExperimentConfig cfg;
  cfg.model = default_spec(ModelKind::Bimodal);
  cfg.model.mixture_weight = 0.1;
  cfg.sampler = SamplerKind::MamsLangevin;
  cfg.chains = 7;
  cfg.budget = 123456;
  cfg.stage_fractions = {0.05, 0.1, 0.15};
  cfg.target_accept = 0.95;
  cfg.seed = 99;
  cfg.reduction = Reduction::Avg;
  cfg.trajectory_length = 3.25;
  cfg.sequence = StepSequence::Uniform;
  cfg.l_grid = {1.0, 2.5};
  cfg.benchmark_models = {default_spec(ModelKind::Funnel)};
  cfg.benchmark_samplers = {SamplerKind::Hmc};
  const std::string once = config_to_json(cfg);
  const ExperimentConfig parsed = config_from_json(once);
  EXPECT_EQ(config_to_json(parsed), once);
  EXPECT_EQ(parsed.model.mixture_weight, 0.1);
  EXPECT_EQ(*parsed.trajectory_length, 3.25);
  EXPECT_FALSE(parsed.step_size.has_value());
}

TEST(Config, DefaultsAndNulls) {
  const ExperimentConfig cfg = config_from_json("{}");
  EXPECT_EQ(cfg.chains, 32);
  EXPECT_TRUE(std::isnan(cfg.target_accept));
  EXPECT_EQ(config_to_json(config_from_json(config_to_json(cfg))), config_to_json(cfg));
  const ExperimentConfig named = config_from_json(R"({"model": "Funnel"})");
  EXPECT_EQ(named.model.dim, 20);
}

TEST(Config, InvalidInputsThrow) {
  EXPECT_THROW(config_from_json("not json"), ConfigurationError);
  EXPECT_THROW(config_from_json(R"({"chains": 0})"), ConfigurationError);
  EXPECT_THROW(config_from_json(R"({"sampler": "NUTS"})"), ConfigurationError);
  EXPECT_THROW(config_from_json(R"({"stage_fractions": [0.5, 0.5, 0.1]})"), ConfigurationError);
  EXPECT_THROW(config_from_json(R"({"target_accept": 1.5})"), ConfigurationError);
  EXPECT_THROW(config_from_json(R"({"chains": "many"})"), ConfigurationError);
}

TEST(Config, TunedStateRoundTripIsExact) {
  TunedState t;
  t.step_size = 0.1 + 1e-17;
  t.trajectory_length = 1.0 / 3.0;
  t.scales = (Vector(2) << std::sqrt(2.0), 1e-300).finished();
  t.position = (Vector(2) << -0.123456789012345678, 7.0).finished();
  const TunedState back = tuned_from_json(tuned_to_json(t));
  EXPECT_EQ(back.step_size, t.step_size);
  EXPECT_EQ(back.trajectory_length, t.trajectory_length);
  EXPECT_EQ(back.scales, t.scales);
  EXPECT_EQ(back.position, t.position);
  EXPECT_TRUE(std::isinf(back.l_partial));
}

TEST(Harness, DeterministicAcrossThreadCounts) {
  ExperimentConfig a = small_config("det_a");
  a.threads = 1;
  ExperimentConfig b = small_config("det_b");
  b.threads = 3;
  run_experiment(a);
  run_experiment(b);
  EXPECT_EQ(slurp(std::filesystem::path(a.out_dir) / "summary.csv"),
            slurp(std::filesystem::path(b.out_dir) / "summary.csv"));
  EXPECT_EQ(slurp(std::filesystem::path(a.out_dir) / "trace.csv"),
            slurp(std::filesystem::path(b.out_dir) / "trace.csv"));
}

TEST(Harness, GradientAccountingAndOutputs) {
  const ExperimentConfig cfg = small_config("accounting");
  const RunSummary s = run_experiment(cfg);
  EXPECT_EQ(s.recorded_gradient_calls, s.counted_gradient_calls);
  EXPECT_GT(s.recorded_gradient_calls, 0u);
  for (const auto& c : s.chains) {
    const TuningSchedule schedule{cfg.budget, cfg.stage_fractions};
    EXPECT_GE(c.total_gradient_calls, schedule.sampling_budget());
    EXPECT_EQ(c.seed, cfg.seed + c.chain);
  }
  const std::string trace = slurp(std::filesystem::path(cfg.out_dir) / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')),
            "model,sampler,chain,gradient_calls,b2_max,b2_avg,accept_rate,divergences");
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "manifest.json"));
}

TEST(Harness, ManifestReplayReproducesResult) {
  const ExperimentConfig cfg = small_config("replay");
  const RunSummary first = run_experiment(cfg);
  const RunSummary again = replay_manifest((std::filesystem::path(cfg.out_dir) / "manifest.json").string());
  EXPECT_EQ(first.gradients_to_threshold, again.gradients_to_threshold);
  EXPECT_EQ(summary_csv(first), summary_csv(again));
  EXPECT_EQ(trace_csv(first), trace_csv(again));
}

TEST(Harness, ZeroBudgetSingleChain) {
  ExperimentConfig cfg = small_config("zero");
  cfg.chains = 1;
  cfg.budget = 0;
  const RunSummary s = run_experiment(cfg);
  EXPECT_TRUE(s.median.values.empty());
  EXPECT_FALSE(s.gradients_to_threshold.has_value());
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "manifest.json"));
}

TEST(Harness, SinglePointGridEqualsFixedLengthRun) {
  ExperimentConfig cfg = small_config("grid");
  const auto rows = grid_search_L(cfg, {2.0}, false);
  ASSERT_EQ(rows.size(), 1u);
  ExperimentConfig fixed = cfg;
  fixed.trajectory_length = 2.0;
  const RunSummary s = run_chains(fixed, tune(fixed));
  EXPECT_EQ(rows[0].gradients_to_threshold, s.gradients_to_threshold);
  EXPECT_EQ(rows[0].step_size, s.tuned.step_size);
  EXPECT_THROW(grid_search_L(cfg, {}, false), ConfigurationError);
}

TEST(Harness, HistogramPair) {
  ExperimentConfig cfg = small_config("hist");
  cfg.model.dim = 100;
  cfg.chains = 1;
  cfg.budget = 20000;
  cfg.stage_fractions = {0.0, 0.0, 0.0};
  cfg.step_size = 20.0;
  cfg.trajectory_length = 20.0;
  cfg.histogram_bins = 50;
  run_experiment(cfg);
  cfg.metropolis = false;
  run_experiment(cfg);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "histogram_adjusted.csv"));
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "histogram_unadjusted.csv"));
}

TEST(Harness, UnknownTunedDimensionThrows) {
  ExperimentConfig cfg = small_config("baddim");
  TunedState t;
  t.scales = Vector::Ones(3);
  t.position = Vector::Zero(3);
  EXPECT_THROW(run_chains(cfg, t), ConfigurationError);
}

TEST(Harness, BenchmarkKeepsModelsWithSameName) {
  ExperimentConfig cfg = small_config("bench");
  cfg.chains = 2;
  cfg.budget = 2000;
  ModelSpec small = default_spec(ModelKind::StandardGaussian);
  small.dim = 4;
  ModelSpec large = small;
  large.dim = 8;
  cfg.benchmark_models = {small, large};
  cfg.benchmark_samplers = {SamplerKind::Mams};
  const auto results = run_benchmark(cfg);
  ASSERT_EQ(results.size(), 2u);
  const std::filesystem::path root(cfg.out_dir);
  EXPECT_TRUE(std::filesystem::exists(root / "StandardGaussian_d4_MAMS" / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(root / "StandardGaussian_d8_MAMS" / "summary.csv"));
  std::ifstream in(root / "benchmark.csv");
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header.rfind("run,model,", 0), 0u);
  EXPECT_EQ(first.rfind("StandardGaussian_d4_MAMS,", 0), 0u);
  EXPECT_EQ(second.rfind("StandardGaussian_d8_MAMS,", 0), 0u);
}
