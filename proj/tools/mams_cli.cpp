// Command-line front end: tune, sample, benchmark, grid-l.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mams/errors.hpp"
#include "mams/harness.hpp"

namespace {

enum ExitCode {
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kTuning = 3,
  kIo = 4,
  kNumerical = 5,
};

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<std::uint64_t> budget;
  std::optional<std::string> out;
  bool no_mh = false;
};

bool is_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) return false;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto j = nlohmann::json::parse(buffer.str(), nullptr, false);
  return j.is_object() && j.contains("config") && j.contains("tuned");
}

mams::ExperimentConfig resolve(const Overrides& o) {
  mams::ExperimentConfig cfg;
  if (!o.config.empty()) {
    if (is_manifest(o.config)) {
      std::ifstream in(o.config);
      std::stringstream buffer;
      buffer << in.rdbuf();
      cfg = mams::config_from_json(nlohmann::json::parse(buffer.str()).at("config").dump());
    } else {
      cfg = mams::load_config(o.config);
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.chains) cfg.chains = *o.chains;
  if (o.budget) cfg.budget = *o.budget;
  if (o.out) cfg.out_dir = *o.out;
  if (o.no_mh) cfg.metropolis = false;
  cfg.validate();
  return cfg;
}

void report(const mams::RunSummary& s) {
  std::printf("%s / %s: eps=%.4g L=%.4g accept=%.3f gradients_to_threshold=%s\n",
              mams::to_string(s.config.model.kind).c_str(),
              mams::to_string(s.config.sampler).c_str(), s.tuned.step_size,
              s.tuned.trajectory_length, s.accept_rate,
              s.gradients_to_threshold ? std::to_string(*s.gradients_to_threshold).c_str()
                                       : "NA");
}

int cmd_tune(const Overrides& o) {
  const auto cfg = resolve(o);
  std::vector<std::string> warnings;
  const auto tuned = mams::tune(cfg, &warnings);
  mams::write_tuned(cfg, tuned, warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("eps=%.6g L=%.6g tuning_gradients=%llu -> %s/tuned.json\n", tuned.step_size,
              tuned.trajectory_length,
              static_cast<unsigned long long>(tuned.tuning_gradient_calls),
              cfg.out_dir.c_str());
  return kOk;
}

int cmd_sample(const Overrides& o) {
  const auto cfg = resolve(o);
  mams::RunSummary summary;
  if (!o.config.empty() && is_manifest(o.config)) {
    // Replay with the recorded tuning; flags may still change seed, chains, out.
    std::ifstream in(o.config);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto j = nlohmann::json::parse(buffer.str());
    const auto tuned = mams::tuned_from_json(j.at("tuned").dump());
    summary = mams::run_chains(cfg, tuned);
    if (j.contains("warnings")) summary.warnings = j.at("warnings").get<std::vector<std::string>>();
    mams::write_outputs(summary, cfg.out_dir);
  } else {
    summary = mams::run_experiment(cfg);
  }
  for (const auto& w : summary.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  report(summary);
  if (summary.ks_pvalue) std::printf("KS p-value of x_1 vs N(0,1): %.4g\n", *summary.ks_pvalue);
  return kOk;
}

int cmd_benchmark(const Overrides& o) {
  const auto cfg = resolve(o);
  for (const auto& s : mams::run_benchmark(cfg)) report(s);
  return kOk;
}

int cmd_grid(const Overrides& o) {
  const auto cfg = resolve(o);
  if (cfg.l_grid.empty()) throw mams::ConfigurationError("grid-l needs a non-empty l_grid");
  for (const auto& row : mams::grid_search_L(cfg, cfg.l_grid)) {
    std::printf("L=%.4g eps=%.4g accept=%.3f gradients_to_threshold=%s\n",
                row.trajectory_length, row.step_size, row.accept_rate,
                row.gradients_to_threshold ? std::to_string(*row.gradients_to_threshold).c_str()
                                           : "NA");
  }
  return kOk;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config or run manifest");
  cmd->add_option("--seed", o.seed, "base seed; chain i uses seed + i");
  cmd->add_option("--chains", o.chains, "number of chains");
  cmd->add_option("--budget", o.budget, "per-chain gradient budget, tuning included");
  cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metropolis-adjusted microcanonical sampler and benchmarks"};
  app.require_subcommand(1);
  Overrides o;
  auto* tune = app.add_subcommand("tune", "tune eps and L and write tuned.json");
  auto* sample = app.add_subcommand("sample", "tune (or replay a manifest) and run chains");
  auto* bench = app.add_subcommand("benchmark", "model x sampler sweep");
  auto* grid = app.add_subcommand("grid-l", "grid search over the trajectory length");
  for (auto* cmd : {tune, sample, bench, grid}) add_common(cmd, o);
  sample->add_flag("--no-mh", o.no_mh, "run without the Metropolis correction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*tune) return cmd_tune(o);
    if (*sample) return cmd_sample(o);
    if (*bench) return cmd_benchmark(o);
    if (*grid) return cmd_grid(o);
  } catch (const mams::ConfigurationError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const mams::TuningError& e) {
    std::fprintf(stderr, "tuning error: %s\n", e.what());
    return kTuning;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  } catch (const mams::DivergenceError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const mams::DomainError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.rfind("cannot write", 0) == 0 || what.rfind("write failed", 0) == 0) {
      std::fprintf(stderr, "i/o error: %s\n", e.what());
      return kIo;
    }
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOther;
  }
  return kOther;
}
