#include "mams/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mams/errors.hpp"

namespace mams {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGridStart = 10;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::uint64_t tuning_seed(std::uint64_t seed) {
  // splitmix64 finalizer, so the tuning stream differs from every chain's.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TuningSchedule schedule_of(const ExperimentConfig& cfg) {
  return {cfg.budget, cfg.stage_fractions};
}

KernelConfig kernel_config(const ExperimentConfig& cfg, const TunedState& tuned) {
  KernelConfig k;
  k.step_size = tuned.step_size;
  k.trajectory_length = tuned.trajectory_length;
  k.l_partial = tuned.l_partial;
  k.flavor = flavor_of(cfg.sampler);
  k.sequence = cfg.sequence;
  k.target_accept = std::isnan(cfg.target_accept) ? default_target_accept(cfg.sampler)
                                                  : cfg.target_accept;
  k.metropolis = cfg.metropolis;
  return k;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ChainTrace run_one_chain(const ExperimentConfig& cfg, const TunedState& tuned,
                         const TargetDensity& target, const GroundTruth& truth,
                         const std::vector<std::uint64_t>& grid, int index) {
  ChainTrace trace;
  trace.chain = index;
  trace.seed = chain_seed(cfg, index);
  const std::uint64_t budget = schedule_of(cfg).sampling_budget();
  if (budget == 0) return trace;

  Rng rng(trace.seed);
  const std::uint64_t halton_start = 1 + rng.engine()() % (1u << 20);
  ChainState state = initial_state(cfg.sampler, tuned.position, target, rng);
  trace.total_gradient_calls = 1;
  Chain chain(cfg.sampler, kernel_config(cfg, tuned), std::move(state), halton_start);

  MomentTracker tracker(target.dim());
  Vector observed;
  std::uint64_t used = 0;
  std::size_t next = 0;
  const bool keep_first = cfg.histogram_bins > 0;
  while (used < budget) {
    const ProposalOutcome out = chain.step(target, rng);
    used += out.grad_calls;
    auto& s = trace.stats;
    ++s.proposals;
    s.accepted += out.accepted ? 1 : 0;
    s.divergences += out.divergent ? 1 : 0;
    s.gradient_calls += out.grad_calls;
    s.accept_prob_sum += out.accept_prob();

    const Vector& x = chain.state().z.x;
    target.observe(x, observed);
    tracker.add(observed);
    if (keep_first) trace.first_coordinate.push_back(target.to_original(x)[0]);

    if (next < grid.size() && used >= grid[next]) {
      const Vector b2 = coordinate_bias(tracker.mean(), truth);
      const double bmax = b2.maxCoeff();
      const double bavg = b2.mean();
      while (next < grid.size() && used >= grid[next]) {
        trace.gradient_calls.push_back(grid[next]);
        trace.b2_max.push_back(bmax);
        trace.b2_avg.push_back(bavg);
        trace.accept_rate.push_back(s.rate());
        trace.divergences.push_back(s.divergences);
        ++next;
      }
    }
  }
  trace.total_gradient_calls += used;
  return trace;
}

}  // namespace

BiasCurve ChainTrace::curve(Reduction reduction) const {
  BiasCurve c;
  c.reduction = reduction;
  c.gradient_calls = gradient_calls;
  c.values = reduction == Reduction::Max ? b2_max : b2_avg;
  return c;
}

std::uint64_t chain_seed(const ExperimentConfig& cfg, int chain) {
  return cfg.seed + static_cast<std::uint64_t>(chain);
}

TunedState tune(const ExperimentConfig& cfg, std::vector<std::string>* warnings) {
  cfg.validate();
  const TargetDensity model = build_model(cfg.model);
  TuningOptions options;
  options.target_accept = cfg.target_accept;
  options.precondition = cfg.precondition;
  options.fixed_trajectory_length = cfg.trajectory_length;
  options.fixed_step_size = cfg.step_size;
  options.sequence = cfg.sequence;
  options.alba_rounds = cfg.alba_rounds;
  Rng rng(tuning_seed(cfg.seed));
  const TuningResult result = run_tuning(model, schedule_of(cfg), cfg.sampler, rng, options);

  TunedState tuned;
  tuned.step_size = result.config.step_size;
  tuned.trajectory_length = result.config.trajectory_length;
  tuned.l_partial = result.config.l_partial;
  tuned.scales = result.scales;
  tuned.position = result.state.z.x;
  tuned.tuning_gradient_calls = result.gradient_calls;
  tuned.tau_bar = result.tau_bar;
  if (warnings) {
    warnings->insert(warnings->end(), result.warnings.begin(), result.warnings.end());
  }
  return tuned;
}

RunSummary run_chains(const ExperimentConfig& cfg, const TunedState& tuned) {
  cfg.validate();
  RunSummary summary;
  summary.config = cfg;
  summary.tuned = tuned;

  const TargetDensity model = build_model(cfg.model);
  if (tuned.position.size() != model.dim() || tuned.scales.size() != model.dim()) {
    throw ConfigurationError("tuned state does not match the model dimension");
  }
  const TargetDensity target = precondition(model, tuned.scales);
  const GroundTruth truth = *model.ground_truth();
  const Reduction reduction = cfg.resolved_reduction();
  const std::uint64_t budget = schedule_of(cfg).sampling_budget();
  const auto grid = budget == 0 ? std::vector<std::uint64_t>{}
                                : geometric_grid(std::min(kGridStart, budget), budget,
                                                 cfg.grid_ratio);

  summary.chains.resize(cfg.chains);
  std::vector<std::exception_ptr> errors(cfg.chains);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cfg.chains; i = next++) {
      try {
        summary.chains[i] = run_one_chain(cfg, tuned, target, truth, grid, i);
      } catch (...) {
        errors[i] = std::current_exception();
        summary.chains[i].chain = i;
        summary.chains[i].seed = chain_seed(cfg, i);
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.chains);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<BiasCurve> curves;
  std::uint64_t proposals = 0, accepted = 0;
  for (const auto& c : summary.chains) {
    curves.push_back(c.curve(reduction));
    summary.recorded_gradient_calls += c.total_gradient_calls;
    proposals += c.stats.proposals;
    accepted += c.stats.accepted;
  }
  summary.counted_gradient_calls = target.gradient_calls();
  if (summary.counted_gradient_calls != summary.recorded_gradient_calls) {
    throw std::logic_error("gradient accounting mismatch");
  }
  summary.accept_rate = proposals == 0 ? 0.0 : static_cast<double>(accepted) / proposals;
  summary.median = median_curve(curves);
  summary.gradients_to_threshold = gradients_to_threshold(curves, cfg.threshold);

  if (cfg.histogram_bins > 0) {
    // KS assumes independent draws, so each chain is thinned to every
    // ceil(2 tau)-th sample before pooling.
    std::vector<double> pooled;
    for (const auto& c : summary.chains) {
      std::size_t stride = 1;
      if (c.first_coordinate.size() >= 100) {
        try {
          stride = static_cast<std::size_t>(std::ceil(2.0 * tau_int(c.first_coordinate)));
        } catch (const DegenerateSeriesError&) {
        }
      }
      for (std::size_t k = 0; k < c.first_coordinate.size(); k += stride) {
        pooled.push_back(c.first_coordinate[k]);
      }
    }
    if (!pooled.empty()) {
      summary.ks_statistic = ks_statistic_normal(pooled);
      summary.ks_pvalue = ks_pvalue(*summary.ks_statistic, pooled.size());
    }
  }
  return summary;
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  std::vector<std::string> warnings;
  const TunedState tuned = tune(cfg, &warnings);
  RunSummary summary;
  try {
    summary = run_chains(cfg, tuned);
  } catch (const std::exception& e) {
    // Keep the tuned state so the failed run can be inspected and replayed.
    warnings.push_back(std::string("sampling failed: ") + e.what());
    write_tuned(cfg, tuned, warnings);
    throw;
  }
  summary.warnings = std::move(warnings);
  write_outputs(summary, cfg.out_dir);
  return summary;
}

RunSummary replay_manifest(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.contains("config") || !j.contains("tuned")) {
    throw ConfigurationError("manifest needs 'config' and 'tuned' sections");
  }
  const ExperimentConfig cfg = config_from_json(j.at("config").dump());
  const TunedState tuned = tuned_from_json(j.at("tuned").dump());
  RunSummary summary = run_chains(cfg, tuned);
  if (j.contains("warnings")) summary.warnings = j.at("warnings").get<std::vector<std::string>>();
  return summary;
}

std::string summary_csv(const RunSummary& s) {
  std::ostringstream out;
  out << "model,sampler,chains,budget,tuning_gradient_calls,step_size,"
         "trajectory_length,reduction,threshold,gradients_to_threshold,"
         "final_median_b2,accept_rate\n";
  const auto& cfg = s.config;
  out << to_string(cfg.model.kind) << ',' << to_string(cfg.sampler) << ',' << cfg.chains
      << ',' << cfg.budget << ',' << s.tuned.tuning_gradient_calls << ','
      << fmt(s.tuned.step_size) << ',' << fmt(s.tuned.trajectory_length) << ','
      << to_string(s.median.reduction) << ',' << fmt(cfg.threshold) << ','
      << (s.gradients_to_threshold ? std::to_string(*s.gradients_to_threshold) : "NA") << ','
      << (s.median.values.empty() ? "NA" : fmt(s.median.values.back())) << ','
      << fmt(s.accept_rate) << '\n';
  return out.str();
}

std::string trace_csv(const RunSummary& s) {
  std::ostringstream out;
  out << "model,sampler,chain,gradient_calls,b2_max,b2_avg,accept_rate,divergences\n";
  const std::string model = to_string(s.config.model.kind);
  const std::string sampler = to_string(s.config.sampler);
  for (const auto& c : s.chains) {
    for (std::size_t k = 0; k < c.gradient_calls.size(); ++k) {
      out << model << ',' << sampler << ',' << c.chain << ',' << c.gradient_calls[k] << ','
          << fmt(c.b2_max[k]) << ',' << fmt(c.b2_avg[k]) << ',' << fmt(c.accept_rate[k])
          << ',' << c.divergences[k] << '\n';
    }
  }
  return out.str();
}

std::string histogram_csv(const RunSummary& s) {
  const int bins = s.config.histogram_bins;
  const double range = s.config.histogram_range;
  std::vector<std::uint64_t> counts(bins, 0);
  std::uint64_t total = 0;
  for (const auto& c : s.chains) {
    for (double x : c.first_coordinate) {
      ++total;
      if (x < -range || x >= range) continue;
      const int b = std::min(bins - 1, static_cast<int>((x + range) / (2.0 * range) * bins));
      ++counts[b];
    }
  }
  const double width = 2.0 * range / bins;
  std::ostringstream out;
  out << "bin_left,bin_right,count,density,normal_density\n";
  for (int b = 0; b < bins; ++b) {
    const double left = -range + b * width;
    const double mid = left + 0.5 * width;
    const double density = total == 0 ? 0.0 : counts[b] / (static_cast<double>(total) * width);
    out << fmt(left) << ',' << fmt(left + width) << ',' << counts[b] << ',' << fmt(density)
        << ',' << fmt(std::exp(-0.5 * mid * mid) / std::sqrt(2.0 * M_PI)) << '\n';
  }
  return out.str();
}

std::string manifest_json(const RunSummary& s) {
  json j;
  j["version"] = kVersion;
  j["config"] = json::parse(config_to_json(s.config));
  j["tuned"] = json::parse(tuned_to_json(s.tuned));
  j["chain_seeds"] = json::array();
  for (int i = 0; i < s.config.chains; ++i) j["chain_seeds"].push_back(chain_seed(s.config, i));
  j["warnings"] = s.warnings;
  j["gradients_to_threshold"] =
      s.gradients_to_threshold ? json(*s.gradients_to_threshold) : json(nullptr);
  j["gradient_accounting"] = {{"recorded", s.recorded_gradient_calls},
                              {"counted", s.counted_gradient_calls}};
  j["accept_rate"] = s.accept_rate;
  if (s.ks_statistic) {
    j["ks"] = {{"statistic", *s.ks_statistic}, {"pvalue", *s.ks_pvalue}};
  }
  return j.dump(2) + "\n";
}

void write_outputs(const RunSummary& s, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  write_file(root / "trace.csv", trace_csv(s));
  write_file(root / "summary.csv", summary_csv(s));
  write_file(root / "manifest.json", manifest_json(s));
  if (s.config.histogram_bins > 0) {
    const char* name = s.config.metropolis ? "histogram_adjusted.csv" : "histogram_unadjusted.csv";
    write_file(root / name, histogram_csv(s));
  }
}

void write_tuned(const ExperimentConfig& cfg, const TunedState& tuned,
                 const std::vector<std::string>& warnings) {
  std::filesystem::create_directories(cfg.out_dir);
  json j;
  j["version"] = kVersion;
  j["config"] = json::parse(config_to_json(cfg));
  j["tuned"] = json::parse(tuned_to_json(tuned));
  j["warnings"] = warnings;
  write_file(std::filesystem::path(cfg.out_dir) / "tuned.json", j.dump(2) + "\n");
}

std::vector<GridRow> grid_search_L(const ExperimentConfig& cfg,
                                   const std::vector<double>& grid, bool write) {
  if (grid.empty()) throw ConfigurationError("grid search needs a non-empty L grid");
  std::vector<GridRow> rows;
  for (double L : grid) {
    ExperimentConfig point = cfg;
    point.trajectory_length = L;
    const TunedState tuned = tune(point);
    const RunSummary summary = run_chains(point, tuned);
    rows.push_back({L, tuned.step_size, summary.accept_rate, summary.gradients_to_threshold});
  }
  if (write) {
    std::ostringstream out;
    out << "model,sampler,trajectory_length,step_size,accept_rate,gradients_to_threshold\n";
    for (const auto& r : rows) {
      out << to_string(cfg.model.kind) << ',' << to_string(cfg.sampler) << ','
          << fmt(r.trajectory_length) << ',' << fmt(r.step_size) << ',' << fmt(r.accept_rate)
          << ','
          << (r.gradients_to_threshold ? std::to_string(*r.gradients_to_threshold) : "NA")
          << '\n';
    }
    std::filesystem::create_directories(cfg.out_dir);
    write_file(std::filesystem::path(cfg.out_dir) / "grid_l.csv", out.str());
  }
  return rows;
}

namespace {

// Distinguishes sweep entries that share a model name.
std::string run_label(const ModelSpec& model, SamplerKind sampler) {
  std::string label = to_string(model.kind) + "_d" + std::to_string(model.dim);
  if (model.kind == ModelKind::IllConditionedGaussian ||
      model.kind == ModelKind::OutlierGaussian) {
    label += "_k" + fmt(model.kappa);
  }
  return label + "_" + to_string(sampler);
}

}  // namespace

std::vector<RunSummary> run_benchmark(const ExperimentConfig& cfg) {
  if (cfg.benchmark_models.empty() || cfg.benchmark_samplers.empty()) {
    throw ConfigurationError("benchmark needs benchmark_models and benchmark_samplers");
  }
  std::vector<RunSummary> results;
  std::ostringstream table;
  bool header = true;
  for (const auto& model : cfg.benchmark_models) {
    for (SamplerKind sampler : cfg.benchmark_samplers) {
      ExperimentConfig run = cfg;
      run.model = model;
      run.sampler = sampler;
      run.benchmark_models.clear();
      run.benchmark_samplers.clear();
      const std::string label = run_label(model, sampler);
      run.out_dir = (std::filesystem::path(cfg.out_dir) / label).string();
      results.push_back(run_experiment(run));
      const std::string csv = summary_csv(results.back());
      const auto split = csv.find('\n');
      if (header) table << "run," << csv.substr(0, split + 1);
      header = false;
      table << label << ',' << csv.substr(split + 1);
    }
  }
  write_file(std::filesystem::path(cfg.out_dir) / "benchmark.csv", table.str());
  return results;
}

}  // namespace mams
