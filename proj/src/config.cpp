#include "mams/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mams/adaptation.hpp"
#include "mams/errors.hpp"

namespace mams {

using nlohmann::json;

namespace {

// JSON has no inf/NaN; they are written as null.
json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

json vector_to_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json model_to_json(const ModelSpec& m) {
  return {{"name", to_string(m.kind)},
          {"dim", m.dim},
          {"kappa", m.kappa},
          {"mixture_weight", m.mixture_weight},
          {"mode_offset", m.mode_offset},
          {"mode_scale", m.mode_scale},
          {"rosenbrock_q", m.rosenbrock_q},
          {"funnel_scale", m.funnel_scale}};
}

ModelSpec model_from_json(const json& j) {
  if (j.is_string()) return default_spec(parse_model_kind(j.get<std::string>()));
  ModelSpec m = default_spec(parse_model_kind(j.at("name").get<std::string>()));
  m.dim = j.value("dim", m.dim);
  m.kappa = j.value("kappa", m.kappa);
  m.mixture_weight = j.value("mixture_weight", m.mixture_weight);
  m.mode_offset = j.value("mode_offset", m.mode_offset);
  m.mode_scale = j.value("mode_scale", m.mode_scale);
  m.rosenbrock_q = j.value("rosenbrock_q", m.rosenbrock_q);
  m.funnel_scale = j.value("funnel_scale", m.funnel_scale);
  return m;
}

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string to_string(Reduction reduction) {
  return reduction == Reduction::Max ? "max" : "avg";
}

Reduction parse_reduction(const std::string& name) {
  if (name == "max") return Reduction::Max;
  if (name == "avg") return Reduction::Avg;
  throw ConfigurationError("unknown reduction '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (chains < 1) throw ConfigurationError("chains must be >= 1");
  if (threads < 0) throw ConfigurationError("threads must be >= 0");
  if (!(threshold > 0.0)) throw ConfigurationError("threshold must be positive");
  if (!(grid_ratio > 1.0)) throw ConfigurationError("grid_ratio must exceed 1");
  if (histogram_bins < 0) throw ConfigurationError("histogram_bins must be >= 0");
  if (!(histogram_range > 0.0)) throw ConfigurationError("histogram_range must be positive");
  if (alba_rounds < 0) throw ConfigurationError("alba_rounds must be >= 0");
  if (trajectory_length && !(*trajectory_length > 0.0)) {
    throw ConfigurationError("trajectory_length must be positive");
  }
  if (step_size && !(*step_size > 0.0)) {
    throw ConfigurationError("step_size must be positive");
  }
  if (!std::isnan(target_accept) && !(target_accept > 0.0 && target_accept < 1.0)) {
    throw ConfigurationError("target_accept must lie in (0, 1)");
  }
  TuningSchedule{budget, stage_fractions}.validate();
  for (double l : l_grid) {
    if (!(l > 0.0)) throw ConfigurationError("l_grid entries must be positive");
  }
}

Reduction ExperimentConfig::resolved_reduction() const {
  if (reduction) return *reduction;
  return build_model(model).default_reduction();
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = model_to_json(cfg.model);
  j["sampler"] = to_string(cfg.sampler);
  j["chains"] = cfg.chains;
  j["budget"] = cfg.budget;
  j["stage_fractions"] = cfg.stage_fractions;
  j["target_accept"] = number_or_null(cfg.target_accept);
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["reduction"] = cfg.reduction ? json(to_string(*cfg.reduction)) : json(nullptr);
  j["precondition"] = cfg.precondition;
  j["trajectory_length"] = optional_to_json(cfg.trajectory_length);
  j["step_size"] = optional_to_json(cfg.step_size);
  j["sequence"] = to_string(cfg.sequence);
  j["alba_rounds"] = cfg.alba_rounds;
  j["metropolis"] = cfg.metropolis;
  j["threshold"] = cfg.threshold;
  j["grid_ratio"] = cfg.grid_ratio;
  j["threads"] = cfg.threads;
  j["histogram_bins"] = cfg.histogram_bins;
  j["histogram_range"] = cfg.histogram_range;
  j["l_grid"] = cfg.l_grid;
  j["benchmark_models"] = json::array();
  for (const auto& m : cfg.benchmark_models) j["benchmark_models"].push_back(model_to_json(m));
  j["benchmark_samplers"] = json::array();
  for (auto s : cfg.benchmark_samplers) j["benchmark_samplers"].push_back(to_string(s));
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigurationError("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (j.contains("model")) cfg.model = model_from_json(j.at("model"));
    if (j.contains("sampler")) cfg.sampler = parse_sampler_kind(j.at("sampler").get<std::string>());
    cfg.chains = j.value("chains", cfg.chains);
    cfg.budget = j.value("budget", cfg.budget);
    if (j.contains("stage_fractions")) {
      cfg.stage_fractions = j.at("stage_fractions").get<std::array<double, 3>>();
    }
    cfg.target_accept = number_or(j, "target_accept", cfg.target_accept);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("reduction") && !j.at("reduction").is_null()) {
      cfg.reduction = parse_reduction(j.at("reduction").get<std::string>());
    }
    cfg.precondition = j.value("precondition", cfg.precondition);
    cfg.trajectory_length = optional_double(j, "trajectory_length");
    cfg.step_size = optional_double(j, "step_size");
    if (j.contains("sequence")) cfg.sequence = parse_step_sequence(j.at("sequence").get<std::string>());
    cfg.alba_rounds = j.value("alba_rounds", cfg.alba_rounds);
    cfg.metropolis = j.value("metropolis", cfg.metropolis);
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.grid_ratio = j.value("grid_ratio", cfg.grid_ratio);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.histogram_bins = j.value("histogram_bins", cfg.histogram_bins);
    cfg.histogram_range = j.value("histogram_range", cfg.histogram_range);
    if (j.contains("l_grid")) cfg.l_grid = j.at("l_grid").get<std::vector<double>>();
    if (j.contains("benchmark_models")) {
      for (const auto& m : j.at("benchmark_models")) cfg.benchmark_models.push_back(model_from_json(m));
    }
    if (j.contains("benchmark_samplers")) {
      for (const auto& s : j.at("benchmark_samplers")) {
        cfg.benchmark_samplers.push_back(parse_sampler_kind(s.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("bad config field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string tuned_to_json(const TunedState& t) {
  json j;
  j["step_size"] = t.step_size;
  j["trajectory_length"] = t.trajectory_length;
  j["l_partial"] = number_or_null(t.l_partial);
  j["scales"] = vector_to_json(t.scales);
  j["position"] = vector_to_json(t.position);
  j["tuning_gradient_calls"] = t.tuning_gradient_calls;
  j["tau_bar"] = number_or_null(t.tau_bar);
  return j.dump(2);
}

TunedState tuned_from_json(const std::string& text) {
  TunedState t;
  try {
    const json j = json::parse(text);
    t.step_size = j.at("step_size").get<double>();
    t.trajectory_length = j.at("trajectory_length").get<double>();
    t.l_partial = number_or(j, "l_partial", std::numeric_limits<double>::infinity());
    t.scales = vector_from_json(j.at("scales"));
    t.position = vector_from_json(j.at("position"));
    t.tuning_gradient_calls = j.value("tuning_gradient_calls", std::uint64_t{0});
    t.tau_bar = number_or(j, "tau_bar", std::numeric_limits<double>::quiet_NaN());
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("bad tuned state: ") + e.what());
  }
  return t;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << config_to_json(cfg) << '\n';
}

}  // namespace mams
