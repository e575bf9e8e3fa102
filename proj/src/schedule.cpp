#include "mams/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "mams/errors.hpp"

namespace mams {

std::string to_string(StepSequence kind) {
  switch (kind) {
    case StepSequence::Halton: return "Halton";
    case StepSequence::Uniform: return "Uniform";
    case StepSequence::Fixed: return "Fixed";
  }
  return "Unknown";
}

StepSequence parse_step_sequence(const std::string& name) {
  if (name == "Halton") return StepSequence::Halton;
  if (name == "Uniform") return StepSequence::Uniform;
  if (name == "Fixed") return StepSequence::Fixed;
  throw ConfigurationError("unknown step sequence '" + name + "'");
}

double halton(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0;
  while (index > 0) {
    f /= base;
    result += f * static_cast<double>(index % base);
    index /= base;
  }
  return result;
}

namespace {

double expected_steps(double y) {
  const double whole = std::floor(y);
  return (whole + 1.0) * (y - 0.5 * whole) / y;
}

}  // namespace

double ceiling_corrected_scale(double avg_steps) {
  if (!(avg_steps >= 1.0) || !std::isfinite(avg_steps)) {
    throw ConfigurationError("average number of steps must be >= 1");
  }
  const double whole = std::floor(2.0 * avg_steps - 1.0);
  const double y = whole * (whole + 1.0) / (2.0 * (whole + 1.0 - avg_steps));
  if (std::isfinite(y) && std::floor(y) == whole &&
      std::abs(expected_steps(y) - avg_steps) <= 1e-12 * avg_steps) {
    return y;
  }
  // expected_steps is continuous and increasing in y >= 1.
  double lo = 1.0;
  double hi = 2.0 * avg_steps + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (expected_steps(mid) < avg_steps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TrajectorySchedule::TrajectorySchedule(double avg_steps, StepSequence kind,
                                       std::uint64_t halton_start)
    : avg_steps_(avg_steps),
      kind_(kind),
      halton_index_(std::max<std::uint64_t>(halton_start, 1)),
      scale_(ceiling_corrected_scale(avg_steps)) {}

int TrajectorySchedule::draw_steps(Rng& rng) {
  double h = 0.0;
  switch (kind_) {
    case StepSequence::Fixed:
      return std::max(1, static_cast<int>(std::lround(avg_steps_)));
    case StepSequence::Uniform:
      h = rng.uniform();
      break;
    case StepSequence::Halton:
      h = halton(halton_index_++);
      break;
  }
  return std::max(1, static_cast<int>(std::ceil(scale_ * h)));
}

}  // namespace mams
