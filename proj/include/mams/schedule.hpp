#ifndef MAMS_SCHEDULE_HPP
#define MAMS_SCHEDULE_HPP

#include <cstdint>
#include <string>

#include "mams/rng.hpp"

namespace mams {

enum class StepSequence { Halton, Uniform, Fixed };

std::string to_string(StepSequence kind);
StepSequence parse_step_sequence(const std::string& name);

/// Van der Corput radical inverse of `index` in `base`; index 0 maps to 0.
double halton(std::uint64_t index, unsigned base = 2);

/**
 * Scale y such that n = ceil(y h), h ~ U(0, 1), has mean `avg_steps`:
 *   avg_steps = (floor(y) + 1)(y - floor(y)/2) / y.
 * Throws ConfigurationError for avg_steps < 1.
 */
double ceiling_corrected_scale(double avg_steps);

/**
 * Randomized number of leapfrog steps per proposal, n_k = ceil(y h_k) with
 * h_k from a base-2 Halton sequence or uniform draws. The Fixed kind always
 * emits round(avg_steps).
 */
class TrajectorySchedule {
 public:
  TrajectorySchedule(double avg_steps, StepSequence kind,
                     std::uint64_t halton_start = 1);

  int draw_steps(Rng& rng);

  double avg_steps() const { return avg_steps_; }
  double scale() const { return scale_; }
  StepSequence kind() const { return kind_; }
  std::uint64_t halton_index() const { return halton_index_; }

 private:
  double avg_steps_;
  StepSequence kind_;
  std::uint64_t halton_index_;
  double scale_;
};

}  // namespace mams

#endif  // MAMS_SCHEDULE_HPP
