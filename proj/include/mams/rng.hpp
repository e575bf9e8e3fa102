#ifndef MAMS_RNG_HPP
#define MAMS_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace mams {

/**
 * Per-chain random stream. Wraps a 64-bit Mersenne twister together with
 * the distributions the samplers draw from, so that a chain's entire draw
 * sequence is a function of its seed only.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    double u = 0.0;
    while (u == 0.0) u = uniform_(engine_);
    return u;
  }

  Eigen::VectorXd normal_vector(Eigen::Index dim) {
    Eigen::VectorXd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = normal();
    return z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace mams

#endif  // MAMS_RNG_HPP
