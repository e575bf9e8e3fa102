#include <algorithm>
#include <cmath>

#include "mams/adaptation.hpp"
#include "mams/errors.hpp"

namespace mams {

double continuous_malt_ess(double beta, double T, double sigma) {
  if (!(sigma > 0.0) || !(T > 0.0) || !(beta >= 0.0)) {
    throw DomainError("continuous MALT ESS needs sigma > 0, T > 0, beta >= 0");
  }
  const double w2 = 1.0 / (sigma * sigma) - beta * beta;
  if (!(w2 > 0.0)) {
    throw DomainError("overdamped regime beta >= 1/sigma is out of range");
  }
  const double w = std::sqrt(w2);
  const double rho =
      std::exp(-beta * T) * (std::cos(w * T) + beta / w * std::sin(w * T));
  const double r2 = rho * rho;
  return (1.0 - r2) / (1.0 + r2);
}

double worst_direction_malt_ess(double beta, double T, double sigma_max,
                                int grid_points) {
  if (!(beta * sigma_max < 1.0)) {
    throw DomainError("beta must be below 1/sigma_max");
  }
  // As sigma -> 0 the oscillation envelope is exp(-beta T).
  double worst = std::tanh(beta * T);
  for (int k = 1; k <= grid_points; ++k) {
    const double sigma = sigma_max * k / grid_points;
    worst = std::min(worst, continuous_malt_ess(beta, T, sigma));
  }
  return worst;
}

MaltOptimum optimize_malt_settings(int sigma_grid_points) {
  auto objective = [&](double beta, double T) {
    return worst_direction_malt_ess(beta, T, 1.0, sigma_grid_points) / T;
  };
  double beta_lo = 0.0, beta_hi = 0.99;
  double t_lo = 0.1, t_hi = 5.0;
  MaltOptimum best{0.0, 0.0, -1.0};
  int points = 41;
  for (int level = 0; level < 10; ++level) {
    for (int i = 0; i < points; ++i) {
      const double beta = beta_lo + (beta_hi - beta_lo) * i / (points - 1);
      for (int j = 0; j < points; ++j) {
        const double T = t_lo + (t_hi - t_lo) * j / (points - 1);
        const double value = objective(beta, T);
        if (value > best.ess_per_time) best = {beta, T, value};
      }
    }
    const double db = (beta_hi - beta_lo) / (points - 1) * 2.0;
    const double dt = (t_hi - t_lo) / (points - 1) * 2.0;
    beta_lo = std::max(0.0, best.beta_sigma - db);
    beta_hi = std::min(0.999, best.beta_sigma + db);
    t_lo = std::max(1e-3, best.time_sigma - dt);
    t_hi = best.time_sigma + dt;
    points = 21;
  }
  return best;
}

}  // namespace mams
