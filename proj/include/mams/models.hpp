#ifndef MAMS_MODELS_HPP
#define MAMS_MODELS_HPP

#include <string>

#include "mams/target.hpp"

namespace mams {

enum class EigenLayout { LogUniform, Outlier };

enum class ModelKind {
  IllConditionedGaussian,
  OutlierGaussian,
  StandardGaussian,
  Banana,
  Bimodal,
  Rosenbrock,
  Cauchy,
  Funnel,
};

/// Name + parameters of a benchmark target. Unused fields are ignored.
struct ModelSpec {
  ModelKind kind = ModelKind::StandardGaussian;
  int dim = 100;
  double kappa = 1.0;
  double mixture_weight = 0.25;  // Bimodal a
  double mode_offset = 4.0;      // Bimodal mu_1
  double mode_scale = 0.6;       // Bimodal sigma
  double rosenbrock_q = 0.1;
  double funnel_scale = 3.0;     // standard deviation of the neck coordinate
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Default spec for a model as used in the benchmark table.
ModelSpec default_spec(ModelKind kind);

TargetDensity build_model(const ModelSpec& spec);

/// Diagonal Gaussian with eigenvalues in [1, kappa]; eigenvalue i is the
/// variance of coordinate i.
TargetDensity build_gaussian(int dim, double kappa, EigenLayout layout);
Vector gaussian_eigenvalues(int dim, double kappa, EigenLayout layout);

/// (1-a) N(0, I) + a N(mu, sigma^2 I), mu = (offset, 0, ..., 0).
TargetDensity build_bimodal(int dim = 50, double a = 0.25, double offset = 4.0,
                            double sigma = 0.6);

/// `pairs` independent copies of x ~ N(1, 1), y | x ~ N(x^2, Q).
TargetDensity build_rosenbrock(int pairs = 18, double q = 0.1);

/// Single Rosenbrock pair.
TargetDensity build_banana(double q = 0.1);

/// Product of standard Cauchy factors; observable is -log p per coordinate.
TargetDensity build_cauchy(int dim = 100);

/// z_1 ~ N(0, scale^2), z_i | z_1 ~ N(0, exp(z_1)) for i >= 2.
TargetDensity build_funnel(int dim = 20, double scale = 3.0);

}  // namespace mams

#endif  // MAMS_MODELS_HPP
