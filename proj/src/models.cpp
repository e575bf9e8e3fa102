#include "mams/models.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <utility>

#include "mams/errors.hpp"

namespace mams {
namespace {

constexpr std::array<std::pair<ModelKind, const char*>, 8> kModelNames{{
    {ModelKind::IllConditionedGaussian, "IllConditionedGaussian"},
    {ModelKind::OutlierGaussian, "OutlierGaussian"},
    {ModelKind::StandardGaussian, "StandardGaussian"},
    {ModelKind::Banana, "Banana"},
    {ModelKind::Bimodal, "Bimodal"},
    {ModelKind::Rosenbrock, "Rosenbrock"},
    {ModelKind::Cauchy, "Cauchy"},
    {ModelKind::Funnel, "Funnel"},
}};

// Raw moments E[x^2], E[x^4] of N(m, s^2).
double normal_second(double m, double s) { return m * m + s * s; }
double normal_fourth(double m, double s) {
  const double m2 = m * m;
  const double s2 = s * s;
  return m2 * m2 + 6.0 * m2 * s2 + 3.0 * s2 * s2;
}

}  // namespace

std::string to_string(ModelKind kind) {
  for (const auto& [k, name] : kModelNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  for (const auto& [k, n] : kModelNames) {
    if (name == n) return k;
  }
  throw ConfigurationError("unknown model '" + name + "'");
}

ModelSpec default_spec(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  switch (kind) {
    case ModelKind::IllConditionedGaussian:
      spec.dim = 100;
      spec.kappa = 100.0;
      break;
    case ModelKind::OutlierGaussian:
      spec.dim = 100;
      spec.kappa = 100.0;
      break;
    case ModelKind::StandardGaussian:
      spec.dim = 100;
      spec.kappa = 1.0;
      break;
    case ModelKind::Banana:
      spec.dim = 2;
      break;
    case ModelKind::Bimodal:
      spec.dim = 50;
      break;
    case ModelKind::Rosenbrock:
      spec.dim = 36;
      break;
    case ModelKind::Cauchy:
      spec.dim = 100;
      break;
    case ModelKind::Funnel:
      spec.dim = 20;
      break;
  }
  return spec;
}

TargetDensity build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::IllConditionedGaussian:
      return build_gaussian(spec.dim, spec.kappa, EigenLayout::LogUniform);
    case ModelKind::OutlierGaussian:
      return build_gaussian(spec.dim, spec.kappa, EigenLayout::Outlier);
    case ModelKind::StandardGaussian:
      return build_gaussian(spec.dim, 1.0, EigenLayout::LogUniform)
          .with_reduction(Reduction::Avg);
    case ModelKind::Banana:
      return build_banana(spec.rosenbrock_q);
    case ModelKind::Bimodal:
      return build_bimodal(spec.dim, spec.mixture_weight, spec.mode_offset,
                           spec.mode_scale);
    case ModelKind::Rosenbrock:
      if (spec.dim % 2 != 0) {
        throw ConfigurationError("Rosenbrock dimension must be even");
      }
      return build_rosenbrock(spec.dim / 2, spec.rosenbrock_q);
    case ModelKind::Cauchy:
      return build_cauchy(spec.dim);
    case ModelKind::Funnel:
      return build_funnel(spec.dim, spec.funnel_scale);
  }
  throw ConfigurationError("unhandled model kind");
}

Vector gaussian_eigenvalues(int dim, double kappa, EigenLayout layout) {
  if (dim < 2) throw ConfigurationError("Gaussian dimension must be >= 2");
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw ConfigurationError("condition number must be >= 1");
  }
  Vector eig(dim);
  if (layout == EigenLayout::LogUniform) {
    for (int i = 0; i < dim; ++i) {
      eig[i] = std::pow(kappa, static_cast<double>(i) / (dim - 1));
    }
  } else {
    eig.setOnes();
    eig[0] = kappa;
    eig[1] = kappa;
  }
  return eig;
}

TargetDensity build_gaussian(int dim, double kappa, EigenLayout layout) {
  const Vector eig = gaussian_eigenvalues(dim, kappa, layout);
  const Vector precision = eig.cwiseInverse();
  TargetDensity::Evaluator eval = [precision](const Vector& x, Vector* grad) {
    if (grad) *grad = precision.cwiseProduct(x);
    return 0.5 * x.dot(precision.cwiseProduct(x));
  };
  const Vector sd = eig.cwiseSqrt();
  const char* name = kappa == 1.0 ? "StandardGaussian"
                     : layout == EigenLayout::LogUniform
                         ? "IllConditionedGaussian"
                         : "OutlierGaussian";
  TargetDensity target(name, dim, std::move(eval));
  target.with_ground_truth({Observable::SecondMoment, eig,
                            2.0 * eig.array().square().matrix()})
      .with_exact_sampler([sd](Rng& rng) {
        return Vector(sd.cwiseProduct(rng.normal_vector(sd.size())));
      });
  return target;
}

TargetDensity build_bimodal(int dim, double a, double offset, double sigma) {
  if (dim < 2) throw ConfigurationError("Bimodal dimension must be >= 2");
  if (!(a >= 0.0 && a < 1.0)) {
    throw ConfigurationError("mixture weight must lie in [0, 1)");
  }
  if (!(sigma > 0.0)) throw ConfigurationError("mode scale must be positive");

  Vector mu = Vector::Zero(dim);
  mu[0] = offset;
  const double log_w0 = std::log1p(-a);
  const double log_w1 = a > 0.0 ? std::log(a) - dim * std::log(sigma)
                                : -std::numeric_limits<double>::infinity();
  const double inv_var = 1.0 / (sigma * sigma);

  TargetDensity::Evaluator eval = [=](const Vector& x, Vector* grad) {
    const double l0 = log_w0 - 0.5 * x.squaredNorm();
    const double l1 = log_w1 - 0.5 * inv_var * (x - mu).squaredNorm();
    const double top = std::max(l0, l1);
    const double lse =
        top + std::log(std::exp(l0 - top) + std::exp(l1 - top));
    if (grad) {
      const double r0 = std::exp(l0 - lse);
      const double r1 = std::exp(l1 - lse);
      *grad = r0 * x + (r1 * inv_var) * (x - mu);
    }
    return -lse;
  };

  Vector mean(dim), var(dim);
  for (int i = 0; i < dim; ++i) {
    const double m = mu[i];
    const double second = (1 - a) * normal_second(0, 1) + a * normal_second(m, sigma);
    const double fourth = (1 - a) * normal_fourth(0, 1) + a * normal_fourth(m, sigma);
    mean[i] = second;
    var[i] = fourth - second * second;
  }

  TargetDensity target("Bimodal", dim, std::move(eval));
  target.with_ground_truth({Observable::SecondMoment, mean, var})
      .with_exact_sampler([=](Rng& rng) {
        Vector z = rng.normal_vector(dim);
        if (rng.uniform() < a) return Vector(mu + sigma * z);
        return z;
      });
  return target;
}

namespace {

TargetDensity make_rosenbrock(const char* name, int pairs, double q,
                              Reduction reduction) {
  if (pairs < 1) throw ConfigurationError("Rosenbrock needs at least one pair");
  if (!(q > 0.0)) throw ConfigurationError("Rosenbrock Q must be positive");
  const int dim = 2 * pairs;
  const double inv_q = 1.0 / q;

  TargetDensity::Evaluator eval = [=](const Vector& v, Vector* grad) {
    double value = 0.0;
    for (int k = 0; k < pairs; ++k) {
      const double x = v[2 * k];
      const double y = v[2 * k + 1];
      const double r = y - x * x;
      value += 0.5 * (x - 1.0) * (x - 1.0) + 0.5 * inv_q * r * r;
      if (grad) {
        (*grad)[2 * k] = (x - 1.0) - 2.0 * inv_q * x * r;
        (*grad)[2 * k + 1] = inv_q * r;
      }
    }
    return value;
  };

  // x = 1 + z: E[x^2] = 2, E[x^4] = 10, E[x^8] = 764.
  const double x2 = 2.0, x4 = 10.0, x8 = 764.0;
  const double y2 = x4 + q;
  const double y4 = x8 + 6.0 * q * x4 + 3.0 * q * q;
  Vector mean(dim), var(dim);
  for (int k = 0; k < pairs; ++k) {
    mean[2 * k] = x2;
    var[2 * k] = x4 - x2 * x2;
    mean[2 * k + 1] = y2;
    var[2 * k + 1] = y4 - y2 * y2;
  }

  const double sq = std::sqrt(q);
  TargetDensity target(name, dim, std::move(eval));
  target.with_ground_truth({Observable::SecondMoment, mean, var})
      .with_exact_sampler([=](Rng& rng) {
        Vector v(dim);
        for (int k = 0; k < pairs; ++k) {
          const double x = 1.0 + rng.normal();
          v[2 * k] = x;
          v[2 * k + 1] = x * x + sq * rng.normal();
        }
        return v;
      })
      .with_reduction(reduction);
  return target;
}

}  // namespace

TargetDensity build_rosenbrock(int pairs, double q) {
  return make_rosenbrock("Rosenbrock", pairs, q, Reduction::Avg);
}

TargetDensity build_banana(double q) {
  return make_rosenbrock("Banana", 1, q, Reduction::Max);
}

TargetDensity build_cauchy(int dim) {
  if (dim < 2) throw ConfigurationError("Cauchy dimension must be >= 2");
  TargetDensity::Evaluator eval = [](const Vector& x, Vector* grad) {
    double value = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double s = x[i] * x[i];
      value += std::log1p(s);
      if (grad) (*grad)[i] = 2.0 * x[i] / (1.0 + s);
    }
    return value;
  };
  const double log_pi = std::log(std::numbers::pi);
  const Vector mean = Vector::Constant(dim, std::log(4.0 * std::numbers::pi));
  const Vector var = Vector::Constant(dim, std::numbers::pi * std::numbers::pi / 3.0);

  TargetDensity target("Cauchy", dim, std::move(eval));
  target.with_ground_truth({Observable::NegLogDensity, mean, var})
      .with_observable(Observable::NegLogDensity,
                       [log_pi](const Vector& x, Vector& out) {
                         out = (x.array().square().log1p() + log_pi).matrix();
                       })
      .with_exact_sampler([dim](Rng& rng) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) {
          v[i] = std::tan(std::numbers::pi * (rng.uniform() - 0.5));
        }
        return v;
      })
      .with_reduction(Reduction::Avg);
  return target;
}

TargetDensity build_funnel(int dim, double scale) {
  if (dim < 2) throw ConfigurationError("Funnel dimension must be >= 2");
  if (!(scale > 0.0)) throw ConfigurationError("Funnel scale must be positive");
  const double inv_s2 = 1.0 / (scale * scale);
  const int rest = dim - 1;

  TargetDensity::Evaluator eval = [=](const Vector& v, Vector* grad) {
    const double z1 = v[0];
    const double w = std::exp(-z1);
    const double tail = v.tail(rest).squaredNorm();
    if (grad) {
      (*grad)[0] = z1 * inv_s2 - 0.5 * w * tail + 0.5 * rest;
      grad->tail(rest) = w * v.tail(rest);
    }
    return 0.5 * z1 * z1 * inv_s2 + 0.5 * w * tail + 0.5 * rest * z1;
  };

  const double s2 = scale * scale;
  Vector mean(dim), var(dim);
  mean[0] = s2;
  var[0] = 2.0 * s2 * s2;
  // E[exp(z1)] = exp(s^2/2), E[exp(2 z1)] = exp(2 s^2).
  const double m2 = std::exp(0.5 * s2);
  const double m4 = 3.0 * std::exp(2.0 * s2);
  mean.tail(rest).setConstant(m2);
  var.tail(rest).setConstant(m4 - m2 * m2);

  TargetDensity target("Funnel", dim, std::move(eval));
  target.with_ground_truth({Observable::SecondMoment, mean, var})
      .with_exact_sampler([=](Rng& rng) {
        Vector v(dim);
        v[0] = scale * rng.normal();
        const double sd = std::exp(0.5 * v[0]);
        for (int i = 1; i < dim; ++i) v[i] = sd * rng.normal();
        return v;
      });
  return target;
}

}  // namespace mams
