#include <cmath>

#include <gtest/gtest.h>

#include "mams/diagnostics.hpp"
#include "mams/errors.hpp"
#include "mams/hmc.hpp"
#include "mams/kernel.hpp"
#include "mams/models.hpp"
#include "mams/proposal.hpp"
#include "mams/schedule.hpp"

using namespace mams;

namespace {

// Expected steps of ceil(y h), h ~ U(0, 1), summed bin by bin.
double oracle_mean_steps(double y) {
  double mean = 0.0;
  for (int n = 1; n <= static_cast<int>(std::ceil(y)); ++n) {
    const double lo = (n - 1) / y;
    const double hi = std::min(1.0, n / y);
    mean += n * (hi - lo);
  }
  return mean;
}

struct MeanSe {
  double mean;
  double se;
};

// Mean and batch-means standard error of a correlated series.
MeanSe batch_mean(const std::vector<double>& v, int batches = 100) {
  const std::size_t size = v.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < size; ++i) means[b] += v[b * size + i];
    means[b] /= size;
  }
  double m = 0.0;
  for (double x : means) m += x;
  m /= batches;
  double var = 0.0;
  for (double x : means) var += (x - m) * (x - m);
  var /= batches - 1;
  return {m, std::sqrt(var / batches)};
}

TargetDensity flat_target(int d) {
  return TargetDensity("Flat", d, [d](const Vector&, Vector* grad) {
    if (grad) grad->setZero(d);
    return 0.0;
  });
}

}  // namespace

TEST(Schedule, HaltonValues) {
  EXPECT_DOUBLE_EQ(halton(1), 0.5);
  EXPECT_DOUBLE_EQ(halton(2), 0.25);
  EXPECT_DOUBLE_EQ(halton(3), 0.75);
  EXPECT_DOUBLE_EQ(halton(4), 0.125);
  EXPECT_DOUBLE_EQ(halton(5, 3), 7.0 / 9.0);
}

TEST(Schedule, CorrectedScaleExamples) {
  EXPECT_NEAR(ceiling_corrected_scale(2.0), 3.0, 1e-12);
  EXPECT_NEAR(ceiling_corrected_scale(1.0), 1.0, 1e-12);
  EXPECT_NEAR(ceiling_corrected_scale(1.5), 2.0, 1e-12);
  EXPECT_THROW(ceiling_corrected_scale(0.9), ConfigurationError);
  EXPECT_THROW(TrajectorySchedule(0.5, StepSequence::Halton), ConfigurationError);
}

TEST(Schedule, CorrectedScaleSatisfiesExpectationIdentity) {
  for (double m = 1.0; m < 40.0; m += 0.37) {
    const double y = ceiling_corrected_scale(m);
    EXPECT_NEAR(oracle_mean_steps(y), m, 1e-9 * m) << "avg " << m;
  }
}

TEST(Schedule, UniformDrawMeanForAverageTwo) {
  TrajectorySchedule sched(2.0, StepSequence::Uniform);
  Rng rng(1);
  const int n = 1000000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += sched.draw_steps(rng);
  EXPECT_NEAR(sum / n, 2.0, 0.003);
}

TEST(Schedule, HaltonDrawMeans) {
  for (double m : {1.5, 2.0, 5.5}) {
    TrajectorySchedule sched(m, StepSequence::Halton);
    Rng rng(2);
    const int n = 1000000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += sched.draw_steps(rng);
    EXPECT_NEAR(sum / n, m, 0.01 * m);
  }
}

TEST(Schedule, DrawsAreBounded) {
  TrajectorySchedule sched(3.3, StepSequence::Uniform);
  Rng rng(3);
  const int top = static_cast<int>(std::ceil(sched.scale()));
  for (int k = 0; k < 10000; ++k) {
    const int n = sched.draw_steps(rng);
    EXPECT_GE(n, 1);
    EXPECT_LE(n, top);
  }
  TrajectorySchedule one(1.0, StepSequence::Halton);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(one.draw_steps(rng), 1);
}

TEST(Schedule, FixedRounds) {
  TrajectorySchedule sched(4.6, StepSequence::Fixed);
  Rng rng(4);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(sched.draw_steps(rng), 5);
}

TEST(Refresh, SphereMoments) {
  const int d = 5;
  const int n = 100000;
  Rng rng(5);
  Vector sum = Vector::Zero(d), sum2 = Vector::Zero(d);
  for (int k = 0; k < n; ++k) {
    const Vector u = refresh_velocity(d, rng);
    ASSERT_NEAR(u.norm(), 1.0, 1e-12);
    sum += u;
    sum2 += u.cwiseAbs2();
  }
  const double se_mean = std::sqrt(1.0 / d / n);
  const double var_u2 = 3.0 / (d * (d + 2.0)) - 1.0 / (d * d);
  const double se_u2 = std::sqrt(var_u2 / n);
  for (int i = 0; i < d; ++i) {
    EXPECT_LT(std::abs(sum[i] / n), 4 * se_mean);
    EXPECT_LT(std::abs(sum2[i] / n - 1.0 / d), 4 * se_u2);
  }
}

TEST(MhStep, ZeroWorkAlwaysAccepts) {
  const TargetDensity t = flat_target(3);
  KernelConfig cfg;
  cfg.step_size = 0.5;
  cfg.trajectory_length = 2.0;
  TrajectorySchedule sched(cfg.avg_steps(), cfg.sequence);
  Rng rng(6);
  ChainState s = make_state(Vector::Zero(3), refresh_velocity(3, rng), t);
  for (int k = 0; k < 200; ++k) {
    const ProposalOutcome out = mh_step(s, cfg, sched, t, rng);
    EXPECT_EQ(out.work, 0.0);
    EXPECT_TRUE(out.accepted);
  }
}

TEST(MhStep, DivergenceAlwaysRejects) {
  const TargetDensity t("Wall", 3, [](const Vector& x, Vector* g) {
    if (x.norm() > 0.5) {
      if (g) g->setConstant(std::numeric_limits<double>::infinity());
      return std::numeric_limits<double>::infinity();
    }
    if (g) g->setZero(3);
    return 0.0;
  });
  KernelConfig cfg;
  cfg.step_size = 1.0;
  cfg.trajectory_length = 3.0;
  cfg.sequence = StepSequence::Fixed;
  TrajectorySchedule sched(cfg.avg_steps(), cfg.sequence);
  Rng rng(7);
  ChainState s = make_state(Vector::Zero(3), refresh_velocity(3, rng), t);
  t.reset_gradient_calls();
  std::uint64_t counted = 0;
  for (int k = 0; k < 100; ++k) {
    const ProposalOutcome out = mh_step(s, cfg, sched, t, rng);
    EXPECT_TRUE(out.divergent);
    EXPECT_FALSE(out.accepted);
    EXPECT_EQ(s.z.x, Vector::Zero(3));
    counted += out.grad_calls;
  }
  EXPECT_EQ(counted, t.gradient_calls());
}

namespace {

struct WorkStats {
  MeanSe exp_minus_w;
  double positive_fraction;
  double positive_se;
};

WorkStats stationary_work(SamplerKind kind, const TargetDensity& t, double eps, double L,
                          int proposals, std::uint64_t seed) {
  Rng rng(seed);
  KernelConfig cfg;
  cfg.step_size = eps;
  cfg.trajectory_length = L;
  Chain chain(kind, cfg, initial_state(kind, t.draw_exact(rng), t, rng));
  std::vector<double> ew;
  std::vector<double> positive;
  for (int k = 0; k < proposals; ++k) {
    const ProposalOutcome out = chain.step(t, rng);
    ew.push_back(std::exp(-out.work));
    if (out.accepted) positive.push_back(out.work > 0.0 ? 1.0 : 0.0);
  }
  const MeanSe pos = batch_mean(positive);
  return {batch_mean(ew), pos.mean, pos.se};
}

}  // namespace

TEST(MhStep, JarzynskiAndSignSymmetry) {
  const TargetDensity t = build_gaussian(20, 1.0, EigenLayout::LogUniform);
  for (SamplerKind kind : {SamplerKind::Mams, SamplerKind::Hmc, SamplerKind::MamsLangevin}) {
    const double eps = kind == SamplerKind::Hmc ? 0.6 : 2.5;
    const WorkStats s = stationary_work(kind, t, eps, 2.0 * eps, 100000, 8);
    EXPECT_NEAR(s.exp_minus_w.mean, 1.0, 3 * s.exp_minus_w.se) << to_string(kind);
    EXPECT_NEAR(s.positive_fraction, 0.5, 3 * s.positive_se) << to_string(kind);
  }
}

TEST(MhStep, AdjustedChainPassesKolmogorovSmirnov) {
  const TargetDensity t = build_gaussian(20, 1.0, EigenLayout::LogUniform);
  for (SamplerKind kind : {SamplerKind::Mams, SamplerKind::Hmc}) {
    Rng rng(9);
    KernelConfig cfg;
    cfg.step_size = kind == SamplerKind::Hmc ? 0.5 : 3.0;
    cfg.trajectory_length = kind == SamplerKind::Hmc ? 1.5 : 4.0;
    Chain chain(kind, cfg, initial_state(kind, t.draw_exact(rng), t, rng));
    std::vector<double> x1;
    for (int k = 0; k < 200000; ++k) {
      chain.step(t, rng);
      if (k % 20 == 0) x1.push_back(chain.state().z.x[0]);
    }
    EXPECT_GT(ks_pvalue(ks_statistic_normal(x1), x1.size()), 0.01) << to_string(kind);
  }
}

TEST(MhStep, DetailedBalanceFlows) {
  const TargetDensity t = build_gaussian(2, 1.0, EigenLayout::LogUniform);
  Rng rng(10);
  KernelConfig cfg;
  cfg.step_size = 1.0;
  cfg.trajectory_length = 1.0;
  Chain chain(SamplerKind::Mams, cfg, initial_state(SamplerKind::Mams, t.draw_exact(rng), t, rng));
  auto bin = [](double x) { return x < -0.5 ? 0 : (x > 0.5 ? 2 : 1); };
  long flows[3][3] = {};
  int prev = bin(chain.state().z.x[0]);
  for (int k = 0; k < 400000; ++k) {
    chain.step(t, rng);
    const int now = bin(chain.state().z.x[0]);
    ++flows[prev][now];
    prev = now;
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const double n = static_cast<double>(flows[a][b] + flows[b][a]);
      EXPECT_NEAR(flows[a][b], flows[b][a], 4.0 * std::sqrt(n)) << a << "->" << b;
    }
  }
}

TEST(Hmc, FlatTargetIsFreeFlight) {
  const TargetDensity t = flat_target(3);
  KernelConfig cfg;
  cfg.step_size = 0.25;
  cfg.trajectory_length = 1.0;
  cfg.flavor = Flavor::Canonical;
  cfg.sequence = StepSequence::Fixed;
  TrajectorySchedule sched(cfg.avg_steps(), cfg.sequence);
  Rng rng(11);
  const Vector u = refresh_gaussian_velocity(3, rng);
  ChainState s = make_state(Vector::Zero(3), u, t);
  const ProposalOutcome out = hmc_step(s, cfg, sched, t, rng);
  EXPECT_EQ(out.work, 0.0);
  EXPECT_TRUE(out.accepted);
  EXPECT_LT((s.z.x - u).norm(), 1e-12);
}

TEST(Hmc, HamiltonianIsPotentialPlusKinetic) {
  const TargetDensity t = build_gaussian(3, 1.0, EigenLayout::LogUniform);
  const Vector x = (Vector(3) << 1, 2, 3).finished();
  const Vector u = (Vector(3) << 0.5, 0, -1).finished();
  const ChainState s = make_state(x, u, t);
  EXPECT_NEAR(hamiltonian(s), 7.0 + 0.625, 1e-12);
}

TEST(Kernel, SamplerNamesRoundTrip) {
  for (auto k : {SamplerKind::Mams, SamplerKind::MamsLangevin, SamplerKind::Hmc}) {
    EXPECT_EQ(parse_sampler_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_sampler_kind("NUTS"), ConfigurationError);
  EXPECT_DOUBLE_EQ(default_target_accept(SamplerKind::Hmc), 0.8);
  EXPECT_DOUBLE_EQ(default_target_accept(SamplerKind::Mams), 0.9);
  EXPECT_DOUBLE_EQ(alba_constant(SamplerKind::Mams), 0.3);
  EXPECT_DOUBLE_EQ(alba_constant(SamplerKind::MamsLangevin), 0.23);
  EXPECT_DOUBLE_EQ(initial_trajectory_length(SamplerKind::Mams, 100), 10.0);
}
