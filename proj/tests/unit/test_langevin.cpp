#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "mams/kernel.hpp"
#include "mams/langevin.hpp"
#include "mams/models.hpp"

using namespace mams;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TargetDensity flat_target(int d) {
  return TargetDensity("Flat", d, [d](const Vector&, Vector* grad) {
    if (grad) grad->setZero(d);
    return 0.0;
  });
}

}  // namespace

TEST(PartialRefresh, InfiniteScaleLeavesVelocityAndStream) {
  Rng rng(1), ref(1);
  const Vector u = refresh_velocity(6, rng);
  refresh_velocity(6, ref);
  const Vector out = partial_refresh(u, 0.3, kInf, rng);
  EXPECT_EQ(out, u);
  EXPECT_EQ(rng.normal(), ref.normal());
}

TEST(PartialRefresh, TinyScaleGivesFreshDirection) {
  Rng rng(2), ref(2);
  const Vector u = Vector::Unit(5, 0);
  const Vector out = partial_refresh(u, 1.0, 1e-6, rng);
  const Vector z = ref.normal_vector(5);
  EXPECT_LT((out - z / z.norm()).norm(), 1e-12);
}

TEST(PartialRefresh, RejectsNonPositiveScale) {
  Rng rng(3);
  EXPECT_THROW(partial_refresh(Vector::Unit(3, 0), 0.1, 0.0, rng), std::invalid_argument);
}

TEST(PartialRefresh, EquilibratesToUniformSphere) {
  const int d = 4;
  Rng rng(4);
  Vector u = Vector::Unit(d, 0);
  for (int k = 0; k < 10000; ++k) u = partial_refresh(u, 1.0, 1.0, rng);
  const int n = 200000;
  const int batches = 100;
  std::vector<Vector> batch(batches, Vector::Zero(d));
  for (int k = 0; k < n; ++k) {
    u = partial_refresh(u, 1.0, 1.0, rng);
    ASSERT_NEAR(u.norm(), 1.0, 1e-12);
    batch[k / (n / batches)] += u.cwiseAbs2() / (n / batches);
  }
  for (int i = 0; i < d; ++i) {
    double m = 0.0, v = 0.0;
    for (const auto& b : batch) m += b[i] / batches;
    for (const auto& b : batch) v += (b[i] - m) * (b[i] - m) / (batches - 1);
    EXPECT_NEAR(m, 1.0 / d, 4.0 * std::sqrt(v / batches));
  }
}

TEST(Obabo, NoNoiseEqualsLeapfrog) {
  const TargetDensity t = build_model(default_spec(ModelKind::Banana));
  Rng rng(5);
  const ChainState start = make_state(t.draw_exact(rng), refresh_velocity(2, rng), t);
  ChainState a = start, b = start;
  LangevinConfig cfg{0.05, 1, kInf};
  const EnergyDelta da = obabo_step(a, cfg, t, rng);
  const EnergyDelta db = leapfrog_step(b, 0.05, t, Flavor::Microcanonical);
  EXPECT_EQ(da.total(), db.total());
  EXPECT_EQ(a.z.x, b.z.x);
  EXPECT_EQ(a.z.u, b.z.u);
}

TEST(Obabo, FlatTargetHasNoEnergyChange) {
  const TargetDensity t = flat_target(5);
  Rng rng(6);
  ChainState s = make_state(Vector::Zero(5), refresh_velocity(5, rng), t);
  LangevinConfig cfg{0.4, 3, 0.5};
  for (int k = 0; k < 50; ++k) {
    EXPECT_EQ(obabo_step(s, cfg, t, rng).total(), 0.0);
  }
  const ProposalOutcome out = malt_sample_step(s, cfg, t, rng);
  EXPECT_TRUE(out.accepted);
}

TEST(Obabo, NormPreservedOverLongRun) {
  const TargetDensity t = build_model(default_spec(ModelKind::Rosenbrock));
  Rng rng(7);
  ChainState s = make_state(t.draw_exact(rng), refresh_velocity(t.dim(), rng), t);
  LangevinConfig cfg{0.01, 1, 0.5};
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    obabo_step(s, cfg, t, rng);
    worst = std::max(worst, std::abs(s.z.u.norm() - 1.0));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Malt, NoNoiseFixedScheduleMatchesMhStep) {
  const TargetDensity t = build_model(default_spec(ModelKind::Rosenbrock));
  Rng init(8);
  const Vector x0 = t.draw_exact(init);

  KernelConfig cfg;
  cfg.step_size = 0.15;
  cfg.trajectory_length = 0.6;
  cfg.sequence = StepSequence::Fixed;
  TrajectorySchedule sched(cfg.avg_steps(), cfg.sequence);
  Rng ra(99);
  ChainState a = make_state(x0, refresh_velocity(t.dim(), ra), t);

  LangevinConfig lc{0.15, 4, kInf};
  Rng rb(99);
  ChainState b = make_state(x0, Vector::Unit(t.dim(), 0), t);

  int accepted = 0;
  for (int k = 0; k < 2000; ++k) {
    const ProposalOutcome oa = mh_step(a, cfg, sched, t, ra);
    const ProposalOutcome ob = malt_sample_step(b, lc, t, rb);
    ASSERT_EQ(oa.accepted, ob.accepted) << "step " << k;
    ASSERT_EQ(a.z.x, b.z.x) << "step " << k;
    EXPECT_EQ(oa.work, ob.work);
    accepted += oa.accepted;
  }
  EXPECT_GT(accepted, 100);
  EXPECT_LT(accepted, 2000);
}

TEST(Malt, ConstantGradientCallsPerSample) {
  const TargetDensity t = build_gaussian(10, 10.0, EigenLayout::LogUniform);
  Rng rng(10);
  KernelConfig cfg;
  cfg.step_size = 0.7;
  cfg.trajectory_length = 3.6;
  Chain chain(SamplerKind::MamsLangevin, cfg,
              initial_state(SamplerKind::MamsLangevin, t.draw_exact(rng), t, rng));
  EXPECT_DOUBLE_EQ(chain.config().l_partial, 1.25 * 3.6);
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(chain.step(t, rng).grad_calls, 5u);
  }
  EXPECT_EQ(chain.max_steps(), 5);
}

TEST(Malt, BimodalMixtureWeight) {
  const TargetDensity t = build_bimodal();
  // Exact-sampler estimate of P(x_1 > 2).
  Rng exact(11);
  const int n_exact = 1000000;
  int hits = 0;
  for (int k = 0; k < n_exact; ++k) hits += t.draw_exact(exact)[0] > 2.0;
  const double p_exact = static_cast<double>(hits) / n_exact;

  Rng rng(12);
  KernelConfig cfg;
  cfg.step_size = 0.6;
  cfg.trajectory_length = 5.0;
  Chain chain(SamplerKind::MamsLangevin, cfg,
              initial_state(SamplerKind::MamsLangevin, t.draw_exact(rng), t, rng));
  const int batches = 50, per_batch = 8000;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (int k = 0; k < per_batch; ++k) {
      chain.step(t, rng);
      means[b] += (chain.state().z.x[0] > 2.0) / static_cast<double>(per_batch);
    }
  }
  double m = 0.0, v = 0.0;
  for (double x : means) m += x / batches;
  for (double x : means) v += (x - m) * (x - m) / (batches - 1);
  const double se = std::sqrt(v / batches + p_exact * (1 - p_exact) / n_exact);
  EXPECT_NEAR(m, p_exact, 3.0 * se);
}
