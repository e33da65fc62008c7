#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "onebit/harness.hpp"
#include "onebit/recon.hpp"
#include "onebit/sparse_ops.hpp"
#include "oracles.hpp"

using namespace onebit;

namespace {

std::vector<int> bits_of(const BinaryObservation& b) {
  std::vector<int> out(static_cast<std::size_t>(b.size()));
  for (Index i = 0; i < b.size(); ++i) out[static_cast<std::size_t>(i)] = b[i];
  return out;
}

AlgorithmConfig config(Index s, int iters, Initialization init = RandomSparseInit{1}) {
  AlgorithmConfig cfg;
  cfg.sparsity = s;
  cfg.max_iters = iters;
  cfg.init = std::move(init);
  return cfg;
}

bool same_support(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i)
    if ((a[i] != 0.0) != (b[i] != 0.0)) return false;
  return true;
}

}  // namespace

TEST(NbihtStep, FixedPointAtSignConsistency) {
  const auto a = gen_gaussian_matrix(1, 80, 20);
  const auto x = gen_sparse_signal(2, 20, 3);
  EXPECT_EQ(nbiht_step(a, measure(a, x.values()), x, kUnbiasedStep, 3).values(), x.values());
}

TEST(NbihtStep, ZeroStepKeepsIterate) {
  const auto a = gen_gaussian_matrix(3, 80, 20);
  const auto x = gen_sparse_signal(4, 20, 3);
  const auto b = measure(a, gen_sparse_signal(5, 20, 3).values());
  EXPECT_EQ(nbiht_step(a, b, x, 0.0, 3).values(), x.values());
}

TEST(NbihtStep, HandBuiltInstance) {
  Matrix m(4, 3);
  m << 1.0, -0.5, 0.2,  //
      -0.3, 0.8, 1.1,   //
      0.7, 0.1, -0.9,   //
      -1.2, 0.4, 0.6;
  const MeasurementEnsemble a(m);
  const BinaryObservation b({-1, 1, 1, -1});
  Vector x0(3);
  x0 << 1.0, 0.0, 0.0;
  const auto xk = UnitSparseVector(SparseVector(x0, 1));
  const Vector got = nbiht_step(a, b, xk, kUnbiasedStep, 1).values();
  // sign(A e1) = (+, -, +, -); rows 0 and 1 disagree, so
  // z = e1 + (tau/4)(-2 a_0 + 2 a_1) = (1 - 0.65 tau, 0.65 tau, 0.45 tau).
  // |z_0| = 0.185 < |z_1| = 0.815, so T_1 keeps index 1.
  Vector want = Vector::Zero(3);
  want[1] = 1.0;
  EXPECT_EQ(got, want);
  EXPECT_LE((got - oracle::scalar_nbiht_step(m, bits_of(b), x0, kUnbiasedStep, 1)).norm(), 1e-15);
}

TEST(NbihtStep, MatchesScalarLoopOracle) {
  RngStream rng(404);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Index n = 2 + static_cast<Index>(rng.uniform_index(15));
    const Index s = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    const Index m = 4 + static_cast<Index>(rng.uniform_index(60));
    const auto a = gen_gaussian_matrix(rng.next_u64(), m, n);
    const auto truth = draw_sparse_signal(rng, n, s);
    const auto xk = draw_sparse_signal(rng, n, s);
    const auto b = measure(a, truth.values());
    const double tau = 0.2 + 2.0 * rng.uniform();
    const Vector got = nbiht_step(a, b, xk, tau, s).values();
    const Vector want = oracle::scalar_nbiht_step(a.matrix(), bits_of(b), xk.values(), tau,
                                                  static_cast<int>(s));
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(NbihtStep, DegeneratePolicies) {
  Matrix m(1, 1);
  m << 1.0;
  const MeasurementEnsemble a(m);
  const BinaryObservation b({-1});
  Vector one(1);
  one << 1.0;
  const UnitSparseVector x(SparseVector(one, 1));
  // z = 1 + (0.5 / 1)(-2) = 0.
  EXPECT_EQ(nbiht_step(a, b, x, 0.5, 1).values(), one);
  EXPECT_THROW(nbiht_step(a, b, x, 0.5, 1, DegeneratePolicy::fail), DegenerateIterate);

  auto cfg = config(1, 10, ProvidedInit{one});
  cfg.step_size = 0.5;
  const auto trace = nbiht_run(a, b, cfg);
  EXPECT_EQ(trace.stop_reason, StopReason::degenerate);
  cfg.degenerate_policy = DegeneratePolicy::fail;
  EXPECT_THROW(nbiht_run(a, b, cfg), DegenerateIterate);
}

TEST(NbihtRun, TraceInvariants) {
  const auto a = gen_gaussian_matrix(7, 600, 128);
  const auto x = gen_sparse_signal(8, 128, 5);
  const auto trace = nbiht_run(a, measure(a, x.values()), config(5, 100), x);
  ASSERT_FALSE(trace.iterates.empty());
  EXPECT_EQ(trace.iterates.size(), trace.sign_agreement.size());
  EXPECT_EQ(trace.iterates.size(), trace.errors_vs_truth.size());
  for (const auto& it : trace.iterates) {
    EXPECT_NEAR(it.norm(), 1.0, 1e-10);
    EXPECT_LE((it.array() != 0.0).count(), 5);
  }
  for (double g : trace.sign_agreement) {
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0);
  }
  EXPECT_LE(trace.iterations(), 100);
  EXPECT_EQ(trace.estimate, trace.iterates.back());
}

TEST(NbihtRun, Deterministic) {
  const auto a = gen_gaussian_matrix(9, 300, 64);
  const auto x = gen_sparse_signal(10, 64, 3);
  const auto b = measure(a, x.values());
  const auto t1 = nbiht_run(a, b, config(3, 60, RandomSparseInit{77}), x);
  const auto t2 = nbiht_run(a, b, config(3, 60, RandomSparseInit{77}), x);
  ASSERT_EQ(t1.iterates.size(), t2.iterates.size());
  for (std::size_t k = 0; k < t1.iterates.size(); ++k) EXPECT_EQ(t1.iterates[k], t2.iterates[k]);
  EXPECT_EQ(t1.errors_vs_truth, t2.errors_vs_truth);
}

TEST(NbihtRun, StopsAtSignConsistencyOrBudget) {
  const auto a = gen_gaussian_matrix(11, 2000, 128);
  const auto x = gen_sparse_signal(12, 128, 4);
  const auto b = measure(a, x.values());
  const auto trace = nbiht_run(a, b, config(4, 300), x);
  if (trace.stop_reason == StopReason::converged) {
    EXPECT_TRUE(trace.sign_agreement.back() == 1.0 ||
                (trace.iterates.back() - trace.iterates[trace.iterates.size() - 2]).norm() < 1e-10);
  } else {
    EXPECT_EQ(trace.iterations(), 300);
  }
  const auto started_at_truth = nbiht_run(a, b, config(4, 300, ProvidedInit{x.values()}), x);
  EXPECT_EQ(started_at_truth.iterations(), 0);
  EXPECT_EQ(started_at_truth.stop_reason, StopReason::converged);
}

TEST(NbihtRun, ScaleInvariantRecovery) {
  const auto a = gen_gaussian_matrix(13, 500, 64);
  const Vector x = gen_sparse_signal(14, 64, 3).values();
  const auto t1 = nbiht_run(a, measure(a, x), config(3, 80));
  const auto t2 = nbiht_run(a, measure(a, 5.0 * x), config(3, 80));
  EXPECT_EQ(t1.estimate, t2.estimate);
}

TEST(NbihtRun, MatchedFilterInitStartsAtOneShot) {
  const auto a = gen_gaussian_matrix(15, 500, 64);
  const auto b = measure(a, gen_sparse_signal(16, 64, 3).values());
  const auto trace = nbiht_run(a, b, config(3, 5, MatchedFilterInit{}));
  EXPECT_EQ(trace.iterates.front(), one_shot_estimate(a, b, 3).values());
}

TEST(BihtRun, SparseIteratesAndFixedPoint) {
  const auto a = gen_gaussian_matrix(17, 400, 100);
  const auto x = gen_sparse_signal(18, 100, 4);
  const auto b = measure(a, x.values());
  const auto trace = biht_run(a, b, config(4, 100), x);
  for (const auto& it : trace.iterates) EXPECT_LE((it.array() != 0.0).count(), 4);
  EXPECT_NEAR(trace.estimate.norm(), 1.0, 1e-12);

  const Vector scaled = 2.5 * x.values();
  const auto fixed = biht_run(a, b, config(4, 100, ProvidedInit{scaled}));
  EXPECT_EQ(fixed.iterations(), 0);
  EXPECT_LE((fixed.iterates.front() - x.values()).norm(), 1e-15);
}

TEST(IhtRun, FixedPointAtTruth) {
  const auto a = gen_gaussian_matrix(19, 60, 40);
  const auto x = gen_sparse_signal(20, 40, 3);
  // Data formed with the same sparse product the solver uses: zero residual.
  const auto exact = iht_run(a, sparse_matvec(a.matrix(), x.values()),
                             config(3, 50, ProvidedInit{x.values()}), x);
  EXPECT_EQ(exact.iterations(), 0);
  EXPECT_EQ(exact.iterates.back(), x.values());
  // Dense data differs in the last bits; the step then moves by rounding only.
  const auto dense = iht_run(a, a.matrix() * x.values(), config(3, 50, ProvidedInit{x.values()}), x);
  EXPECT_LE(dense.iterations(), 1);
  EXPECT_LE(l2_error(dense.iterates.back(), x.values()), 1e-14);
}

TEST(IhtRun, RejectsMismatch) {
  const auto a = gen_gaussian_matrix(19, 60, 40);
  EXPECT_THROW(iht_run(a, Vector::Zero(59), config(3, 5)), InvalidArgument);
}

// Linear convergence once the support is found: every such step at least
// halves the error.
TEST(IhtRun, ExactRecoveryAndContraction) {
  int recovered = 0;
  int steps = 0, halved = 0;
  for (Index t = 0; t < 100; ++t) {
    const auto a = gen_gaussian_matrix(split_seed(5, t), 200, 256);
    const auto x = gen_sparse_signal(split_seed(6, t), 256, 4);
    const auto trace = iht_run(a, a.matrix() * x.values(),
                               config(4, 200, RandomSparseInit{split_seed(7, t)}), x);
    recovered += l2_error(trace.iterates.back(), x.values()) < 1e-6;
    for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
      const double e0 = trace.errors_vs_truth[k];
      const double e1 = trace.errors_vs_truth[k + 1];
      if (e0 < 1e-10) break;
      ++steps;
      halved += e1 <= 0.5 * e0;
      if (same_support(trace.iterates[k], x.values()))
        EXPECT_LE(e1, 0.5 * e0) << "trial " << t << " step " << k;
    }
  }
  EXPECT_GE(recovered, 95);
  EXPECT_GE(static_cast<double>(halved) / steps, 0.95);
}

TEST(OneShot, DimensionOne) {
  const auto a = gen_gaussian_matrix(21, 9, 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto b = measure(a, Vector::Constant(1, seed % 2 ? 1.0 : -1.0));
    EXPECT_EQ(std::abs(one_shot_estimate(a, b, 1).values()[0]), 1.0);
  }
}

TEST(OneShot, MatchesDefinition) {
  const auto a = gen_gaussian_matrix(22, 300, 50);
  const auto b = measure(a, gen_sparse_signal(23, 50, 3).values());
  Vector bv(300);
  for (Index i = 0; i < 300; ++i) bv[i] = b[i];
  const Vector z = (kUnbiasedStep / 300.0) * (a.matrix().transpose() * bv);
  const Vector want = normalize(hard_threshold(z, 3));
  EXPECT_LE((one_shot_estimate(a, b, 3).values() - want).norm(), 1e-14);
}

TEST(AlgorithmConfig, Validation) {
  AlgorithmConfig cfg;
  cfg.step_size = -1;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = AlgorithmConfig{};
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = AlgorithmConfig{};
  cfg.sparsity = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

// Paired comparison at N=512, s=4, m=4096 over 50 instances.
TEST(PairedMonteCarlo, IterationBeatsOneShotAndBihtTracksNbiht) {
  SweepConfig cfg;
  cfg.n = 512;
  cfg.s = 4;
  cfg.m_grid = {4096};
  cfg.algorithms = {Algorithm::nbiht, Algorithm::biht, Algorithm::one_shot};
  cfg.trials_per_cell = 50;
  cfg.max_iters = 200;
  cfg.master_seed = 8080;
  cfg.workers = 1;
  const auto result = run_sweep(cfg);
  const double nbiht = error_by_m(result.records, "nbiht", ErrorStat::median).at(4096);
  const double biht = error_by_m(result.records, "biht", ErrorStat::median).at(4096);
  const double one_shot = error_by_m(result.records, "one_shot", ErrorStat::median).at(4096);
  RecordProperty("median_nbiht", std::to_string(nbiht));
  RecordProperty("median_biht", std::to_string(biht));
  RecordProperty("median_one_shot", std::to_string(one_shot));
  EXPECT_LT(nbiht, one_shot);
  EXPECT_LE(biht, 3.0 * nbiht);
  EXPECT_GE(biht, nbiht / 3.0);
}
