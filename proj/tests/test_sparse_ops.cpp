#include <gtest/gtest.h>

#include <cmath>

#include "onebit/sparse_ops.hpp"
#include "oracles.hpp"

using namespace onebit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Random small vector; with ties = true entries come from a tiny integer
// alphabet so equal magnitudes are common.
Vector random_small(RngStream& rng, Index n, bool ties) {
  Vector v(n);
  for (Index i = 0; i < n; ++i)
    v[i] = ties ? static_cast<double>(static_cast<int>(rng.uniform_index(7)) - 3) : rng.gaussian();
  return v;
}

}  // namespace

TEST(HardThreshold, Examples) {
  EXPECT_EQ(hard_threshold(vec({3, -4, 1}), 2), vec({3, -4, 0}));
  EXPECT_EQ(hard_threshold(vec({2, -2, 0}), 1), vec({2, 0, 0}));
  EXPECT_EQ(hard_threshold(vec({0, 5, 0, -1}), 2), vec({0, 5, 0, -1}));
}

TEST(HardThreshold, RangeChecks) {
  EXPECT_THROW(hard_threshold(vec({1, 2}), 0), InvalidArgument);
  EXPECT_THROW(hard_threshold(vec({1, 2}), 3), InvalidArgument);
}

TEST(HardThreshold, MatchesEnumerationOracle) {
  RngStream rng(2024);
  for (int t = 0; t < 4000; ++t) {
    const Index n = 1 + static_cast<Index>(rng.uniform_index(12));
    const Index s = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    const Vector v = random_small(rng, n, t % 2 == 0);
    const Vector got = hard_threshold(v, s);
    ASSERT_EQ(got, oracle::brute_hard_threshold(v, static_cast<int>(s))) << "trial " << t;
    ASSERT_LE((got.array() != 0.0).count(), s);
    ASSERT_NEAR((v - got).squaredNorm(), oracle::brute_residual_energy(v, static_cast<int>(s)),
                1e-12);
  }
}

TEST(HardThreshold, IdempotentOnModelSet) {
  RngStream rng(1);
  for (int t = 0; t < 200; ++t) {
    const Vector x = draw_sparse_signal(rng, 30, 4).values();
    ASSERT_EQ(hard_threshold(x, 4), x);
    ASSERT_EQ(hard_threshold(hard_threshold(x * 3.0, 2), 2), hard_threshold(x * 3.0, 2));
  }
}

TEST(TopSupport, SortedAndTieBroken) {
  const auto sup = top_support(vec({1, -3, 3, 0, 3}), 2);
  EXPECT_EQ(sup.indices(), (std::vector<Index>{1, 2}));
  EXPECT_TRUE(sup.contains(2));
  EXPECT_FALSE(sup.contains(4));
  EXPECT_THROW(Support({2, 1}), InvalidArgument);
}

TEST(Normalize, Examples) {
  EXPECT_LE((normalize(vec({3, 4})) - vec({0.6, 0.8})).norm(), 1e-15);
  const Vector u = vec({0.6, 0.8});
  EXPECT_LE((normalize(u) - u).norm(), 1e-15);
  EXPECT_THROW(normalize(vec({0, 0})), DegenerateIterate);
}

TEST(Normalize, UnitWithinTolerance) {
  RngStream rng(8);
  for (int t = 0; t < 1000; ++t) {
    Vector v(17);
    for (Index i = 0; i < 17; ++i) v[i] = rng.gaussian() * std::pow(10.0, t % 20 - 10);
    ASSERT_NEAR(normalize(v).norm(), 1.0, 1e-12);
  }
}

TEST(SparseDualNorm, Examples) {
  EXPECT_NEAR(sparse_dual_norm(vec({3, 4, 1}), 1), 5.0, 1e-12);
  EXPECT_EQ(sparse_dual_norm(Vector::Zero(5), 2), 0.0);
  const Vector v = vec({0, 1, 0, -2, 0, 0});
  EXPECT_NEAR(sparse_dual_norm(v, 1), v.norm(), 1e-15);
  // 2s larger than the length is capped.
  EXPECT_NEAR(sparse_dual_norm(vec({1, 2, 2}), 5), 3.0, 1e-15);
  EXPECT_THROW(sparse_dual_norm(v, 0), InvalidArgument);
}

TEST(SparseDualNorm, MatchesEnumerationOracle) {
  RngStream rng(77);
  for (int t = 0; t < 4000; ++t) {
    const Index n = 2 + static_cast<Index>(rng.uniform_index(11));
    const Index s = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n / 2)));
    const Vector v = random_small(rng, n, t % 3 == 0);
    ASSERT_NEAR(sparse_dual_norm(v, s), oracle::brute_dual_norm(v, static_cast<int>(s)), 1e-12)
        << "trial " << t;
  }
}

TEST(GeodesicDistance, Examples) {
  const Vector e1 = vec({1, 0, 0});
  const Vector e2 = vec({0, 1, 0});
  EXPECT_EQ(geodesic_distance(e1, e1), 0.0);
  EXPECT_DOUBLE_EQ(geodesic_distance(e1, -e1), 1.0);
  EXPECT_NEAR(geodesic_distance(e1, e2), 0.5, 1e-15);
  EXPECT_THROW(geodesic_distance(e1, vec({2, 0, 0})), InvalidArgument);
  EXPECT_THROW(geodesic_distance(e1, vec({1, 0})), InvalidArgument);
}

TEST(GeodesicDistance, AgreesWithArccosAndMetricAxioms) {
  RngStream rng(5);
  for (int t = 0; t < 2000; ++t) {
    const Vector x = draw_sparse_signal(rng, 12, 5).values();
    const Vector y = draw_sparse_signal(rng, 12, 5).values();
    const double d = geodesic_distance(x, y);
    ASSERT_NEAR(d, std::acos(std::clamp(x.dot(y), -1.0, 1.0)) / M_PI, 1e-7);
    ASSERT_EQ(d, geodesic_distance(y, x));
    ASSERT_GE(d, 0.0);
    ASSERT_LE(d, 1.0);
    ASSERT_EQ(geodesic_distance(x, x), 0.0);
    ASSERT_EQ(geodesic_distance(x, -x), 1.0);
  }
}

TEST(HammingDistance, Examples) {
  const BinaryObservation a({1, 1, -1, -1});
  EXPECT_EQ(hamming_distance(a, a), 0.0);
  EXPECT_EQ(hamming_distance(a, BinaryObservation({-1, -1, 1, 1})), 1.0);
  EXPECT_EQ(hamming_distance(a, BinaryObservation({1, -1, -1, -1})), 0.25);
  EXPECT_THROW(hamming_distance(a, BinaryObservation({1})), InvalidArgument);
}

TEST(HammingDistance, MetricAxioms) {
  RngStream rng(6);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::int8_t> p(40), q(40);
    for (std::size_t i = 0; i < 40; ++i) {
      p[i] = rng.uniform() < 0.5 ? 1 : -1;
      q[i] = rng.uniform() < 0.5 ? 1 : -1;
    }
    const BinaryObservation a(p), b(q);
    ASSERT_EQ(hamming_distance(a, b), hamming_distance(b, a));
    ASSERT_EQ(hamming_distance(a, b) == 0.0, a == b);
  }
}

TEST(L2Error, Examples) {
  EXPECT_EQ(l2_error(vec({1, 2}), vec({1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(l2_error(vec({1, 0}), vec({-1, 0})), 2.0);
  EXPECT_DOUBLE_EQ(l2_error(vec({1, 0}), vec({0, 1})), std::sqrt(2.0));
  EXPECT_THROW(l2_error(vec({1}), vec({1, 2})), InvalidArgument);
}

TEST(SparseProducts, MatchDense) {
  const auto a = gen_gaussian_matrix(3, 50, 20);
  RngStream rng(4);
  const Vector x = draw_sparse_signal(rng, 20, 3).values();
  EXPECT_LE((sparse_matvec(a.matrix(), x) - a.matrix() * x).cwiseAbs().maxCoeff(), 1e-13);
  Vector r = Vector::Zero(50);
  r[3] = 2.0;
  r[17] = -2.0;
  EXPECT_LE((sparse_rmatvec(a.matrix(), r) - a.matrix().transpose() * r).cwiseAbs().maxCoeff(),
            1e-13);
}

// E d_H(sign(Ax), sign(Ay)) = d_g(x, y): each row disagrees independently
// with probability d_g, so the T-ensemble mean is Binomial(mT, d_g)/(mT).
TEST(HammingDistance, UnbiasedForGeodesic) {
  RngStream rng(31);
  const Index n = 16, m = 512, trials = 40;
  for (int p = 0; p < 5; ++p) {
    const Vector x = draw_sparse_signal(rng, n, 3).values();
    const Vector y = draw_sparse_signal(rng, n, 3).values();
    double sum = 0.0;
    for (Index t = 0; t < trials; ++t) {
      const auto a = gen_gaussian_matrix(split_seed(900 + static_cast<std::uint64_t>(p), t), m, n);
      sum += hamming_distance(sign_quantize(a.matrix() * x), sign_quantize(a.matrix() * y));
    }
    const double dg = geodesic_distance(x, y);
    const double band = 4.0 * std::sqrt(dg * (1 - dg) / static_cast<double>(m * trials));
    EXPECT_NEAR(sum / static_cast<double>(trials), dg, band) << "pair " << p;
  }
}
