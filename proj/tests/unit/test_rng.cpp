#include <gtest/gtest.h>

#include <cmath>

#include "fincontext/errors.hpp"
#include "fincontext/rng.hpp"

using namespace fincontext;

TEST(Rng, SplitMixReferenceValue) {
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, DerivedSeedsDependOnTag) {
  EXPECT_NE(derive_seed(0, "kernel"), derive_seed(0, "sequence"));
  EXPECT_NE(derive_seed(0, "kernel"), derive_seed(1, "kernel"));
  EXPECT_EQ(derive_seed(5, "kernel"), derive_seed(5, "kernel"));
}

TEST(Rng, UniformRange) {
  Rng r(1);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
  for (int i = 0; i < 1000; ++i) ASSERT_LT(r.uniform_index(7), 7u);
  EXPECT_THROW(r.uniform_index(0), ParameterError);
}

TEST(Rng, NormalMoments) {
  Rng r(2);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, GammaMeanMatchesShape) {
  for (double shape : {0.4, 1.0, 2.5}) {
    Rng r(3);
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i) {
      const double g = r.gamma(shape);
      ASSERT_GE(g, 0.0);
      s += g;
    }
    // sd of the mean is sqrt(shape / n)
    EXPECT_NEAR(s / n, shape, 5 * std::sqrt(shape / n)) << shape;
  }
  Rng r(0);
  EXPECT_THROW(r.gamma(0.0), ParameterError);
}

TEST(Rng, DirichletIsADistribution) {
  Rng r(4);
  for (int i = 0; i < 100; ++i) {
    const auto d = r.dirichlet(5, 0.3);
    EXPECT_NEAR(d.sum(), 1.0, 1e-12);
    EXPECT_GE(d.minCoeff(), 0.0);
  }
  EXPECT_THROW(r.dirichlet(3, -1.0), ParameterError);
}
