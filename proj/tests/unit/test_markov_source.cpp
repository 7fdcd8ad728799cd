#include <gtest/gtest.h>

#include <cmath>

#include "fincontext/errors.hpp"
#include "fincontext/markov_source.hpp"
#include "helpers.hpp"

using namespace fincontext;
using namespace testing_helpers;

namespace {

TransitionKernel kernel_from_fixture(const nlohmann::json& j) {
  return kernel(j["alphabet_size"], j["order"], j["probs"].get<std::vector<std::vector<double>>>());
}

}  // namespace

TEST(MarkovSource, TwoStateStationaryLaw) {
  const auto law = stationary_law(two_state());
  EXPECT_NEAR(law.pi[0], 4.0 / 7.0, 1e-10);
  EXPECT_NEAR(law.pi[1], 3.0 / 7.0, 1e-10);
}

TEST(MarkovSource, TwoStateEntropies) {
  const auto k = two_state();
  const double rate = 4.0 / 7.0 * h2(0.3) + 3.0 / 7.0 * h2(0.4);
  EXPECT_NEAR(entropy_rate(k), rate, 1e-10);
  EXPECT_NEAR(entropy_rate(k), 0.9197, 5e-5);
  EXPECT_NEAR(conditional_entropy(k, 0), h2(3.0 / 7.0), 1e-10);
  EXPECT_NEAR(conditional_entropy(k, 1), rate, 1e-10);
  EXPECT_NEAR(conditional_entropy(k, 3), rate, 1e-10);
}

TEST(MarkovSource, MatchesFrozenFixtures) {
  for (const auto& f : golden()["entropy"]) {
    const auto k = kernel_from_fixture(f);
    const auto law = stationary_law(k);
    const auto pi = f["pi"].get<std::vector<double>>();
    for (std::size_t c = 0; c < pi.size(); ++c) EXPECT_NEAR(law.pi[static_cast<Eigen::Index>(c)], pi[c], 1e-9);
    EXPECT_NEAR(entropy_rate(k, law), f["entropy_rate"].get<double>(), 1e-9);
    const auto ce = f["conditional_entropy"].get<std::vector<double>>();
    for (std::size_t w = 0; w < ce.size(); ++w) EXPECT_NEAR(conditional_entropy(k, law, w), ce[w], 1e-9) << w;
  }
}

TEST(MarkovSource, SamplingIsDeterministicAndMatchesFixture) {
  const auto& f = golden()["entropy"][0];
  const auto k = sample_kernel(f["alphabet_size"], f["order"], f["dirichlet_alpha"], f["seed"]);
  const auto probs = f["probs"].get<std::vector<std::vector<double>>>();
  for (std::size_t c = 0; c < probs.size(); ++c)
    for (std::size_t y = 0; y < probs[c].size(); ++y)
      EXPECT_DOUBLE_EQ(k.prob(c, static_cast<Symbol>(y)), probs[c][y]);
  EXPECT_EQ(sample_sequence(k, 1000, 9), sample_sequence(k, 1000, 9));
  EXPECT_NE(sample_sequence(k, 1000, 9), sample_sequence(k, 1000, 10));
}

TEST(MarkovSource, AgreesWithBruteForceOnRandomKernels) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t a = 2 + seed % 3;
    const std::size_t order = seed % 3;
    const auto k = sample_kernel(a, order, 0.8, 100 + seed);
    const auto c = chain(k);
    const auto law = stationary_law(k);
    const auto pi = oracle::stationary(c);
    for (std::size_t i = 0; i < pi.size(); ++i) EXPECT_NEAR(law.pi[static_cast<Eigen::Index>(i)], pi[i], 1e-9);
    EXPECT_NEAR(entropy_rate(k, law), oracle::entropy_rate(c), 1e-9);
    for (int w = 0; w <= 3; ++w)
      EXPECT_NEAR(conditional_entropy(k, law, static_cast<std::size_t>(w)), oracle::conditional_entropy(c, w), 1e-9);
  }
}

TEST(MarkovSource, ConditionalEntropyIsNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto k = sample_kernel(3, 2, 0.5, seed);
    const auto law = stationary_law(k);
    double prev = conditional_entropy(k, law, 0);
    for (std::size_t w = 1; w <= 5; ++w) {
      const double h = conditional_entropy(k, law, w);
      EXPECT_LE(h, prev + 1e-12);
      prev = h;
    }
    EXPECT_NEAR(prev, entropy_rate(k, law), 1e-10);
  }
}

TEST(MarkovSource, StationaryJointMarginalizes) {
  const auto k = sample_kernel(3, 1, 0.5, 4);
  const auto law = stationary_law(k);
  const auto j3 = stationary_joint(k, law, 3);
  const auto j2 = stationary_joint(k, law, 2);
  EXPECT_NEAR(j3.sum(), 1.0, 1e-12);
  for (Eigen::Index s = 0; s < 9; ++s) {
    double left = 0, right = 0;
    for (Eigen::Index y = 0; y < 3; ++y) {
      left += j3[s * 3 + y];
      right += j3[y * 9 + s];
    }
    EXPECT_NEAR(left, j2[s], 1e-12);
    EXPECT_NEAR(right, j2[s], 1e-12);
  }
}

TEST(MarkovSource, EmpiricalFrequenciesConverge) {
  const auto k = two_state();
  const auto seq = sample_sequence(k, 200000, 1);
  double ones = 0;
  for (auto y : seq) ones += y;
  EXPECT_NEAR(ones / seq.size(), 3.0 / 7.0, 0.01);
}

TEST(MarkovSource, RejectsBadKernels) {
  EXPECT_THROW(kernel(1, 0, {{1.0}}), ParameterError);
  EXPECT_THROW(kernel(2, 1, {{0.5, 0.5}}), FormatError);
  EXPECT_THROW(kernel(2, 1, {{0.5, 0.6}, {0.5, 0.5}}), FormatError);
  EXPECT_THROW(kernel(2, 1, {{1.5, -0.5}, {0.5, 0.5}}), FormatError);
  EXPECT_THROW(sample_kernel(2, 1, 0.0, 0), ParameterError);
  EXPECT_THROW(sample_kernel(1, 1, 1.0, 0), ParameterError);
  EXPECT_THROW(sample_sequence(two_state(), 0, 0), ParameterError);
}

TEST(MarkovSource, ReducibleChains) {
  const auto identity = kernel(2, 1, {{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_FALSE(is_irreducible(identity));
  EXPECT_THROW(stationary_law(identity), ErgodicityError);
  Eigen::VectorXd pi(2);
  pi << 1.0, 0.0;
  const auto law = make_stationary_law(identity, pi);
  const auto seq = sample_sequence(identity, law, 100, 0);
  for (auto y : seq) EXPECT_EQ(y, 0);
  EXPECT_NEAR(entropy_rate(identity, law), 0.0, 1e-12);
  Eigen::VectorXd bad(2);
  bad << 0.5, 0.6;
  EXPECT_THROW(make_stationary_law(identity, bad), Error);

  const auto absorbing = kernel(2, 1, {{1.0, 0.0}, {0.5, 0.5}});
  EXPECT_FALSE(is_irreducible(absorbing));
  Eigen::VectorXd not_invariant(2);
  not_invariant << 0.0, 1.0;
  EXPECT_THROW(make_stationary_law(absorbing, not_invariant), ErgodicityError);
}

TEST(MarkovSource, PeriodicChainConverges) {
  const auto flip = kernel(2, 1, {{0.0, 1.0}, {1.0, 0.0}});
  const auto law = stationary_law(flip);
  EXPECT_NEAR(law.pi[0], 0.5, 1e-10);
  EXPECT_EQ(min_transition_prob(flip), 0.0);
  EXPECT_FALSE(is_delta_positive(flip));
}

TEST(MarkovSource, EnumerationBudget) {
  EXPECT_THROW(checked_power(2, 64, ~std::uint64_t{0}), CapacityError);
  EXPECT_EQ(checked_power(3, 4, 100), 81u);
  EXPECT_THROW(checked_power(3, 5, 100), CapacityError);
  const auto k = two_state();
  EXPECT_THROW(conditional_entropy(k, 20, 1000), CapacityError);
}
