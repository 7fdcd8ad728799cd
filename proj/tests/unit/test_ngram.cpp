#include <gtest/gtest.h>

#include <cmath>

#include "fincontext/errors.hpp"
#include "fincontext/ngram.hpp"
#include "helpers.hpp"

using namespace fincontext;
using namespace testing_helpers;

TEST(Ngram, ContextCodeRollsBigEndian) {
  const ContextCode code(3, 2);
  EXPECT_EQ(code.modulus(), 9u);
  std::uint64_t c = 0;
  c = code.push(c, 2);
  c = code.push(c, 1);
  EXPECT_EQ(c, 2u * 3 + 1);
  c = code.push(c, 0);
  EXPECT_EQ(c, 1u * 3 + 0);
  const SymbolSeq seq{2, 1, 0};
  EXPECT_EQ(code.of(seq, 3), 3u);
  EXPECT_EQ(code.of(seq, 2), 7u);
}

TEST(Ngram, LaplaceCounts) {
  const auto q = fit(Alphabet::numeric(2), bits("0101"), 1, 0.5);
  EXPECT_NEAR(q.prob(0, 1), 2.5 / 3.0, 1e-12);
  EXPECT_NEAR(q.prob(0, 0), 0.5 / 3.0, 1e-12);
  EXPECT_NEAR(q.prob(1, 0), 1.5 / 2.0, 1e-12);
  const auto q0 = fit(Alphabet::numeric(2), bits("0111"), 0, 1.0);
  EXPECT_NEAR(q0.prob(0, 1), 4.0 / 6.0, 1e-12);
}

TEST(Ngram, UnseenContextsAreUniform) {
  const auto q = fit(Alphabet::numeric(3), SymbolSeq{0, 0, 0, 0}, 2, 0.5);
  for (Symbol y = 0; y < 3; ++y) EXPECT_NEAR(q.prob(5, y), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(q.row(0).sum(), 1.0, 1e-12);
}

TEST(Ngram, UniformPredictorLossIsLogAlphabet) {
  for (std::size_t a : {2u, 3u, 5u}) {
    ProbTable t = ProbTable::Constant(1, static_cast<Eigen::Index>(a), 1.0 / static_cast<double>(a));
    const auto q = ContextPredictor::from_table(Alphabet::numeric(a), 0, t);
    const auto seq = sample_sequence(sample_kernel(a, 1, 1.0, 3), 500, 3);
    EXPECT_NEAR(log_loss(q, seq).bits_per_symbol, std::log2(static_cast<double>(a)), 1e-12);
  }
}

TEST(Ngram, OptimalPredictorFixture) {
  const auto& f = golden()["optimal_w1_k2"];
  const auto k = kernel(2, 2, f["probs"].get<std::vector<std::vector<double>>>());
  const auto q = optimal_predictor(k, 1);
  for (const auto& [ctx, row] : f["rows"].items())
    for (Symbol y = 0; y < 2; ++y) EXPECT_NEAR(q.prob(std::stoull(ctx), y), row[y].get<double>(), 1e-9);
}

TEST(Ngram, OptimalPredictorMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t a = 2 + seed % 2;
    const std::size_t order = 1 + seed % 2;
    const auto k = sample_kernel(a, order, 0.7, 50 + seed);
    const auto c = chain(k);
    for (int w = 0; w <= 3; ++w) {
      const auto q = optimal_predictor(k, static_cast<std::size_t>(w));
      for (const auto& [ctx, law] : oracle::conditional_law(c, w)) {
        std::uint64_t code = 0;
        for (int s : ctx) code = code * a + static_cast<std::uint64_t>(s);
        for (std::size_t y = 0; y < a; ++y) EXPECT_NEAR(q.prob(code, static_cast<Symbol>(y)), law[y], 1e-9);
      }
    }
  }
}

TEST(Ngram, OptimalLossEqualsConditionalEntropyInTheLimit) {
  const auto k = sample_kernel(2, 2, 0.5, 11);
  const auto law = stationary_law(k);
  const auto seq = sample_sequence(k, law, 1'000'000, 11);
  for (std::size_t w : {1u, 2u, 3u}) {
    const auto q = optimal_predictor(k, law, w);
    const auto loss = log_loss(q, seq);
    EXPECT_FALSE(loss.infinite);
    EXPECT_NEAR(loss.bits_per_symbol, conditional_entropy(k, law, w), 0.01) << w;
  }
}

TEST(Ngram, ZeroProbabilityEventsAreReported) {
  ProbTable t(2, 2);
  t << 1.0, 0.0, 0.5, 0.5;
  const auto q = ContextPredictor::from_table(Alphabet::numeric(2), 1, t);
  const auto loss = log_loss(q, bits("0100"));
  EXPECT_TRUE(loss.infinite);
  EXPECT_EQ(loss.zero_probability_events, 1u);
  EXPECT_EQ(q.min_prob(), 0.0);
}

TEST(Ngram, MixingGivesPositivityFloor) {
  ProbTable t(2, 2);
  t << 1.0, 0.0, 0.5, 0.5;
  const auto q = ContextPredictor::from_table(Alphabet::numeric(2), 1, t).mixed_with_uniform(0.1);
  EXPECT_NEAR(q.prob(0, 1), 0.05, 1e-12);
  EXPECT_NEAR(q.prob(0, 0), 0.95, 1e-12);
  EXPECT_NEAR(q.min_prob(), 0.05, 1e-12);
  const auto fitted = fit(Alphabet::numeric(3), SymbolSeq{0, 1, 2, 0, 1, 2}, 1, 0.5);
  EXPECT_GT(fitted.min_prob(), 0.0);
}

TEST(Ngram, Errors) {
  EXPECT_THROW(log_loss(fit(Alphabet::numeric(2), bits("01"), 2), bits("01")), PreconditionError);
  EXPECT_THROW(fit(Alphabet::numeric(2), SymbolSeq{0, 2}, 1), AlphabetError);
  EXPECT_THROW(fit(Alphabet::numeric(2), bits("01"), 1, -1.0), ParameterError);
  ProbTable bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  EXPECT_THROW(ContextPredictor::from_table(Alphabet::numeric(2), 1, bad), FormatError);
  EXPECT_THROW(ContextPredictor::from_table(Alphabet::numeric(2), 2, bad), FormatError);
}
