#include <gtest/gtest.h>

#include "fincontext/errors.hpp"
#include "fincontext/fragmentation.hpp"
#include "helpers.hpp"

using namespace fincontext;
using namespace testing_helpers;

namespace {

Alphabet abcd() { return Alphabet({"a", "b", "c", "d"}); }

FragmentationMap two_bit_map() {
  return make_map(abcd(), Alphabet::numeric(2), 2, {{"0", "0"}, {"0", "1"}, {"1", "0"}, {"1", "1"}});
}

std::vector<oracle::Str> oracle_code(const FragmentationMap& map) {
  std::vector<oracle::Str> out;
  for (const auto& w : map.codewords()) out.emplace_back(w.begin(), w.end());
  return out;
}

}  // namespace

TEST(Fragmentation, FragmentsAndDefragments) {
  const auto map = two_bit_map();
  const SymbolSeq db{3, 1};
  EXPECT_EQ(fragment(map, db), bits("1101"));
  EXPECT_EQ(defragment(map, bits("1101")), db);
  EXPECT_EQ(map.decode(bits("10")), std::optional<Symbol>(2));
  const auto def = FragmentationMap::with_default_code(abcd(), Alphabet::numeric(2), 2);
  EXPECT_EQ(def.codewords(), map.codewords());
}

TEST(Fragmentation, RoundTripsRandomSequences) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t x = 2 + seed % 3;
    const std::size_t m = 1 + seed % 3;
    std::size_t cap = 1;
    for (std::size_t i = 0; i < m; ++i) cap *= x;
    const std::size_t y = std::max<std::size_t>(2, cap - seed % 2);
    if (y > cap) continue;
    const auto map = FragmentationMap::with_default_code(Alphabet::numeric(y), Alphabet::numeric(x), m);
    const auto seq = sample_sequence(sample_kernel(y, 1, 1.0, seed), 200, seed);
    const auto frags = fragment(map, seq);
    ASSERT_EQ(frags.size(), seq.size() * m);
    EXPECT_EQ(defragment(map, frags), seq);
  }
}

TEST(Fragmentation, RejectsBadMaps) {
  EXPECT_THROW(make_map(abcd(), Alphabet::numeric(2), 0), ParameterError);
  EXPECT_THROW(make_map(abcd(), Alphabet::numeric(2), 1), ParameterError);
  EXPECT_THROW(make_map(abcd(), Alphabet::numeric(2), 2, {{"0", "0"}, {"0", "1"}, {"1", "0"}}), FormatError);
  EXPECT_THROW(make_map(abcd(), Alphabet::numeric(2), 2, {{"0", "0"}, {"0", "1"}, {"1", "0"}, {"1"}}), FormatError);
  EXPECT_THROW(make_map(abcd(), Alphabet::numeric(2), 2, {{"0", "0"}, {"0", "1"}, {"1", "0"}, {"1", "2"}}),
               AlphabetError);
  EXPECT_THROW(make_map(abcd(), Alphabet::numeric(2), 2, {{"0", "0"}, {"0", "1"}, {"1", "0"}, {"0", "0"}}),
               InjectivityError);
  const auto map = two_bit_map();
  EXPECT_THROW(fragment(map, SymbolSeq{0, 4}), AlphabetError);
  EXPECT_THROW(defragment(map, bits("110")), FormatError);
}

TEST(Fragmentation, MatchesFrozenFixtures) {
  for (const char* key : {"frag_k1_y4_w2", "frag_k1_y4_w1", "frag_k2_y4_w1"}) {
    const auto& f = golden()[key];
    const auto k = kernel(f["alphabet_size"], f["order"], f["probs"].get<std::vector<std::vector<double>>>());
    const auto r = decompose(k, FragmentationMap::with_default_code(Alphabet::numeric(4), Alphabet::numeric(2), 2),
                             f["w"].get<std::size_t>());
    EXPECT_NEAR(r.source_loss, f["source_loss"].get<double>(), 1e-9) << key;
    EXPECT_NEAR(r.fragmented_loss, f["fragmented_loss"].get<double>(), 1e-9) << key;
    EXPECT_NEAR(r.context_deficit, f["context_deficit"].get<double>(), 1e-9) << key;
    EXPECT_NEAR(r.phase_ambiguity, f["phase_ambiguity"].get<double>(), 1e-9) << key;
  }
}

TEST(Fragmentation, DecompositionIdentityAndOracleOnRandomKernels) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t m = 1 + seed % 3;
    const std::size_t x = 2;
    const std::size_t y = m == 1 ? 2 : (seed % 2 ? (std::size_t{1} << m) : (std::size_t{1} << m) - 1);
    const std::size_t order = seed % 3 == 0 ? 2 : 1;
    const std::size_t w = seed % 4 == 0 ? 2 : 1;
    const auto k = sample_kernel(y, order, 0.6, 1000 + seed);
    const auto map = FragmentationMap::with_default_code(Alphabet::numeric(y), Alphabet::numeric(x), m);
    const auto law = stationary_law(k);
    const auto r = decompose(k, law, map, w);
    EXPECT_NEAR(r.gap, r.context_deficit + r.phase_ambiguity, 1e-9);
    EXPECT_GE(r.context_deficit, -1e-9);
    EXPECT_GE(r.phase_ambiguity, -1e-9);
    EXPECT_GE(r.fragmented_loss, r.source_loss - 1e-9);
    if (w >= order + 1) EXPECT_NEAR(r.context_deficit, 0.0, 1e-9);
    if (m == 1) {
      EXPECT_NEAR(r.gap, 0.0, 1e-9);
    }
    const auto o = oracle::fragmentation(chain(k), oracle_code(map), static_cast<int>(w));
    EXPECT_NEAR(r.source_loss, o.source_loss, 1e-9);
    EXPECT_NEAR(r.fragmented_loss, o.fragmented_loss, 1e-9);
    EXPECT_NEAR(r.context_deficit, o.deficit, 1e-9);
    EXPECT_NEAR(r.phase_ambiguity, o.ambiguity, 1e-9);
    ++checked;
  }
  EXPECT_GE(checked, 50);
}

TEST(Fragmentation, EmpiricalGapConvergesToTheory) {
  const auto k = sample_kernel(4, 1, 0.5, 21);
  const auto law = stationary_law(k);
  const auto map = two_bit_map();
  const auto theory = decompose(k, law, map, 1);
  const auto seq = sample_sequence(k, law, 500'000, 21);
  double last_error = 0.0;
  for (std::size_t n : {10'000u, 100'000u, 500'000u}) {
    const std::span<const Symbol> prefix(seq.data(), n);
    const double gap = empirical_fragmented_loss(map, prefix, 1) - empirical_source_loss(abcd(), prefix, 1);
    last_error = std::abs(gap - theory.gap);
  }
  EXPECT_LT(last_error, 0.02);
}

TEST(Fragmentation, Errors) {
  const auto k = sample_kernel(3, 1, 0.5, 0);
  EXPECT_THROW(decompose(k, two_bit_map(), 1), AlphabetError);
  EXPECT_THROW(decompose(sample_kernel(4, 1, 0.5, 0), two_bit_map(), 6, 1000), CapacityError);
  EXPECT_THROW(empirical_fragmented_loss(two_bit_map(), SymbolSeq{0}, 1), DataError);
  EXPECT_THROW(empirical_source_loss(abcd(), SymbolSeq{0}, 1), DataError);
}
