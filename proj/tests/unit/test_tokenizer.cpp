#include <gtest/gtest.h>

#include <set>

#include "fincontext/errors.hpp"
#include "fincontext/tokenizer.hpp"
#include "helpers.hpp"

using namespace fincontext;
using namespace testing_helpers;

namespace {

std::string str(const SymbolSeq& s) {
  std::string out;
  for (auto y : s) out += static_cast<char>('0' + y);
  return out;
}

std::set<std::string> entry_set(const PrefixVocabulary& v) {
  std::set<std::string> out;
  for (TokenId t = 0; t < v.size(); ++t) out.insert(text(v, t));
  return out;
}

std::set<std::string> digits(std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.insert(std::string(1, static_cast<char>('0' + i)));
  return out;
}

std::vector<std::string> parse_strings(const PrefixVocabulary& v, const SymbolSeq& s) {
  std::vector<std::string> out;
  for (auto t : greedy_parse(v, s)) out.push_back(text(v, t));
  return out;
}

}  // namespace

TEST(Tokenizer, SmallVocabularyTrie) {
  const auto v = small_vocab();
  EXPECT_EQ(v.size(), 4u);
  EXPECT_TRUE(v.audit());
  EXPECT_EQ(entry_set(v), (std::set<std::string>{"0", "1", "01", "010"}));
  EXPECT_EQ(text(v, 0), "0");
  EXPECT_EQ(text(v, 1), "01");
  EXPECT_EQ(text(v, 2), "010");
  EXPECT_EQ(text(v, 3), "1");
  EXPECT_EQ(v.max_entry_length(), 3u);
  EXPECT_EQ(v.ext_set(*v.find(bits("0"))), (std::vector<Symbol>{1}));
  EXPECT_EQ(v.ext_set(*v.find(bits("01"))), (std::vector<Symbol>{0}));
  EXPECT_TRUE(v.ext_set(*v.find(bits("1"))).empty());
  EXPECT_TRUE(v.ext_set(*v.find(bits("010"))).empty());
  EXPECT_EQ(v.child(v.single(0), 1), v.find(bits("01")));
  EXPECT_FALSE(v.child(v.single(1), 0).has_value());
  EXPECT_FALSE(v.find(bits("011")).has_value());
}

TEST(Tokenizer, GreedyParseExample) {
  const auto v = small_vocab();
  const auto y = bits("0101110100");
  EXPECT_EQ(parse_strings(v, y), (std::vector<std::string>{"010", "1", "1", "1", "010", "0"}));
  EXPECT_EQ(expand(v, greedy_parse(v, y)), y);
}

TEST(Tokenizer, GreedyParseSmallCases) {
  const auto v = small_vocab();
  EXPECT_EQ(parse_strings(v, bits("010010")), (std::vector<std::string>{"010", "010"}));
  const PrefixVocabulary singles(Alphabet::numeric(2), {});
  const auto y = bits("0110");
  EXPECT_EQ(greedy_parse(singles, y), (TokenSeq{0, 1, 1, 0}));
  for (TokenId t = 0; t < 2; ++t) EXPECT_TRUE(singles.ext_set(t).empty());
}

TEST(Tokenizer, BudgetEqualToAlphabetKeepsSingles) {
  const auto y = bits("0101110100");
  EXPECT_EQ(train_lzw(Alphabet::numeric(2), y, 2).size(), 2u);
  EXPECT_EQ(train_bpe(Alphabet::numeric(2), y, 2).size(), 2u);
  const auto z = greedy_parse(train_bpe(Alphabet::numeric(2), y, 2), y);
  EXPECT_EQ(z.size(), y.size());
}

TEST(Tokenizer, LzwTrace) {
  const auto v = train_lzw(Alphabet::numeric(2), bits("0101110100"), 8);
  EXPECT_EQ(entry_set(v), (std::set<std::string>{"0", "1", "01", "10", "011", "11", "101", "100"}));
  EXPECT_TRUE(v.audit());
}

TEST(Tokenizer, BpeFirstMerge) {
  const auto t = train_bpe_detailed(Alphabet::numeric(2), bits("0101010101"), 3);
  ASSERT_EQ(t.merges.size(), 1u);
  EXPECT_EQ(t.merges[0].first, bits("0"));
  EXPECT_EQ(t.merges[0].second, bits("1"));
  EXPECT_EQ(entry_set(t.vocabulary), (std::set<std::string>{"0", "1", "01"}));
  const auto u = train_bpe_detailed(Alphabet::numeric(2), bits("0101010101"), 5);
  EXPECT_EQ(u.vocabulary.size(), 5u);
  EXPECT_TRUE(u.vocabulary.audit());
}

TEST(Tokenizer, TrainersMatchBruteForce) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::size_t a = 2 + seed % 3;
    const auto seq = sample_sequence(sample_kernel(a, 1, 0.5, seed), 400 + 37 * seed, seed);
    const std::string s = str(seq);
    const std::size_t size = a + 3 + seed % 12;
    const auto lzw = train_lzw(Alphabet::numeric(a), seq, size);
    EXPECT_EQ(entry_set(lzw), oracle::lzw(s, digits(a), size)) << seed;
    const auto bpe = train_bpe(Alphabet::numeric(a), seq, size);
    EXPECT_EQ(entry_set(bpe), oracle::bpe(s, digits(a), size)) << seed;
    EXPECT_LE(bpe.size(), size);
    EXPECT_LE(lzw.size(), size);
  }
}

TEST(Tokenizer, GreedyParseProperties) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t a = 2 + seed % 2;
    const auto train = sample_sequence(sample_kernel(a, 2, 0.5, seed), 2000, seed);
    const auto v = seed % 2 ? train_bpe(Alphabet::numeric(a), train, 24) : train_lzw(Alphabet::numeric(a), train, 24);
    ASSERT_TRUE(v.audit());
    const auto y = sample_sequence(sample_kernel(a, 2, 0.5, seed), 500, seed + 1);
    const auto z = greedy_parse(v, y);
    // Round trip.
    EXPECT_EQ(expand(v, z), y);
    // Re-parsing the expansion is idempotent.
    EXPECT_EQ(greedy_parse(v, expand(v, z)), z);
    // Agrees with a brute-force longest-match parser.
    std::set<std::string> vs = entry_set(v);
    std::vector<std::string> expected = oracle::greedy_parse(vs, str(y));
    EXPECT_EQ(parse_strings(v, y), expected);
    // Maximality: a token is never followed by a symbol that would extend it.
    std::size_t pos = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      pos += v.entry_length(z[i]);
      if (i + 1 < z.size()) EXPECT_FALSE(v.extends(z[i], y[pos]));
    }
  }
}

TEST(Tokenizer, PrefixClosureAndSingles) {
  const PrefixVocabulary v(Alphabet::numeric(3), {SymbolSeq{2, 2, 1, 0}});
  EXPECT_EQ(entry_set(v), (std::set<std::string>{"0", "1", "2", "22", "221", "2210"}));
  for (Symbol y = 0; y < 3; ++y) EXPECT_EQ(v.entry(v.single(y)).size(), 1u);
  for (TokenId t = 1; t < v.size(); ++t) EXPECT_LT(v.entries()[t - 1], v.entries()[t]);
}

TEST(Tokenizer, Errors) {
  EXPECT_THROW(PrefixVocabulary(Alphabet::numeric(2), {SymbolSeq{}}), FormatError);
  EXPECT_THROW(PrefixVocabulary(Alphabet::numeric(2), {SymbolSeq{0, 2}}), AlphabetError);
  EXPECT_THROW(PrefixVocabulary(Alphabet::numeric(2), {bits("0110")}, 4), CapacityError);
  const auto v = small_vocab();
  EXPECT_THROW(expand(v, TokenSeq{0, 9}), FormatError);
  EXPECT_THROW(greedy_parse(v, SymbolSeq{0, 5}), AlphabetError);
  EXPECT_THROW(train_bpe(Alphabet::numeric(3), bits("0101"), 2), ParameterError);
  EXPECT_THROW(train_bpe(Alphabet::numeric(2), bits("0"), 4), DataError);
  EXPECT_THROW(train_lzw(Alphabet::numeric(3), bits("0101"), 2), ParameterError);
}
