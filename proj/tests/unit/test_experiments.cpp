#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fincontext/errors.hpp"
#include "fincontext/experiments.hpp"
#include "helpers.hpp"

using namespace fincontext;
using namespace testing_helpers;

TEST(Experiments, FragInstanceMatchesFixture) {
  const auto& f = golden()["cli_frag_instance"];
  FragSettings settings;
  settings.n = 20000;
  EXPECT_EQ(frag_kernel_seed(f["seed"], f["k"], f["M"], f["instance"]), f["kernel_seed"].get<std::uint64_t>());
  const auto rows = frag_instance(settings, f["k"], f["M"], f["instance"], f["seed"]);
  ASSERT_EQ(rows.size(), f["rows"].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& expect = f["rows"][i];
    EXPECT_EQ(rows[i].w, expect["w"].get<std::size_t>());
    EXPECT_NEAR(rows[i].theory_penalty, expect["theory_penalty"].get<double>(), 1e-9);
    EXPECT_NEAR(rows[i].context_deficit, expect["context_deficit"].get<double>(), 1e-9);
    EXPECT_NEAR(rows[i].phase_ambiguity, expect["phase_ambiguity"].get<double>(), 1e-9);
  }
}

TEST(Experiments, GenerateSourceIsDeterministic) {
  const SourceSpec spec{3, 2, 0.5, 1000};
  const auto a = generate_source(spec, 4);
  const auto b = generate_source(spec, 4);
  EXPECT_EQ(a.sequence, b.sequence);
  EXPECT_EQ(a.kernel.probs(), b.kernel.probs());
  EXPECT_NE(generate_source(spec, 5).sequence, a.sequence);
  EXPECT_EQ(a.sequence.size(), 1000u);
}

TEST(Experiments, SourceLossAt) {
  const auto k = sample_kernel(2, 2, 0.5, 0);
  const auto law = stationary_law(k);
  EXPECT_NEAR(source_loss_at(k, law, 1), conditional_entropy(k, law, 1), 1e-12);
  EXPECT_NEAR(source_loss_at(k, law, 50), entropy_rate(k, law), 1e-12);
}

TEST(Experiments, TokenizerMethods) {
  EXPECT_EQ(parse_tokenizer_method("bpe"), TokenizerMethod::Bpe);
  EXPECT_EQ(parse_tokenizer_method("lzw"), TokenizerMethod::Lzw);
  EXPECT_EQ(to_string(TokenizerMethod::Lzw), "lzw");
  EXPECT_THROW(parse_tokenizer_method("wordpiece"), ParameterError);
  const auto seq = sample_sequence(two_state(), 2000, 0);
  EXPECT_EQ(train_tokenizer(TokenizerMethod::Bpe, Alphabet::numeric(2), seq, 12).entries(),
            train_bpe(Alphabet::numeric(2), seq, 12).entries());
}

TEST(Experiments, TransferCheckOnSmallSource) {
  const auto k = sample_kernel(2, 2, 0.5, 3);
  const auto law = stationary_law(k);
  const auto train = sample_sequence(k, law, 20000, 3);
  const auto eval = sample_sequence(k, law, 20000, 4);
  const auto v = train_bpe(Alphabet::numeric(2), train, 16);
  const auto row = transfer_check(k, law, v, eval, 4, 4, 1e-3);
  EXPECT_EQ(row.q_context, 2u);
  EXPECT_LT(row.comparison.telescoping_error, 1e-12);
  EXPECT_LE(row.comparison.difference, row.comparison.bound_2log_1_over_lambda);
  EXPECT_NEAR(row.typical_bound, row.source_loss_ws + row.epsilon * row.rate * row.log2_alphabet, 1e-12);
  EXPECT_TRUE(row.typical_holds);
}

TEST(Experiments, LoadText) {
  const auto dir = std::filesystem::temp_directory_path() / "fincontext_text_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "b.md") << "world";
  std::ofstream(dir / "a.txt") << "hello ";
  std::ofstream(dir / "skip.bin") << "zzz";
  EXPECT_EQ(load_text(dir), "hello \nworld\n");
  EXPECT_EQ(load_text(dir / "b.md"), "world");
  EXPECT_EQ(load_text(dir, 3).substr(0, 3), "hel");
}
