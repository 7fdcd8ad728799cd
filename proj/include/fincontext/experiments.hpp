#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fincontext/markov_source.hpp"
#include "fincontext/span_diagnostics.hpp"
#include "fincontext/tokenizer.hpp"
#include "fincontext/transfer.hpp"

namespace fincontext {

struct SourceSpec {
  std::size_t alphabet_size = 2;
  std::size_t order = 1;
  double dirichlet_alpha = 0.5;
  std::size_t n = 0;
};

struct GeneratedSource {
  TransitionKernel kernel;
  StationaryLaw law;
  SymbolSeq sequence;
};

/// Kernel from sample_kernel(spec, seed), then n symbols from sample_sequence(.., seed).
GeneratedSource generate_source(const SourceSpec& spec, std::uint64_t seed);

/// L_Y(w). For w >= k this is the entropy rate and needs no enumeration.
double source_loss_at(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t w);

enum class TokenizerMethod { Bpe, Lzw };
TokenizerMethod parse_tokenizer_method(const std::string& name);
std::string to_string(TokenizerMethod method);

/// BPE target size or LZW budget `size`, trained on `corpus`.
PrefixVocabulary train_tokenizer(TokenizerMethod method, const Alphabet& alphabet, std::span<const Symbol> corpus,
                                 std::size_t size);

struct FragSettings {
  std::size_t fragment_alphabet_size = 2;
  double dirichlet_alpha = 0.5;
  std::size_t n = 500'000;
  double laplace = 0.5;
  /// Source context lengths evaluated: k + offset for each offset.
  std::vector<std::size_t> window_offsets{0, 1};
};

struct FragRow {
  std::size_t k = 0;
  std::size_t M = 0;
  std::size_t instance = 0;
  std::size_t w = 0;
  std::uint64_t kernel_seed = 0;
  double source_loss = 0.0;
  double fragmented_loss = 0.0;
  double context_deficit = 0.0;
  double phase_ambiguity = 0.0;
  double theory_penalty = 0.0;
  double empirical_source_loss = 0.0;
  double empirical_fragmented_loss = 0.0;
  double empirical_penalty = 0.0;
};

std::uint64_t frag_kernel_seed(std::uint64_t seed, std::size_t k, std::size_t M, std::size_t instance);

/// One sampled kernel over |X|^M source symbols with default binary-digit code,
/// evaluated exactly and empirically at every configured window.
std::vector<FragRow> frag_instance(const FragSettings& settings, std::size_t k, std::size_t M, std::size_t instance,
                                   std::uint64_t seed);

struct TransferRow {
  std::size_t vocab_size = 0;
  std::size_t w = 0;
  std::size_t w_s = 0;
  std::size_t q_context = 0;
  double eta = 0.0;
  double lambda = 0.0;
  LossComparison comparison;
  double entropy_rate = 0.0;
  double source_loss_ws = 0.0;  ///< L_Y(w_s)
  double epsilon = 0.0;
  double rate = 0.0;
  double log2_alphabet = 0.0;
  TokenLoss transferred;
  TokenLoss typical;
  double typical_bound = 0.0;  ///< L_Y(w_s) + epsilon R log2|Y|
  bool typical_holds = false;  ///< typical loss <= bound + 3 sigma
};

/// Transfers the optimal predictor of context min(w_s, k), smoothed by eta,
/// to `vocab` and evaluates it on `eval`.
TransferRow transfer_check(const TransitionKernel& kernel, const StationaryLaw& law, const PrefixVocabulary& vocab,
                           std::span<const Symbol> eval, std::size_t w, std::size_t w_s, double eta);

/// End-to-end heavy-hitting check at budget d: heavy-hitting diagnostics
/// plus the typical-predictor loss against L_Y(w_d) + 4 eta log2 d / ((1 - eta) ell_d + eta).
struct HeavyHitRow {
  HeavyHitReport report;
  std::size_t w_d = 0;
  double source_loss_wd = 0.0;
  TokenLoss typical;
  double loss_bound = 0.0;
  bool loss_bound_holds = false;
};

HeavyHitRow heavy_hit_check(const TransitionKernel& kernel, const StationaryLaw& law, const PrefixVocabulary& vocab,
                            std::span<const Symbol> eval, double beta, double d, std::size_t w, double eta = 1e-6);

/// Reads a UTF-8 file, or the sorted *.md / *.txt files under a directory,
/// stopping once `max_bytes` have been collected (0 means no cap).
std::string load_text(const std::filesystem::path& path, std::size_t max_bytes = 0);

}  // namespace fincontext
