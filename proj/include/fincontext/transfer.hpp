#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fincontext/ngram.hpp"
#include "fincontext/stats.hpp"
#include "fincontext/tokenizer.hpp"

namespace fincontext {

/// q_eta = (1 - eta) q + eta / |Y|. Throws ParameterError unless 0 < eta < 1.
ContextPredictor smooth(const ContextPredictor& q, double eta);

/// prod_j q(u_j | last w_s symbols of history u_1..u_{j-1}), with w_s the
/// context length of q. Throws PreconditionError if the history is shorter than w_s.
double seq_extend(const ContextPredictor& q, std::span<const Symbol> history, std::span<const Symbol> u);

/// Token-level predictor induced by a strictly positive source predictor q
/// under greedy parsing with a fixed vocabulary.
///
/// For a w-token context with expansion H and last token p, the next token z
/// gets q^seq(z | H) times the probability that q stops after z, divided by
/// the probability that q stops after p. Tokens whose first symbol would have
/// extended p get 0. Contexts whose expansion is shorter than the context
/// length of q, or whose last token extends by every symbol, get the uniform
/// law over the vocabulary.
class TransferredPredictor {
 public:
  /// Throws PositivityError unless q.min_prob() > 0.
  TransferredPredictor(ContextPredictor q, PrefixVocabulary vocab, std::size_t w);

  const ContextPredictor& source_predictor() const { return q_; }
  const PrefixVocabulary& vocabulary() const { return vocab_; }
  std::size_t window() const { return w_; }
  std::size_t source_context() const { return q_.context_length(); }
  /// Positivity floor of q.
  double lambda() const { return lambda_; }

  /// True when the construction applies (no uniform fallback) for this context.
  bool evaluable(std::span<const TokenId> context) const;

  /// Requires context.size() == window().
  double prob(std::span<const TokenId> context, TokenId next) const;
  /// Next-token law over all token ids.
  std::vector<double> distribution(std::span<const TokenId> context) const;

  /// 1 - sum_{a in Ext(z)} q(a | suffix of history). `code` is the q-context
  /// code of the history.
  double stop_probability(TokenId z, std::uint64_t code) const;

 private:
  std::uint64_t history_code(std::span<const TokenId> context, std::size_t& span) const;

  ContextPredictor q_;
  PrefixVocabulary vocab_;
  std::size_t w_;
  double lambda_;
};

/// Uses the transferred predictor on windows spanning at least w_s source
/// symbols and the uniform law over the vocabulary otherwise.
class TypicalPredictor {
 public:
  TypicalPredictor(TransferredPredictor base, std::size_t w_s);

  const TransferredPredictor& base() const { return base_; }
  const PrefixVocabulary& vocabulary() const { return base_.vocabulary(); }
  std::size_t window() const { return base_.window(); }
  std::size_t span_threshold() const { return w_s_; }

  bool typical(std::span<const TokenId> context) const;
  double prob(std::span<const TokenId> context, TokenId next) const;

 private:
  TransferredPredictor base_;
  std::size_t w_s_;
};

TypicalPredictor make_typical(TransferredPredictor transferred, std::size_t w_s);

struct TokenLoss {
  double bits_per_source_symbol = 0.0;
  double bits_per_token = 0.0;
  double total_bits = 0.0;
  double se = 0.0;  ///< batch-means standard error of bits_per_source_symbol
  std::size_t tokens = 0;
  std::size_t source_symbols = 0;
  std::size_t fallback_tokens = 0;  ///< tokens predicted by the uniform fallback
  bool infinite = false;
};

/// Token log-loss over tokens w..m-2 divided by their total source length. The
/// final token ends where the input ends, so its stop event is never observed
/// and it is left out.
TokenLoss token_loss_per_source_symbol(const TransferredPredictor& predictor, std::span<const TokenId> tokens);
TokenLoss token_loss_per_source_symbol(const TypicalPredictor& predictor, std::span<const TokenId> tokens);

/// Cumulative-loss comparison between q on a source sequence and the
/// transferred predictor on its greedy parse. Both sums run over the same
/// source symbols (those of tokens w..m-2).
struct LossComparison {
  std::size_t n = 0;
  std::size_t tokens = 0;
  std::size_t source_symbols = 0;
  double source_loss_bits = 0.0;
  double token_loss_bits = 0.0;
  double difference = 0.0;  ///< token_loss_bits - source_loss_bits
  double bound_2log_1_over_lambda = 0.0;
  double source_per_symbol = 0.0;
  double token_per_symbol = 0.0;
  /// Largest |stop probability after token i - denominator for token i + 1|
  /// along the parse; zero up to rounding when the construction telescopes.
  double telescoping_error = 0.0;
  double min_stop_probability = 1.0;
  double max_stop_probability = 0.0;
  std::size_t fallback_tokens = 0;
};

LossComparison compare_losses(const TransferredPredictor& predictor, std::span<const Symbol> source);

}  // namespace fincontext
