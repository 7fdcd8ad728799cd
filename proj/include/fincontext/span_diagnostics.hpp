#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fincontext/markov_source.hpp"
#include "fincontext/stats.hpp"
#include "fincontext/tokenizer.hpp"

namespace fincontext {

/// Total source length of a token window.
std::size_t source_span(const PrefixVocabulary& vocab, std::span<const TokenId> window);

/// Empirical distribution of S over the w-token windows of a stream.
///
/// Window i covers tokens [i - w, i) for every i in [w, m), i.e. the context
/// of each predicted token after the first w.
struct SpanHistogram {
  std::size_t w = 0;
  std::map<std::size_t, std::uint64_t> counts;
  std::uint64_t total = 0;

  double probability(std::size_t span) const;
  /// P[S < w_s].
  double epsilon(std::size_t w_s) const;
  double mean() const;
  std::size_t min_span() const;
  std::size_t max_span() const;
};

/// Throws DataError when the stream has no more than w tokens.
SpanHistogram span_distribution(const PrefixVocabulary& vocab, std::span<const TokenId> tokens, std::size_t w);

/// Per-window spans in stream order (window i - w for predicted token i).
std::vector<std::size_t> window_spans(const PrefixVocabulary& vocab, std::span<const TokenId> tokens, std::size_t w);

enum class SpanMode { Empirical, Exhaustive };

/// Empirical: smallest span over the windows of `tokens` (which must be a
/// greedy parse longer than w). Exhaustive: smallest span over every w-tuple
/// of entries, ignoring whether greedy parsing could produce it.
std::size_t worst_case_span(const PrefixVocabulary& vocab, std::size_t w, SpanMode mode,
                            std::span<const TokenId> tokens = {});

/// Fraction of w-token windows spanning fewer than w_s source symbols.
double typical_epsilon(const PrefixVocabulary& vocab, std::span<const TokenId> tokens, std::size_t w,
                       std::size_t w_s);

struct CompressionStats {
  double alpha = 0.0;  ///< mean source length per emitted token
  double rate = 0.0;   ///< log2|Z| / (alpha log2|Y|)
  std::size_t vocab_size = 0;
  std::size_t tokens = 0;
  std::size_t symbols = 0;
  double log2_alphabet = 0.0;
};

/// `log2_alphabet` overrides log2|Y| (e.g. for a text alphabet of assumed size).
CompressionStats compression_stats(const PrefixVocabulary& vocab, std::span<const TokenId> tokens,
                                   std::optional<double> log2_alphabet = std::nullopt);

struct SlackPoint {
  std::size_t w = 0;
  std::size_t w_s = 0;
  double epsilon = 0.0;
  double rate = 0.0;
  double slack_bits = 0.0;  ///< epsilon * rate * log2|Y|
};

/// Slack at w_s = first, first + step, ... up to last (inclusive).
std::vector<SlackPoint> slack_curve(const SpanHistogram& histogram, const CompressionStats& stats,
                                    std::size_t first, std::size_t last, std::size_t step = 1);
std::vector<SlackPoint> slack_curve(const PrefixVocabulary& vocab, std::span<const TokenId> tokens, std::size_t w,
                                    std::size_t first, std::size_t last, std::size_t step = 1,
                                    std::optional<double> log2_alphabet = std::nullopt);

/// max over initial contexts c of P(t | c), by a max-product pass over the
/// length-k context states.
double p_max(const TransitionKernel& kernel, std::span<const Symbol> t);

/// p_max of every vocabulary entry, indexed by token id. Shares the dynamic
/// program along the prefix tree.
std::vector<double> p_max_all(const TransitionKernel& kernel, const PrefixVocabulary& vocab);

/// ell_d = beta log2 d / log2(1/delta).
double heavy_hit_length(double beta, double d, double delta);

struct HeavyHitReport {
  double beta = 0.0;
  double d = 0.0;
  double delta = 0.0;
  double ell_d = 0.0;
  double threshold = 0.0;  ///< d^-beta
  std::size_t tokens = 0;

  MeanEstimate miss;   ///< P[p_max(token) > d^-beta], the empirical eta
  MeanEstimate short_tokens;  ///< P[|token| < ell_d]
  /// Tokens shorter than ell_d whose p_max is still at most d^-beta. Always
  /// zero when the inequality p_max(t) >= delta^|t| holds.
  std::size_t inclusion_violations = 0;
  bool typically_heavy_hitting = false;  ///< miss.mean <= 1/4

  std::size_t w = 0;
  std::size_t span_threshold = 0;  ///< floor(3/4 w ell_d)
  MeanEstimate span_failure;  ///< P[S < span_threshold]
  double span_bound = 0.0;    ///< 4 eta
  bool span_bound_holds = false;  ///< failure <= 4 eta + 3 sigma

  MeanEstimate alpha;
  double alpha_bound = 0.0;  ///< (1 - eta) ell_d + eta
  bool alpha_bound_holds = false;  ///< alpha >= bound - 3 sigma

  /// 4 eta log2 d / ((1 - eta) ell_d + eta): the excess-loss term of the end-to-end bound.
  double loss_slack_bits = 0.0;
};

/// Throws AssumptionError when the kernel has a zero transition probability.
HeavyHitReport heavy_hitting_report(const TransitionKernel& kernel, const PrefixVocabulary& vocab,
                                    std::span<const TokenId> tokens, double beta, double d, std::size_t w);

}  // namespace fincontext
