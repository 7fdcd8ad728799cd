#include "fincontext/span_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fincontext/entropy.hpp"
#include "fincontext/errors.hpp"

namespace fincontext {

std::size_t source_span(const PrefixVocabulary& vocab, std::span<const TokenId> window) {
  std::size_t span = 0;
  for (TokenId t : window) span += vocab.entry(t).size();
  return span;
}

double SpanHistogram::probability(std::size_t span) const {
  if (total == 0) return 0.0;
  auto it = counts.find(span);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

double SpanHistogram::epsilon(std::size_t w_s) const {
  if (total == 0) return 0.0;
  std::uint64_t below = 0;
  for (const auto& [span, count] : counts) {
    if (span >= w_s) break;
    below += count;
  }
  return static_cast<double>(below) / static_cast<double>(total);
}

double SpanHistogram::mean() const {
  if (total == 0) return 0.0;
  CompensatedSum acc;
  for (const auto& [span, count] : counts) acc += static_cast<double>(span) * static_cast<double>(count);
  return acc.value() / static_cast<double>(total);
}

std::size_t SpanHistogram::min_span() const { return counts.empty() ? 0 : counts.begin()->first; }
std::size_t SpanHistogram::max_span() const { return counts.empty() ? 0 : counts.rbegin()->first; }

std::vector<std::size_t> window_spans(const PrefixVocabulary& vocab, std::span<const TokenId> tokens,
                                      std::size_t w) {
  if (tokens.size() <= w)
    throw DataError("token stream of length " + std::to_string(tokens.size()) + " has no window of length " +
                    std::to_string(w));
  std::vector<std::size_t> lengths(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) lengths[i] = vocab.entry(tokens[i]).size();
  std::vector<std::size_t> spans;
  spans.reserve(tokens.size() - w);
  std::size_t running = 0;
  for (std::size_t i = 0; i < w; ++i) running += lengths[i];
  for (std::size_t i = w; i < tokens.size(); ++i) {
    spans.push_back(running);
    running += lengths[i];
    running -= lengths[i - w];
  }
  return spans;
}

SpanHistogram span_distribution(const PrefixVocabulary& vocab, std::span<const TokenId> tokens, std::size_t w) {
  SpanHistogram hist;
  hist.w = w;
  for (std::size_t s : window_spans(vocab, tokens, w)) ++hist.counts[s];
  hist.total = tokens.size() - w;
  return hist;
}

std::size_t worst_case_span(const PrefixVocabulary& vocab, std::size_t w, SpanMode mode,
                            std::span<const TokenId> tokens) {
  if (mode == SpanMode::Exhaustive) {
    std::size_t shortest = std::numeric_limits<std::size_t>::max();
    for (const auto& e : vocab.entries()) shortest = std::min(shortest, e.size());
    return w * shortest;
  }
  if (tokens.size() <= w) throw PreconditionError("empirical worst-case span needs a parsed stream longer than w");
  return span_distribution(vocab, tokens, w).min_span();
}

double typical_epsilon(const PrefixVocabulary& vocab, std::span<const TokenId> tokens, std::size_t w,
                       std::size_t w_s) {
  return span_distribution(vocab, tokens, w).epsilon(w_s);
}

CompressionStats compression_stats(const PrefixVocabulary& vocab, std::span<const TokenId> tokens,
                                   std::optional<double> log2_alphabet) {
  CompressionStats stats;
  stats.vocab_size = vocab.size();
  stats.tokens = tokens.size();
  stats.symbols = source_span(vocab, tokens);
  stats.log2_alphabet = log2_alphabet.value_or(std::log2(static_cast<double>(vocab.alphabet().size())));
  if (stats.tokens == 0) return stats;
  stats.alpha = static_cast<double>(stats.symbols) / static_cast<double>(stats.tokens);
  // A unary alphabet carries no information per symbol; the rate is then left at 0.
  if (stats.log2_alphabet > 0.0)
    stats.rate = std::log2(static_cast<double>(stats.vocab_size)) / (stats.alpha * stats.log2_alphabet);
  return stats;
}

std::vector<SlackPoint> slack_curve(const SpanHistogram& histogram, const CompressionStats& stats,
                                    std::size_t first, std::size_t last, std::size_t step) {
  if (step == 0) throw ParameterError("slack curve step must be positive");
  std::vector<SlackPoint> curve;
  for (std::size_t w_s = first; w_s <= last; w_s += step) {
    SlackPoint p;
    p.w = histogram.w;
    p.w_s = w_s;
    p.epsilon = histogram.epsilon(w_s);
    p.rate = stats.rate;
    p.slack_bits = p.epsilon * stats.rate * stats.log2_alphabet;
    curve.push_back(p);
  }
  return curve;
}

std::vector<SlackPoint> slack_curve(const PrefixVocabulary& vocab, std::span<const TokenId> tokens, std::size_t w,
                                    std::size_t first, std::size_t last, std::size_t step,
                                    std::optional<double> log2_alphabet) {
  return slack_curve(span_distribution(vocab, tokens, w), compression_stats(vocab, tokens, log2_alphabet), first,
                     last, step);
}

namespace {

// One max-product step: state over current contexts -> state after emitting y.
void pmax_step(const TransitionKernel& kernel, const std::vector<double>& from, Symbol y, std::vector<double>& to) {
  std::fill(to.begin(), to.end(), 0.0);
  for (std::uint64_t c = 0; c < kernel.context_count(); ++c) {
    const double v = from[c] * kernel.prob(c, y);
    auto& slot = to[kernel.next_context(c, y)];
    slot = std::max(slot, v);
  }
}

}  // namespace

double p_max(const TransitionKernel& kernel, std::span<const Symbol> t) {
  std::vector<double> state(kernel.context_count(), 1.0), next(kernel.context_count());
  for (Symbol y : t) {
    if (y >= kernel.alphabet_size()) throw AlphabetError("string symbol outside the kernel alphabet");
    pmax_step(kernel, state, y, next);
    state.swap(next);
  }
  return *std::max_element(state.begin(), state.end());
}

std::vector<double> p_max_all(const TransitionKernel& kernel, const PrefixVocabulary& vocab) {
  if (vocab.alphabet().size() != kernel.alphabet_size())
    throw AlphabetError("vocabulary and kernel alphabets differ");
  std::vector<double> out(vocab.size(), 0.0);
  const std::size_t contexts = kernel.context_count();
  std::vector<std::vector<double>> states(vocab.max_entry_length() + 1, std::vector<double>(contexts));
  std::fill(states[0].begin(), states[0].end(), 1.0);

  auto visit = [&](auto&& self, TokenId token, std::size_t depth) -> void {
    const auto& state = states[depth];
    out[token] = *std::max_element(state.begin(), state.end());
    for (Symbol a : vocab.ext_set(token)) {
      pmax_step(kernel, states[depth], a, states[depth + 1]);
      self(self, *vocab.child(token, a), depth + 1);
    }
  };
  for (Symbol y = 0; y < vocab.alphabet().size(); ++y) {
    pmax_step(kernel, states[0], y, states[1]);
    visit(visit, vocab.single(y), 1);
  }
  return out;
}

double heavy_hit_length(double beta, double d, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw AssumptionError("delta must lie in (0, 1)");
  if (!(d >= 1.0)) throw ParameterError("vocabulary budget must be at least 1");
  return beta * std::log2(d) / std::log2(1.0 / delta);
}

HeavyHitReport heavy_hitting_report(const TransitionKernel& kernel, const PrefixVocabulary& vocab,
                                    std::span<const TokenId> tokens, double beta, double d, std::size_t w) {
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
  const double delta = min_transition_prob(kernel);
  if (!(delta > 0.0)) throw AssumptionError("source is not delta-positive: some transition has probability 0");
  if (tokens.size() <= w) throw DataError("token stream too short for the window length");

  HeavyHitReport r;
  r.beta = beta;
  r.d = d;
  r.delta = delta;
  r.ell_d = heavy_hit_length(beta, d, delta);
  r.threshold = std::pow(d, -beta);
  r.tokens = tokens.size();
  r.w = w;

  const auto pm = p_max_all(kernel, vocab);
  std::vector<double> miss(tokens.size()), shorter(tokens.size()), lengths(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const TokenId t = tokens[i];
    const auto len = static_cast<double>(vocab.entry_length(t));
    const bool is_miss = pm[t] > r.threshold;
    const bool is_short = len < r.ell_d;
    miss[i] = is_miss ? 1.0 : 0.0;
    shorter[i] = is_short ? 1.0 : 0.0;
    lengths[i] = len;
    if (is_short && !is_miss) ++r.inclusion_violations;
  }
  r.miss = batch_mean(miss);
  r.short_tokens = batch_mean(shorter);
  r.typically_heavy_hitting = r.miss.mean <= 0.25;

  const double eta = r.miss.mean;
  r.span_threshold = static_cast<std::size_t>(std::floor(0.75 * static_cast<double>(w) * r.ell_d));
  const auto spans = window_spans(vocab, tokens, w);
  std::vector<double> failure(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) failure[i] = spans[i] < r.span_threshold ? 1.0 : 0.0;
  r.span_failure = batch_mean(failure);
  r.span_bound = 4.0 * eta;
  r.span_bound_holds = r.span_failure.mean <= r.span_bound + 3.0 * (r.span_failure.se + 4.0 * r.miss.se);

  r.alpha = batch_mean(lengths);
  r.alpha_bound = (1.0 - eta) * r.ell_d + eta;
  const double bound_se = std::abs(1.0 - r.ell_d) * r.miss.se;
  r.alpha_bound_holds = r.alpha.mean >= r.alpha_bound - 3.0 * std::hypot(r.alpha.se, bound_se);

  r.loss_slack_bits = 4.0 * eta * std::log2(d) / r.alpha_bound;
  return r;
}

}  // namespace fincontext
