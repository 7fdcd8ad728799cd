#include "fincontext/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fincontext/entropy.hpp"
#include "fincontext/errors.hpp"
#include "fincontext/span_diagnostics.hpp"

namespace fincontext {

ContextPredictor smooth(const ContextPredictor& q, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("smoothing weight must lie in (0, 1), got " + std::to_string(eta));
  return q.mixed_with_uniform(eta);
}

double seq_extend(const ContextPredictor& q, std::span<const Symbol> history, std::span<const Symbol> u) {
  const std::size_t ws = q.context_length();
  if (history.size() < ws)
    throw PreconditionError("history of length " + std::to_string(history.size()) +
                            " is shorter than the predictor context " + std::to_string(ws));
  const auto& code = q.code();
  std::uint64_t c = code.of(history, history.size());
  double p = 1.0;
  for (Symbol y : u) {
    p *= q.prob(c, y);
    c = code.push(c, y);
  }
  return p;
}

TransferredPredictor::TransferredPredictor(ContextPredictor q, PrefixVocabulary vocab, std::size_t w)
    : q_(std::move(q)), vocab_(std::move(vocab)), w_(w), lambda_(q_.min_prob()) {
  if (w_ == 0) throw ParameterError("token window must be at least 1");
  if (q_.alphabet_size() != vocab_.alphabet().size())
    throw AlphabetError("source predictor and vocabulary alphabets differ");
  if (!(lambda_ > 0.0))
    throw PositivityError("source predictor is not strictly positive (min probability " + std::to_string(lambda_) +
                          "); smooth it first");
}

std::uint64_t TransferredPredictor::history_code(std::span<const TokenId> context, std::size_t& span) const {
  const std::size_t ws = q_.context_length();
  span = 0;
  std::size_t first = context.size();
  while (first > 0 && span < ws) {
    --first;
    span += vocab_.entry_length(context[first]);
  }
  for (std::size_t i = 0; i < first; ++i) span += vocab_.entry_length(context[i]);
  const auto& code = q_.code();
  std::uint64_t c = 0;
  for (std::size_t i = first; i < context.size(); ++i)
    for (Symbol y : vocab_.entry(context[i])) c = code.push(c, y);
  return c;
}

double TransferredPredictor::stop_probability(TokenId z, std::uint64_t code) const {
  const auto ext = vocab_.ext_set(z);
  CompensatedSum stop;
  auto it = ext.begin();
  for (Symbol a = 0; a < q_.alphabet_size(); ++a) {
    if (it != ext.end() && *it == a) {
      ++it;
      continue;
    }
    stop += q_.prob(code, a);
  }
  return stop.value();
}

bool TransferredPredictor::evaluable(std::span<const TokenId> context) const {
  if (context.size() != w_) return false;
  std::size_t span = 0;
  history_code(context, span);
  if (span < q_.context_length()) return false;
  return vocab_.ext_set(context.back()).size() < q_.alphabet_size();
}

double TransferredPredictor::prob(std::span<const TokenId> context, TokenId next) const {
  if (context.size() != w_)
    throw PreconditionError("token context has length " + std::to_string(context.size()) + ", expected " +
                            std::to_string(w_));
  const double uniform = 1.0 / static_cast<double>(vocab_.size());
  std::size_t span = 0;
  const std::uint64_t h = history_code(context, span);
  if (span < q_.context_length()) return uniform;
  const TokenId prev = context.back();
  if (vocab_.ext_set(prev).size() == q_.alphabet_size()) return uniform;

  const auto text = vocab_.entry(next);
  if (vocab_.extends(prev, text.front())) return 0.0;
  const auto& code = q_.code();
  std::uint64_t c = h;
  double p = 1.0;
  for (Symbol y : text) {
    p *= q_.prob(c, y);
    c = code.push(c, y);
  }
  return p * stop_probability(next, c) / stop_probability(prev, h);
}

std::vector<double> TransferredPredictor::distribution(std::span<const TokenId> context) const {
  if (context.size() != w_)
    throw PreconditionError("token context has length " + std::to_string(context.size()) + ", expected " +
                            std::to_string(w_));
  std::vector<double> out(vocab_.size(), 0.0);
  if (!evaluable(context)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(vocab_.size()));
    return out;
  }
  std::size_t span = 0;
  const std::uint64_t h = history_code(context, span);
  const TokenId prev = context.back();
  const double denom = stop_probability(prev, h);
  const auto& code = q_.code();

  auto visit = [&](auto&& self, TokenId z, std::uint64_t c, double prefix) -> void {
    out[z] = prefix * stop_probability(z, c) / denom;
    for (Symbol a : vocab_.ext_set(z)) self(self, *vocab_.child(z, a), code.push(c, a), prefix * q_.prob(c, a));
  };
  for (Symbol b = 0; b < q_.alphabet_size(); ++b) {
    if (vocab_.extends(prev, b)) continue;
    visit(visit, vocab_.single(b), code.push(h, b), q_.prob(h, b));
  }
  return out;
}

TypicalPredictor::TypicalPredictor(TransferredPredictor base, std::size_t w_s) : base_(std::move(base)), w_s_(w_s) {}

bool TypicalPredictor::typical(std::span<const TokenId> context) const {
  return source_span(vocabulary(), context) >= w_s_;
}

double TypicalPredictor::prob(std::span<const TokenId> context, TokenId next) const {
  if (!typical(context)) return 1.0 / static_cast<double>(vocabulary().size());
  return base_.prob(context, next);
}

TypicalPredictor make_typical(TransferredPredictor transferred, std::size_t w_s) {
  return TypicalPredictor(std::move(transferred), w_s);
}

namespace {

template <typename Predictor, typename Fallback>
TokenLoss evaluate(const Predictor& predictor, std::span<const TokenId> tokens, Fallback is_fallback) {
  const std::size_t w = predictor.window();
  if (tokens.size() <= w + 1) throw DataError("token stream too short for the predictor window");
  const auto& vocab = predictor.vocabulary();
  TokenLoss out;
  // The final token is cut by the end of the input, not by the parser, so it is not scored.
  const std::size_t end = tokens.size() - 1;
  std::vector<double> bits, lengths;
  bits.reserve(end - w);
  lengths.reserve(end - w);
  CompensatedSum total;
  for (std::size_t i = w; i < end; ++i) {
    const auto context = tokens.subspan(i - w, w);
    if (is_fallback(context)) ++out.fallback_tokens;
    const double p = predictor.prob(context, tokens[i]);
    const auto len = static_cast<double>(vocab.entry_length(tokens[i]));
    out.source_symbols += vocab.entry_length(tokens[i]);
    if (!(p > 0.0)) {
      out.infinite = true;
      continue;
    }
    const double loss = -std::log2(p);
    total += loss;
    bits.push_back(loss);
    lengths.push_back(len);
  }
  out.tokens = end - w;
  out.total_bits = total.value();
  if (out.infinite) {
    out.bits_per_source_symbol = std::numeric_limits<double>::infinity();
    out.bits_per_token = std::numeric_limits<double>::infinity();
    return out;
  }
  const auto ratio = batch_ratio(bits, lengths);
  out.bits_per_source_symbol = ratio.mean;
  out.se = ratio.se;
  out.bits_per_token = out.total_bits / static_cast<double>(out.tokens);
  return out;
}

}  // namespace

TokenLoss token_loss_per_source_symbol(const TransferredPredictor& predictor, std::span<const TokenId> tokens) {
  return evaluate(predictor, tokens, [&](std::span<const TokenId> ctx) { return !predictor.evaluable(ctx); });
}

TokenLoss token_loss_per_source_symbol(const TypicalPredictor& predictor, std::span<const TokenId> tokens) {
  return evaluate(predictor, tokens, [&](std::span<const TokenId> ctx) {
    return !predictor.typical(ctx) || !predictor.base().evaluable(ctx);
  });
}

LossComparison compare_losses(const TransferredPredictor& predictor, std::span<const Symbol> source) {
  const auto& vocab = predictor.vocabulary();
  const auto& q = predictor.source_predictor();
  const std::size_t w = predictor.window();
  const std::size_t ws = q.context_length();
  const TokenSeq tokens = greedy_parse(vocab, source);
  if (tokens.size() <= w + 1) throw DataError("source parses into too few tokens for the window");
  const std::size_t last = tokens.size() - 1;
  const std::size_t stop_at = source.size() - vocab.entry_length(tokens[last]);

  LossComparison out;
  out.n = source.size();
  out.tokens = last - w;
  out.bound_2log_1_over_lambda = 2.0 * std::log2(1.0 / predictor.lambda());

  std::size_t start = 0;
  for (std::size_t i = 0; i < w; ++i) start += vocab.entry_length(tokens[i]);
  if (start < ws) throw PreconditionError("first token window spans fewer symbols than the source context");

  const auto& code = q.code();
  CompensatedSum src;
  std::uint64_t c = code.of(source, start);
  for (std::size_t j = start; j < stop_at; ++j) {
    src += -std::log2(q.prob(c, source[j]));
    c = code.push(c, source[j]);
  }
  out.source_symbols = stop_at - start;
  out.source_loss_bits = src.value();

  CompensatedSum tok;
  // Stop probability after token i, evaluated on the running source history.
  double previous_stop = -1.0;
  std::size_t pos = start;
  for (std::size_t i = w; i < last; ++i) {
    const auto context = std::span<const TokenId>(tokens).subspan(i - w, w);
    if (!predictor.evaluable(context)) ++out.fallback_tokens;
    tok += -std::log2(predictor.prob(context, tokens[i]));

    const std::uint64_t h = code.of(source, pos);
    const double denom = predictor.stop_probability(tokens[i - 1], h);
    if (previous_stop >= 0.0) out.telescoping_error = std::max(out.telescoping_error, std::abs(previous_stop - denom));
    pos += vocab.entry_length(tokens[i]);
    const double stop = predictor.stop_probability(tokens[i], code.of(source, pos));
    out.min_stop_probability = std::min(out.min_stop_probability, stop);
    out.max_stop_probability = std::max(out.max_stop_probability, stop);
    previous_stop = stop;
  }
  out.token_loss_bits = tok.value();
  out.difference = out.token_loss_bits - out.source_loss_bits;
  out.source_per_symbol = out.source_loss_bits / static_cast<double>(out.source_symbols);
  out.token_per_symbol = out.token_loss_bits / static_cast<double>(out.source_symbols);
  return out;
}

}  // namespace fincontext
