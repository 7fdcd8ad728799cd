#include "fincontext/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fincontext/entropy.hpp"
#include "fincontext/errors.hpp"

namespace fincontext {

namespace {
// Context codes are multiplied by |Y| before the modulus is applied.
constexpr std::uint64_t kCodeLimit = std::numeric_limits<std::uint64_t>::max() >> 17;
}  // namespace

ContextCode::ContextCode(std::size_t alphabet_size, std::size_t w)
    : base_(alphabet_size), width_(w), modulus_(checked_power(alphabet_size, w, kCodeLimit)) {}

std::uint64_t ContextCode::of(std::span<const Symbol> seq, std::size_t end) const {
  std::uint64_t code = 0;
  for (std::size_t i = end - width_; i < end; ++i) code = code * base_ + seq[i];
  return code;
}

ContextPredictor::ContextPredictor(Kind kind, Alphabet alphabet, std::size_t w)
    : kind_(kind), alphabet_(std::move(alphabet)), w_(w), code_(alphabet_.size(), w) {}

ContextPredictor ContextPredictor::from_counts(Alphabet alphabet, std::size_t w, double laplace_alpha,
                                               CountTable counts) {
  if (!(laplace_alpha >= 0.0)) throw ParameterError("Laplace alpha must be non-negative");
  ContextPredictor q(Kind::Counts, std::move(alphabet), w);
  for (const auto& [context, row] : counts) {
    if (row.size() != q.alphabet_size()) throw FormatError("count row has the wrong width");
    if (context >= q.code_.modulus()) throw FormatError("count context code out of range");
  }
  q.alpha_ = laplace_alpha;
  q.counts_ = std::move(counts);
  return q;
}

ContextPredictor ContextPredictor::from_table(Alphabet alphabet, std::size_t w, ProbTable table) {
  ContextPredictor q(Kind::Dense, std::move(alphabet), w);
  if (static_cast<std::uint64_t>(table.rows()) != q.code_.modulus() ||
      static_cast<std::size_t>(table.cols()) != q.alphabet_size())
    throw FormatError("dense predictor table has the wrong shape");
  for (Eigen::Index c = 0; c < table.rows(); ++c) {
    if ((table.row(c).array() < 0.0).any() || std::abs(table.row(c).sum() - 1.0) > 1e-12)
      throw FormatError("dense predictor row " + std::to_string(c) + " is not a distribution");
  }
  q.table_ = std::move(table);
  return q;
}

double ContextPredictor::base_prob(std::uint64_t context, Symbol y) const {
  const auto size = static_cast<double>(alphabet_size());
  if (kind_ == Kind::Dense) return table_(static_cast<Eigen::Index>(context), y);
  auto it = counts_.find(context);
  if (it == counts_.end()) return 1.0 / size;
  std::uint64_t total = 0;
  for (auto n : it->second) total += n;
  const double denominator = static_cast<double>(total) + alpha_ * size;
  if (denominator <= 0.0) return 1.0 / size;
  return (static_cast<double>(it->second[y]) + alpha_) / denominator;
}

double ContextPredictor::prob(std::uint64_t context, Symbol y) const {
  const double p = base_prob(context, y);
  if (eta_ == 0.0) return p;
  return (1.0 - eta_) * p + eta_ / static_cast<double>(alphabet_size());
}

Eigen::VectorXd ContextPredictor::row(std::uint64_t context) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(alphabet_size()));
  for (Symbol y = 0; y < alphabet_size(); ++y) out(y) = prob(context, y);
  return out;
}

double ContextPredictor::min_prob() const {
  double floor;
  const auto size = static_cast<double>(alphabet_size());
  if (kind_ == Kind::Dense) {
    floor = table_.minCoeff();
  } else {
    floor = counts_.size() < code_.modulus() ? 1.0 / size : 1.0;
    for (const auto& [context, row] : counts_) {
      for (Symbol y = 0; y < alphabet_size(); ++y) floor = std::min(floor, base_prob(context, y));
    }
  }
  return (1.0 - eta_) * floor + eta_ / size;
}

ContextPredictor ContextPredictor::mixed_with_uniform(double eta) const {
  ContextPredictor copy = *this;
  // Mixing twice: (1-b)((1-a) q + a u) + b u = (1-a)(1-b) q + (1 - (1-a)(1-b)) u.
  copy.eta_ = 1.0 - (1.0 - eta_) * (1.0 - eta);
  return copy;
}

ContextPredictor fit(const Alphabet& alphabet, std::span<const Symbol> sequence, std::size_t w,
                     double laplace_alpha) {
  const ContextCode code(alphabet.size(), w);
  CountTable counts;
  if (sequence.size() > w) {
    std::uint64_t context = code.of(sequence, w);
    for (std::size_t i = w; i < sequence.size(); ++i) {
      const Symbol y = sequence[i];
      if (y >= alphabet.size()) throw AlphabetError("sequence symbol outside alphabet");
      auto& row = counts[context];
      if (row.empty()) row.assign(alphabet.size(), 0);
      ++row[y];
      context = code.push(context, y);
    }
  }
  return ContextPredictor::from_counts(alphabet, w, laplace_alpha, std::move(counts));
}

LogLoss log_loss(const ContextPredictor& predictor, std::span<const Symbol> sequence) {
  const std::size_t w = predictor.context_length();
  if (sequence.size() <= w)
    throw PreconditionError("log_loss needs a sequence longer than the context length");
  LogLoss out;
  CompensatedSum total;
  std::uint64_t context = predictor.code().of(sequence, w);
  for (std::size_t i = w; i < sequence.size(); ++i) {
    const double p = predictor.prob(context, sequence[i]);
    if (p > 0.0) {
      total += -std::log2(p);
      ++out.evaluated;
    } else {
      out.infinite = true;
      ++out.zero_probability_events;
    }
    context = predictor.code().push(context, sequence[i]);
  }
  out.total_bits = total.value();
  out.bits_per_symbol = out.evaluated ? out.total_bits / static_cast<double>(out.evaluated) : 0.0;
  if (out.infinite) out.bits_per_symbol = std::numeric_limits<double>::infinity();
  return out;
}

ContextPredictor optimal_predictor(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t w,
                                   std::uint64_t budget) {
  const std::size_t size = kernel.alphabet_size();
  const auto contexts = static_cast<Eigen::Index>(checked_power(size, w, budget));
  checked_power(size, w + 1, budget);
  ProbTable table(contexts, static_cast<Eigen::Index>(size));
  if (w >= kernel.order()) {
    const auto count = static_cast<Eigen::Index>(kernel.context_count());
    for (Eigen::Index c = 0; c < contexts; ++c) table.row(c) = kernel.probs().row(c % count);
  } else {
    const Eigen::VectorXd joint = stationary_joint(kernel, law, w + 1, budget);
    for (Eigen::Index c = 0; c < contexts; ++c) {
      auto block = joint.segment(c * static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
      const double mass = block.sum();
      if (mass > 0.0)
        table.row(c) = block.transpose() / mass;
      else
        table.row(c).setConstant(1.0 / static_cast<double>(size));
    }
  }
  return ContextPredictor::from_table(kernel.alphabet(), w, std::move(table));
}

ContextPredictor optimal_predictor(const TransitionKernel& kernel, std::size_t w, std::uint64_t budget) {
  return optimal_predictor(kernel, stationary_law(kernel), w, budget);
}

}  // namespace fincontext
