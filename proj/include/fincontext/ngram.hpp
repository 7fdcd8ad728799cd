#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "fincontext/alphabet.hpp"
#include "fincontext/markov_source.hpp"

namespace fincontext {

/// Sparse per-context symbol counts, keyed by the big-endian context code.
using CountTable = std::unordered_map<std::uint64_t, std::vector<std::uint64_t>>;

/// Rolling base-|Y| code of the last w symbols.
class ContextCode {
 public:
  ContextCode(std::size_t alphabet_size, std::size_t w);

  std::uint64_t push(std::uint64_t code, Symbol y) const {
    return width_ == 0 ? 0 : (code * base_ + y) % modulus_;
  }
  /// Code of the w symbols ending just before `end` in `seq`. Requires end >= w.
  std::uint64_t of(std::span<const Symbol> seq, std::size_t end) const;
  std::uint64_t modulus() const { return modulus_; }

 private:
  std::uint64_t base_;
  std::size_t width_;
  std::uint64_t modulus_;
};

/// Finite-context conditional law q(. | c) over an alphabet.
///
/// Either count-backed (Laplace smoothed, sparse, unseen contexts uniform) or
/// a dense |Y|^w x |Y| table. An optional mixing weight eta blends every row
/// with the uniform law: (1 - eta) q + eta / |Y|.
class ContextPredictor {
 public:
  enum class Kind { Counts, Dense };

  static ContextPredictor from_counts(Alphabet alphabet, std::size_t w, double laplace_alpha, CountTable counts);
  static ContextPredictor from_table(Alphabet alphabet, std::size_t w, ProbTable table);

  Kind kind() const { return kind_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  std::size_t context_length() const { return w_; }
  const ContextCode& code() const { return code_; }
  double laplace_alpha() const { return alpha_; }
  double mixing() const { return eta_; }
  const CountTable& counts() const { return counts_; }
  const ProbTable& table() const { return table_; }

  double prob(std::uint64_t context, Symbol y) const;
  Eigen::VectorXd row(std::uint64_t context) const;

  /// Smallest probability assigned to any (context, symbol) pair over all of Y^w.
  double min_prob() const;

  /// Copy with mixing weight eta applied on top of any existing mixing.
  ContextPredictor mixed_with_uniform(double eta) const;

 private:
  ContextPredictor(Kind kind, Alphabet alphabet, std::size_t w);
  double base_prob(std::uint64_t context, Symbol y) const;

  Kind kind_;
  Alphabet alphabet_;
  std::size_t w_;
  ContextCode code_;
  double alpha_ = 0.0;
  double eta_ = 0.0;
  CountTable counts_;
  ProbTable table_;
};

/// Laplace-smoothed count predictor: q(y|c) = (n(c,y) + alpha) / (n(c) + alpha |Y|).
ContextPredictor fit(const Alphabet& alphabet, std::span<const Symbol> sequence, std::size_t w,
                     double laplace_alpha = 0.5);

struct LogLoss {
  double bits_per_symbol = 0.0;
  double total_bits = 0.0;
  std::size_t evaluated = 0;
  /// Set when some evaluated symbol had probability zero. The totals then
  /// exclude those symbols and count them in `zero_probability_events`.
  bool infinite = false;
  std::size_t zero_probability_events = 0;
};

/// -(1/(n-w)) sum_{i>w} log2 q(y_i | y_{i-w}^{i-1}). Requires n > w.
LogLoss log_loss(const ContextPredictor& predictor, std::span<const Symbol> sequence);

/// Exact conditional law of the next symbol given w previous ones. For w >= k
/// the kernel rows are lifted; for w < k the law comes from the stationary joint.
ContextPredictor optimal_predictor(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t w,
                                   std::uint64_t budget = kDefaultEnumerationBudget);
ContextPredictor optimal_predictor(const TransitionKernel& kernel, std::size_t w,
                                   std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace fincontext
