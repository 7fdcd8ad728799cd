#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

#include "fincontext/alphabet.hpp"

namespace fincontext {

/// Default cap on the number of table entries any exact enumeration may allocate.
inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

/// Row-major so that one context's conditional law is contiguous.
using ProbTable = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// base^exp, throwing CapacityError when the result would exceed `limit`.
std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t limit);

/// k-th order conditional law P(y | c) over a finite alphabet.
///
/// Contexts are encoded big-endian in base |Y| with the oldest symbol most
/// significant, so appending y to context c gives (c * |Y| + y) mod |Y|^k.
/// An order-0 kernel has a single row (the i.i.d. marginal).
class TransitionKernel {
 public:
  TransitionKernel(Alphabet alphabet, std::size_t order, ProbTable probs);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  std::size_t order() const { return order_; }
  std::uint64_t context_count() const { return static_cast<std::uint64_t>(probs_.rows()); }
  const ProbTable& probs() const { return probs_; }

  double prob(std::uint64_t context, Symbol y) const { return probs_(static_cast<Eigen::Index>(context), y); }
  auto row(std::uint64_t context) const { return probs_.row(static_cast<Eigen::Index>(context)); }

  std::uint64_t next_context(std::uint64_t context, Symbol y) const {
    return order_ == 0 ? 0 : (context * alphabet_size() + y) % context_count();
  }

 private:
  Alphabet alphabet_;
  std::size_t order_;
  ProbTable probs_;
};

/// Stationary distribution of the length-k context chain.
struct StationaryLaw {
  Eigen::VectorXd pi;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct StationaryOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 1'000'000;
};

/// Each context row drawn independently from a symmetric Dirichlet(alpha).
/// Uses the sub-seed derive_seed(seed, "kernel").
TransitionKernel sample_kernel(std::size_t alphabet_size, std::size_t order, double dirichlet_alpha,
                               std::uint64_t seed);

/// True when every context can reach every other along positive transitions.
bool is_irreducible(const TransitionKernel& kernel);

/// One step of the context chain applied to a context distribution.
Eigen::VectorXd advance(const TransitionKernel& kernel, const Eigen::VectorXd& pi);

/// Lazy power iteration pi <- (pi + pi P) / 2 from the uniform law. The lazy
/// step shares the fixed point of P and converges for periodic chains too.
/// Throws ErgodicityError for reducible chains or when the cap is hit.
StationaryLaw stationary_law(const TransitionKernel& kernel, const StationaryOptions& options = {});

/// Wrap a caller-supplied invariant law (e.g. for a reducible kernel with a
/// chosen closed class). Throws ErgodicityError if pi is not invariant within 1e-10 TV.
StationaryLaw make_stationary_law(const TransitionKernel& kernel, Eigen::VectorXd pi);

/// Draw the initial context from the law, then n kernel steps. The n emitted
/// symbols are returned; the initial context is not. Uses derive_seed(seed, "sequence").
SymbolSeq sample_sequence(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t n,
                          std::uint64_t seed);
SymbolSeq sample_sequence(const TransitionKernel& kernel, std::size_t n, std::uint64_t seed);

/// Stationary law of `length` consecutive symbols, indexed big-endian (oldest
/// symbol most significant).
Eigen::VectorXd stationary_joint(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t length,
                                 std::uint64_t budget = kDefaultEnumerationBudget);

/// H(Y_0 | Y_{-w}^{-1}) in bits, by exact enumeration of the stationary joint
/// over max(w, k) + 1 symbols.
double conditional_entropy(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t w,
                           std::uint64_t budget = kDefaultEnumerationBudget);
double conditional_entropy(const TransitionKernel& kernel, std::size_t w,
                           std::uint64_t budget = kDefaultEnumerationBudget);

/// sum_c pi(c) H(P(.|c)).
double entropy_rate(const TransitionKernel& kernel, const StationaryLaw& law);
double entropy_rate(const TransitionKernel& kernel);

/// delta = min_{c,y} P(y|c). A zero value means the source is not delta-positive.
double min_transition_prob(const TransitionKernel& kernel);
inline bool is_delta_positive(const TransitionKernel& kernel) { return min_transition_prob(kernel) > 0.0; }

}  // namespace fincontext
