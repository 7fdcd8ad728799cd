#include "fincontext/markov_source.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "fincontext/entropy.hpp"
#include "fincontext/errors.hpp"
#include "fincontext/rng.hpp"

namespace fincontext {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kInvarianceTolerance = 1e-10;

// Symbol drawn from a probability row by inversion. Rounding slack at the top
// end falls back to the last symbol with positive mass.
template <typename Row>
Symbol draw_from_row(const Row& row, double u) {
  double cumulative = 0.0;
  Eigen::Index last_positive = 0;
  for (Eigen::Index y = 0; y < row.size(); ++y) {
    const double p = row(y);
    if (p <= 0.0) continue;
    last_positive = y;
    cumulative += p;
    if (u < cumulative) return static_cast<Symbol>(y);
  }
  return static_cast<Symbol>(last_positive);
}

std::vector<bool> reachable(std::uint64_t count, std::uint64_t start, auto&& neighbours) {
  std::vector<bool> seen(count, false);
  std::deque<std::uint64_t> frontier{start};
  seen[start] = true;
  while (!frontier.empty()) {
    const std::uint64_t c = frontier.front();
    frontier.pop_front();
    neighbours(c, [&](std::uint64_t next) {
      if (!seen[next]) {
        seen[next] = true;
        frontier.push_back(next);
      }
    });
  }
  return seen;
}

}  // namespace

std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t limit) {
  std::uint64_t result = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && result > limit / base)
      throw CapacityError("table of " + std::to_string(base) + "^" + std::to_string(exp) +
                          " entries exceeds the budget of " + std::to_string(limit));
    result *= base;
  }
  if (result > limit)
    throw CapacityError("table of " + std::to_string(result) + " entries exceeds the budget of " +
                        std::to_string(limit));
  return result;
}

TransitionKernel::TransitionKernel(Alphabet alphabet, std::size_t order, ProbTable probs)
    : alphabet_(std::move(alphabet)), order_(order), probs_(std::move(probs)) {
  if (alphabet_.size() < 2) throw ParameterError("kernel alphabet needs at least two symbols");
  const std::uint64_t contexts =
      checked_power(alphabet_.size(), order_, static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max()));
  if (static_cast<std::uint64_t>(probs_.rows()) != contexts ||
      static_cast<std::size_t>(probs_.cols()) != alphabet_.size())
    throw FormatError("kernel table must be " + std::to_string(contexts) + " x " +
                      std::to_string(alphabet_.size()));
  if ((probs_.array() < 0.0).any() || !probs_.allFinite())
    throw FormatError("kernel entries must be finite and non-negative");
  for (Eigen::Index c = 0; c < probs_.rows(); ++c) {
    if (std::abs(probs_.row(c).sum() - 1.0) > kRowTolerance)
      throw FormatError("kernel row " + std::to_string(c) + " does not sum to 1");
  }
}

TransitionKernel sample_kernel(std::size_t alphabet_size, std::size_t order, double dirichlet_alpha,
                               std::uint64_t seed) {
  if (alphabet_size < 2) throw ParameterError("alphabet_size must be at least 2");
  if (!(dirichlet_alpha > 0.0)) throw ParameterError("dirichlet_alpha must be positive");
  const std::uint64_t contexts = checked_power(alphabet_size, order, kDefaultEnumerationBudget);
  Rng rng(derive_seed(seed, "kernel"));
  ProbTable probs(static_cast<Eigen::Index>(contexts), static_cast<Eigen::Index>(alphabet_size));
  for (Eigen::Index c = 0; c < probs.rows(); ++c) {
    Eigen::VectorXd row = rng.dirichlet(probs.cols(), dirichlet_alpha);
    // Renormalise so the row invariant holds to the last bit we can manage.
    probs.row(c) = row.transpose() / row.sum();
  }
  return TransitionKernel(Alphabet::numeric(alphabet_size), order, std::move(probs));
}

bool is_irreducible(const TransitionKernel& kernel) {
  const std::uint64_t count = kernel.context_count();
  if (count == 1) return true;
  const std::uint64_t size = kernel.alphabet_size();
  const std::uint64_t stride = count / size;  // |Y|^(k-1)
  auto forward = reachable(count, 0, [&](std::uint64_t c, auto&& visit) {
    for (Symbol y = 0; y < size; ++y)
      if (kernel.prob(c, y) > 0.0) visit(kernel.next_context(c, y));
  });
  if (std::find(forward.begin(), forward.end(), false) != forward.end()) return false;
  auto backward = reachable(count, 0, [&](std::uint64_t next, auto&& visit) {
    const auto y = static_cast<Symbol>(next % size);
    const std::uint64_t tail = next / size;
    for (std::uint64_t oldest = 0; oldest < size; ++oldest) {
      const std::uint64_t c = oldest * stride + tail;
      if (kernel.prob(c, y) > 0.0) visit(c);
    }
  });
  return std::find(backward.begin(), backward.end(), false) == backward.end();
}

Eigen::VectorXd advance(const TransitionKernel& kernel, const Eigen::VectorXd& pi) {
  const auto count = static_cast<Eigen::Index>(kernel.context_count());
  const auto size = static_cast<Eigen::Index>(kernel.alphabet_size());
  // joint(c, y) = pi(c) P(y|c), flattened row-major to index c*|Y| + y. The
  // next context is that index mod |Y|^k, so summing the |Y| column blocks of
  // the flat array viewed as a (count x |Y|) column-major matrix gives pi P.
  ProbTable joint = pi.asDiagonal() * kernel.probs();
  Eigen::Map<const Eigen::MatrixXd> blocks(joint.data(), count, size);
  return blocks.rowwise().sum();
}

StationaryLaw stationary_law(const TransitionKernel& kernel, const StationaryOptions& options) {
  if (!is_irreducible(kernel))
    throw ErgodicityError("context chain is reducible; no unique stationary law");
  const auto count = static_cast<Eigen::Index>(kernel.context_count());
  StationaryLaw law;
  law.pi = Eigen::VectorXd::Constant(count, 1.0 / static_cast<double>(count));
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    Eigen::VectorXd next = advance(kernel, law.pi);
    law.residual = total_variation(law.pi, next);
    law.iterations = it;
    if (law.residual < options.tolerance) return law;
    law.pi = 0.5 * (law.pi + next);
    law.pi /= law.pi.sum();
  }
  throw ErgodicityError("stationary iteration did not reach tolerance within " +
                        std::to_string(options.max_iterations) + " iterations (residual " +
                        std::to_string(law.residual) + ")");
}

StationaryLaw make_stationary_law(const TransitionKernel& kernel, Eigen::VectorXd pi) {
  if (static_cast<std::uint64_t>(pi.size()) != kernel.context_count())
    throw FormatError("stationary law has the wrong number of contexts");
  if ((pi.array() < 0.0).any() || std::abs(pi.sum() - 1.0) > kRowTolerance)
    throw FormatError("stationary law must be a probability vector");
  StationaryLaw law;
  law.residual = total_variation(pi, advance(kernel, pi));
  if (law.residual >= kInvarianceTolerance)
    throw ErgodicityError("supplied law is not invariant under the kernel");
  law.pi = std::move(pi);
  return law;
}

SymbolSeq sample_sequence(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t n,
                          std::uint64_t seed) {
  if (n < 1) throw ParameterError("sequence length must be at least 1");
  Rng rng(derive_seed(seed, "sequence"));
  std::uint64_t context = 0;
  {
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (Eigen::Index c = 0; c < law.pi.size(); ++c) {
      if (law.pi(c) <= 0.0) continue;
      context = static_cast<std::uint64_t>(c);
      cumulative += law.pi(c);
      if (u < cumulative) break;
    }
  }
  SymbolSeq out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Symbol y = draw_from_row(kernel.row(context), rng.uniform());
    out[i] = y;
    context = kernel.next_context(context, y);
  }
  return out;
}

SymbolSeq sample_sequence(const TransitionKernel& kernel, std::size_t n, std::uint64_t seed) {
  return sample_sequence(kernel, stationary_law(kernel), n, seed);
}

Eigen::VectorXd stationary_joint(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t length,
                                 std::uint64_t budget) {
  const std::uint64_t size = kernel.alphabet_size();
  const std::size_t k = kernel.order();
  const auto entries = static_cast<Eigen::Index>(checked_power(size, length, budget));
  if (length <= k) {
    const auto older = static_cast<Eigen::Index>(checked_power(size, k - length, budget));
    Eigen::Map<const Eigen::MatrixXd> split(law.pi.data(), entries, older);
    return split.rowwise().sum();
  }
  Eigen::VectorXd joint = law.pi;
  const std::uint64_t count = kernel.context_count();
  for (std::size_t len = k; len < length; ++len) {
    Eigen::VectorXd extended(joint.size() * static_cast<Eigen::Index>(size));
    for (Eigen::Index s = 0; s < joint.size(); ++s) {
      const auto c = static_cast<Eigen::Index>(static_cast<std::uint64_t>(s) % count);
      extended.segment(s * static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size)) =
          joint(s) * kernel.probs().row(c).transpose();
    }
    joint = std::move(extended);
  }
  return joint;
}

double conditional_entropy(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t w,
                           std::uint64_t budget) {
  const std::size_t length = std::max(w, kernel.order()) + 1;
  const Eigen::VectorXd joint = stationary_joint(kernel, law, length, budget);
  const auto size = static_cast<Eigen::Index>(kernel.alphabet_size());
  const auto window = static_cast<Eigen::Index>(checked_power(kernel.alphabet_size(), w + 1, budget));
  Eigen::Map<const Eigen::MatrixXd> split(joint.data(), window, joint.size() / window);
  const Eigen::VectorXd recent = split.rowwise().sum();
  Eigen::Map<const Eigen::MatrixXd> table(recent.data(), size, window / size);
  return conditional_entropy_bits(table);
}

double conditional_entropy(const TransitionKernel& kernel, std::size_t w, std::uint64_t budget) {
  return conditional_entropy(kernel, stationary_law(kernel), w, budget);
}

double entropy_rate(const TransitionKernel& kernel, const StationaryLaw& law) {
  CompensatedSum acc;
  for (Eigen::Index c = 0; c < kernel.probs().rows(); ++c)
    acc += law.pi(c) * entropy_bits(kernel.probs().row(c));
  return acc.value();
}

double entropy_rate(const TransitionKernel& kernel) { return entropy_rate(kernel, stationary_law(kernel)); }

double min_transition_prob(const TransitionKernel& kernel) { return kernel.probs().minCoeff(); }

}  // namespace fincontext
