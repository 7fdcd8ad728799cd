#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fincontext/alphabet.hpp"
#include "fincontext/markov_source.hpp"

namespace fincontext {

/// Injective fixed-length code phi: Y -> X^M. Every source symbol becomes a
/// block of M fragments; the position inside the block is its phase.
class FragmentationMap {
 public:
  /// codewords[y] is the block for source symbol y.
  FragmentationMap(Alphabet source, Alphabet fragments, std::size_t block_length, std::vector<SymbolSeq> codewords);

  /// Symbol index written as block_length base-|X| digits, most significant first.
  static FragmentationMap with_default_code(Alphabet source, Alphabet fragments, std::size_t block_length);

  const Alphabet& source_alphabet() const { return source_; }
  const Alphabet& fragment_alphabet() const { return fragments_; }
  std::size_t block_length() const { return block_length_; }
  std::span<const Symbol> codeword(Symbol y) const;
  const std::vector<SymbolSeq>& codewords() const { return code_; }
  std::optional<Symbol> decode(std::span<const Symbol> block) const;

 private:
  Alphabet source_;
  Alphabet fragments_;
  std::size_t block_length_;
  std::vector<SymbolSeq> code_;
  std::map<SymbolSeq, Symbol> inverse_;
};

/// Build a map from codeword label strings. When `codewords` is empty the
/// default base-|X| code is used.
FragmentationMap make_map(const Alphabet& source, const Alphabet& fragments, std::size_t block_length,
                          const std::vector<std::vector<std::string>>& codewords = {});

SymbolSeq fragment(const FragmentationMap& map, std::span<const Symbol> source);
SymbolSeq defragment(const FragmentationMap& map, std::span<const Symbol> fragments);

/// Exact fragmentation analysis at source-context length w (fragment context M w).
/// All quantities in bits per source symbol.
struct DecompositionReport {
  std::size_t w = 0;
  std::size_t block_length = 0;
  double source_loss = 0.0;      ///< L_Y(w)
  double fragmented_loss = 0.0;  ///< L_X^frag(M w)
  double context_deficit = 0.0;
  double phase_ambiguity = 0.0;
  double gap = 0.0;  ///< fragmented_loss - source_loss
  /// H(X_theta | X_{theta-Mw}^{theta-1}) per phase.
  std::vector<double> phase_entropy;
  /// H(X_theta | X_{1-Mw}^{theta-1}) per phase (context reaching back to the block boundary).
  std::vector<double> aligned_phase_entropy;
};

DecompositionReport decompose(const TransitionKernel& kernel, const StationaryLaw& law, const FragmentationMap& map,
                              std::size_t w, std::uint64_t budget = kDefaultEnumerationBudget);
DecompositionReport decompose(const TransitionKernel& kernel, const FragmentationMap& map, std::size_t w,
                              std::uint64_t budget = kDefaultEnumerationBudget);

double exact_fragmented_loss(const TransitionKernel& kernel, const FragmentationMap& map, std::size_t w,
                             std::uint64_t budget = kDefaultEnumerationBudget);
double phase_ambiguity(const TransitionKernel& kernel, const FragmentationMap& map, std::size_t w,
                       std::uint64_t budget = kDefaultEnumerationBudget);
double context_deficit(const TransitionKernel& kernel, const FragmentationMap& map, std::size_t w,
                       std::uint64_t budget = kDefaultEnumerationBudget);

/// Laplace-smoothed (M w)-context n-gram fitted on the fragmented stream and
/// evaluated in-sample; returns the sum of the M per-fragment losses.
double empirical_fragmented_loss(const FragmentationMap& map, std::span<const Symbol> source, std::size_t w,
                                 double laplace_alpha = 0.5);

/// Matching source-level n-gram loss (bits per source symbol).
double empirical_source_loss(const Alphabet& alphabet, std::span<const Symbol> source, std::size_t w,
                             double laplace_alpha = 0.5);

}  // namespace fincontext
