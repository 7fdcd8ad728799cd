#pragma once

// Brute-force reference computations for the tests. Nothing here calls into
// the library's entropy, stationary-law, fragmentation or tokenizer code:
// inputs are plain probability tables and strings.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Table = std::vector<std::vector<double>>;  // rows = contexts (oldest symbol most significant)
using Str = std::vector<int>;

struct Chain {
  int alphabet = 2;
  int order = 1;
  Table probs;
};

/// Stationary context law from a dense LU solve of pi (T - I) = 0, sum pi = 1.
std::vector<double> stationary(const Chain& chain);

/// Law of every length-L string under the stationary chain.
std::map<Str, double> string_law(const Chain& chain, const std::vector<double>& pi, int length);

/// H(Y_0 | previous w symbols) = H(last w + 1) - H(last w).
double conditional_entropy(const Chain& chain, int w);

/// sum_c pi(c) H(row c).
double entropy_rate(const Chain& chain);

/// P(Y_0 = y | previous w symbols = ctx) for every ctx of positive mass.
std::map<Str, std::vector<double>> conditional_law(const Chain& chain, int w);

struct FragmentationValues {
  double source_loss = 0.0;
  double fragmented_loss = 0.0;
  double deficit = 0.0;
  double ambiguity = 0.0;
};

/// Explicit enumeration of the phase-randomized fragment process.
/// code[y] is the fragment codeword of source symbol y.
FragmentationValues fragmentation(const Chain& chain, const std::vector<Str>& code, int w);

/// max over initial contexts of the explicit product of transition probabilities.
double p_max(const Chain& chain, const Str& t);

/// Longest match by trying every length from longest to shortest.
std::vector<std::string> greedy_parse(const std::set<std::string>& vocab, const std::string& text);

/// Textbook LZW dictionary on a character string, stopping at `budget` entries.
std::set<std::string> lzw(const std::string& text, const std::set<std::string>& alphabet, std::size_t budget);

/// String-based BPE with the same conventions as the library (raw pair counts,
/// ties by (left, right) strings, closure counted, overshooting merges skipped).
std::set<std::string> bpe(const std::string& text, const std::set<std::string>& alphabet, std::size_t target);

}  // namespace oracle
