#include "fincontext/fragmentation.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "fincontext/entropy.hpp"
#include "fincontext/errors.hpp"
#include "fincontext/ngram.hpp"

namespace fincontext {

namespace {

using WeightedKey = std::pair<std::uint64_t, double>;

// H(target | context) from (context * base + target, probability) pairs.
// Sorting first makes the summation order independent of insertion order.
double conditional_entropy_of(std::vector<WeightedKey>& entries, std::uint64_t base) {
  std::sort(entries.begin(), entries.end(), [](const WeightedKey& a, const WeightedKey& b) { return a.first < b.first; });
  CompensatedSum acc;
  std::vector<double> cell;
  std::size_t i = 0;
  while (i < entries.size()) {
    const std::uint64_t context = entries[i].first / base;
    cell.clear();
    double mass = 0.0;
    while (i < entries.size() && entries[i].first / base == context) {
      const std::uint64_t key = entries[i].first;
      CompensatedSum p;
      while (i < entries.size() && entries[i].first == key) p += entries[i++].second;
      cell.push_back(p.value());
      mass += p.value();
    }
    if (mass <= 0.0) continue;
    for (double p : cell)
      if (p > 0.0) acc += -p * std::log2(p / mass);
  }
  return acc.value();
}

}  // namespace

FragmentationMap::FragmentationMap(Alphabet source, Alphabet fragments, std::size_t block_length,
                                   std::vector<SymbolSeq> codewords)
    : source_(std::move(source)), fragments_(std::move(fragments)), block_length_(block_length),
      code_(std::move(codewords)) {
  if (block_length_ < 1) throw ParameterError("block length must be at least 1");
  if (fragments_.size() < 1) throw ParameterError("fragment alphabet is empty");
  if (code_.size() != source_.size())
    throw FormatError("need one codeword per source symbol (" + std::to_string(source_.size()) + ")");
  for (std::size_t y = 0; y < code_.size(); ++y) {
    if (code_[y].size() != block_length_)
      throw FormatError("codeword for '" + source_.label(static_cast<Symbol>(y)) + "' has length " +
                        std::to_string(code_[y].size()) + ", expected " + std::to_string(block_length_));
    for (Symbol x : code_[y])
      if (x >= fragments_.size()) throw AlphabetError("codeword uses a symbol outside the fragment alphabet");
    if (!inverse_.emplace(code_[y], static_cast<Symbol>(y)).second)
      throw InjectivityError("codeword for '" + source_.label(static_cast<Symbol>(y)) + "' is already in use");
  }
}

FragmentationMap FragmentationMap::with_default_code(Alphabet source, Alphabet fragments, std::size_t block_length) {
  const std::uint64_t capacity = checked_power(fragments.size(), block_length, ~std::uint64_t{0} >> 1);
  if (source.size() > capacity)
    throw ParameterError("|Y| exceeds |X|^M; no injective fixed-length code exists");
  std::vector<SymbolSeq> code(source.size(), SymbolSeq(block_length));
  for (std::size_t y = 0; y < source.size(); ++y) {
    std::uint64_t v = y;
    for (std::size_t j = block_length; j-- > 0;) {
      code[y][j] = static_cast<Symbol>(v % fragments.size());
      v /= fragments.size();
    }
  }
  return FragmentationMap(std::move(source), std::move(fragments), block_length, std::move(code));
}

std::span<const Symbol> FragmentationMap::codeword(Symbol y) const {
  if (y >= code_.size()) throw AlphabetError("source symbol outside alphabet");
  return code_[y];
}

std::optional<Symbol> FragmentationMap::decode(std::span<const Symbol> block) const {
  auto it = inverse_.find(SymbolSeq(block.begin(), block.end()));
  if (it == inverse_.end()) return std::nullopt;
  return it->second;
}

FragmentationMap make_map(const Alphabet& source, const Alphabet& fragments, std::size_t block_length,
                          const std::vector<std::vector<std::string>>& codewords) {
  if (codewords.empty()) return FragmentationMap::with_default_code(source, fragments, block_length);
  std::vector<SymbolSeq> code;
  code.reserve(codewords.size());
  for (const auto& word : codewords) {
    SymbolSeq encoded;
    encoded.reserve(word.size());
    for (const auto& label : word) encoded.push_back(fragments.index(label));
    code.push_back(std::move(encoded));
  }
  return FragmentationMap(source, fragments, block_length, std::move(code));
}

SymbolSeq fragment(const FragmentationMap& map, std::span<const Symbol> source) {
  SymbolSeq out;
  out.reserve(source.size() * map.block_length());
  for (Symbol y : source) {
    auto word = map.codeword(y);
    out.insert(out.end(), word.begin(), word.end());
  }
  return out;
}

SymbolSeq defragment(const FragmentationMap& map, std::span<const Symbol> fragments) {
  const std::size_t m = map.block_length();
  if (fragments.size() % m != 0) throw FormatError("fragment stream length is not a multiple of the block length");
  SymbolSeq out;
  out.reserve(fragments.size() / m);
  for (std::size_t i = 0; i < fragments.size(); i += m) {
    auto y = map.decode(fragments.subspan(i, m));
    if (!y) throw FormatError("fragment block at offset " + std::to_string(i) + " is not a codeword");
    out.push_back(*y);
  }
  return out;
}

DecompositionReport decompose(const TransitionKernel& kernel, const StationaryLaw& law, const FragmentationMap& map,
                              std::size_t w, std::uint64_t budget) {
  if (!(map.source_alphabet().size() == kernel.alphabet_size()))
    throw AlphabetError("fragmentation map and kernel disagree on the source alphabet size");
  const std::size_t m = map.block_length();
  const std::size_t source_size = kernel.alphabet_size();
  const std::uint64_t base = map.fragment_alphabet().size();
  const std::size_t span_fragments = m * (w + 1);
  // Longest context code has span_fragments - 1 digits, then one more digit for the target.
  checked_power(base, span_fragments, ~std::uint64_t{0} >> 2);
  const std::uint64_t tuples = checked_power(source_size, w + 1, budget);
  if (tuples > budget / (3 * m)) throw CapacityError("fragmentation tables exceed the enumeration budget");

  const Eigen::VectorXd joint = stationary_joint(kernel, law, w + 1, budget);
  const std::size_t context_fragments = m * w;

  std::vector<std::vector<WeightedKey>> local(m), aligned(m);
  std::vector<WeightedKey> pooled;
  for (auto& v : local) v.reserve(tuples);
  for (auto& v : aligned) v.reserve(tuples);
  pooled.reserve(tuples * m);

  SymbolSeq tuple(w + 1);
  SymbolSeq frags(span_fragments);
  const double phase_weight = 1.0 / static_cast<double>(m);
  for (std::uint64_t s = 0; s < tuples; ++s) {
    const double p = joint(static_cast<Eigen::Index>(s));
    if (p <= 0.0) continue;
    std::uint64_t v = s;
    for (std::size_t j = w + 1; j-- > 0;) {
      tuple[j] = static_cast<Symbol>(v % source_size);
      v /= source_size;
    }
    for (std::size_t j = 0; j <= w; ++j) {
      auto word = map.codeword(tuple[j]);
      std::copy(word.begin(), word.end(), frags.begin() + static_cast<std::ptrdiff_t>(j * m));
    }
    // frags[0] is X_{1-Mw}; the target at phase theta (0-based t) is frags[Mw + t].
    for (std::size_t t = 0; t < m; ++t) {
      const Symbol target = frags[context_fragments + t];
      std::uint64_t local_code = 0;
      for (std::size_t j = t; j < t + context_fragments; ++j) local_code = local_code * base + frags[j];
      std::uint64_t aligned_code = 0;
      for (std::size_t j = 0; j < context_fragments + t; ++j) aligned_code = aligned_code * base + frags[j];
      local[t].emplace_back(local_code * base + target, p);
      aligned[t].emplace_back(aligned_code * base + target, p);
      pooled.emplace_back(local_code * base + target, p * phase_weight);
    }
  }

  DecompositionReport report;
  report.w = w;
  report.block_length = m;
  report.phase_entropy.resize(m);
  report.aligned_phase_entropy.resize(m);
  CompensatedSum phase_sum, deficit;
  for (std::size_t t = 0; t < m; ++t) {
    report.phase_entropy[t] = conditional_entropy_of(local[t], base);
    report.aligned_phase_entropy[t] = conditional_entropy_of(aligned[t], base);
    phase_sum += report.phase_entropy[t];
    deficit += report.phase_entropy[t] - report.aligned_phase_entropy[t];
  }
  const double pooled_entropy = conditional_entropy_of(pooled, base);
  report.fragmented_loss = static_cast<double>(m) * pooled_entropy;
  report.phase_ambiguity = report.fragmented_loss - phase_sum.value();
  report.context_deficit = deficit.value();
  report.source_loss = conditional_entropy(kernel, law, w, budget);
  report.gap = report.fragmented_loss - report.source_loss;
  return report;
}

DecompositionReport decompose(const TransitionKernel& kernel, const FragmentationMap& map, std::size_t w,
                              std::uint64_t budget) {
  return decompose(kernel, stationary_law(kernel), map, w, budget);
}

double exact_fragmented_loss(const TransitionKernel& kernel, const FragmentationMap& map, std::size_t w,
                             std::uint64_t budget) {
  return decompose(kernel, map, w, budget).fragmented_loss;
}

double phase_ambiguity(const TransitionKernel& kernel, const FragmentationMap& map, std::size_t w,
                       std::uint64_t budget) {
  return decompose(kernel, map, w, budget).phase_ambiguity;
}

double context_deficit(const TransitionKernel& kernel, const FragmentationMap& map, std::size_t w,
                       std::uint64_t budget) {
  return decompose(kernel, map, w, budget).context_deficit;
}

double empirical_fragmented_loss(const FragmentationMap& map, std::span<const Symbol> source, std::size_t w,
                                 double laplace_alpha) {
  const SymbolSeq stream = fragment(map, source);
  const std::size_t context = map.block_length() * w;
  if (stream.size() <= context) throw DataError("sequence too short for the fragment context");
  const ContextPredictor q = fit(map.fragment_alphabet(), stream, context, laplace_alpha);
  return static_cast<double>(map.block_length()) * log_loss(q, stream).bits_per_symbol;
}

double empirical_source_loss(const Alphabet& alphabet, std::span<const Symbol> source, std::size_t w,
                             double laplace_alpha) {
  if (source.size() <= w) throw DataError("sequence too short for the context length");
  const ContextPredictor q = fit(alphabet, source, w, laplace_alpha);
  return log_loss(q, source).bits_per_symbol;
}

}  // namespace fincontext
