#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fincontext/alphabet.hpp"
#include "fincontext/fragmentation.hpp"
#include "fincontext/markov_source.hpp"
#include "fincontext/ngram.hpp"
#include "fincontext/tokenizer.hpp"

namespace fincontext {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kArtifactVersion = "fincontext-0.1.0";

Json to_json(const Alphabet& alphabet);
Alphabet alphabet_from_json(const Json& j);

/// {alphabet, order, probs}; probs is the row-major |Y|^k x |Y| table.
Json to_json(const TransitionKernel& kernel);
TransitionKernel kernel_from_json(const Json& j);

/// {source_alphabet, fragment_alphabet, M, code: {label: codeword}}. Codewords
/// are strings when every fragment label is one character, else label arrays.
Json to_json(const FragmentationMap& map);
FragmentationMap map_from_json(const Json& j);

/// Count predictors: {alphabet, w, alpha, eta, counts: {context code: [counts]}}.
/// Dense predictors carry probs instead of counts.
Json to_json(const ContextPredictor& predictor);
ContextPredictor predictor_from_json(const Json& j);

/// {alphabet, entries}. Entries are sorted by token id.
Json to_json(const PrefixVocabulary& vocab);
PrefixVocabulary vocab_from_json(const Json& j);

/// Labels joined into one string when all labels are single characters.
Json encode_string(const Alphabet& alphabet, std::span<const Symbol> text);
SymbolSeq decode_string(const Alphabet& alphabet, const Json& j);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

/// Symbols as raw bytes (|Y| <= 256) or little-endian 16-bit words, with a
/// JSON sidecar at path + ".json" holding the alphabet and encoding.
void write_sequence(const std::filesystem::path& path, const Alphabet& alphabet, std::span<const Symbol> seq);
SymbolSeq read_sequence(const std::filesystem::path& path, Alphabet* alphabet = nullptr);

/// LEB128 varint token ids with a sidecar {vocab_size, tokens}.
void write_tokens(const std::filesystem::path& path, std::span<const TokenId> tokens, std::size_t vocab_size);
TokenSeq read_tokens(const std::filesystem::path& path);

/// UTF-8 text decoded to code points; the alphabet is the sorted set of
/// distinct characters. Invalid bytes decode to U+FFFD.
struct TextCorpus {
  Alphabet alphabet;
  SymbolSeq symbols;
};
TextCorpus decode_text(std::string_view utf8);

/// FNV-1a of the compact dump of `config`.
std::uint64_t config_hash(const Json& config);
std::string hex64(std::uint64_t value);

/// CSV with a header row and a trailing provenance block of '#' comment lines.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  /// Appends "# config_hash=..", "# seeds=..", "# version=.." and closes the file.
  void finish(const Json& config, const std::vector<std::uint64_t>& seeds);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// Shortest decimal form that round-trips the double.
std::string format_double(double value);

}  // namespace fincontext
