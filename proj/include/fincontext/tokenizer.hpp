#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fincontext/alphabet.hpp"

namespace fincontext {

/// Identifier of a vocabulary entry: its rank in the lexicographically sorted
/// entry list (prefixes sort before their extensions).
using TokenId = std::uint32_t;
using TokenSeq = std::vector<TokenId>;

/// Prefix-closed vocabulary of source strings stored as a prefix tree.
///
/// Every single symbol of the alphabet is an entry, and every nonempty prefix
/// of an entry is an entry, so every trie node below the root is a token.
/// Node i + 1 is token i.
class PrefixVocabulary {
 public:
  /// Closes `strings` under prefixes and adds all single symbols. Throws
  /// FormatError for empty strings, CapacityError when the closed size exceeds `budget`.
  PrefixVocabulary(Alphabet alphabet, const std::vector<SymbolSeq>& strings,
                   std::optional<std::size_t> budget = std::nullopt);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return entries_.size(); }
  std::optional<std::size_t> budget() const { return budget_; }

  std::span<const Symbol> entry(TokenId token) const;
  std::size_t entry_length(TokenId token) const { return entries_.at(token).size(); }
  const std::vector<SymbolSeq>& entries() const { return entries_; }
  std::size_t max_entry_length() const { return max_length_; }

  std::optional<TokenId> find(std::span<const Symbol> text) const;
  /// Token for a single source symbol.
  TokenId single(Symbol y) const;
  /// Token for entry(token) followed by y, if it is in the vocabulary.
  std::optional<TokenId> child(TokenId token, Symbol y) const;
  /// Symbols a with entry(token) + a in the vocabulary, ascending.
  std::vector<Symbol> ext_set(TokenId token) const;
  bool extends(TokenId token, Symbol y) const { return child(token, y).has_value(); }

  /// Re-checks prefix closure and the single-symbol invariant by walking every entry.
  bool audit() const;

 private:
  struct Node {
    std::vector<std::pair<Symbol, std::uint32_t>> children;  // sorted by symbol
  };

  std::optional<std::uint32_t> child_node(std::uint32_t node, Symbol y) const;

  Alphabet alphabet_;
  std::optional<std::size_t> budget_;
  std::vector<Node> nodes_;  // nodes_[0] is the root
  std::vector<std::uint32_t> root_children_;  // dense child table for the root
  std::vector<SymbolSeq> entries_;
  std::size_t max_length_ = 0;
};

PrefixVocabulary build_vocab(const Alphabet& alphabet, const std::vector<SymbolSeq>& strings,
                             std::optional<std::size_t> budget = std::nullopt);

/// Left-to-right longest match.
TokenSeq greedy_parse(const PrefixVocabulary& vocab, std::span<const Symbol> source);

/// Concatenation of the token strings. Throws FormatError for unknown ids.
SymbolSeq expand(const PrefixVocabulary& vocab, std::span<const TokenId> tokens);

std::vector<Symbol> ext_set(const PrefixVocabulary& vocab, TokenId token);

struct BpeTraining {
  PrefixVocabulary vocabulary;
  /// Accepted merges in order, as (left, right) strings.
  std::vector<std::pair<SymbolSeq, SymbolSeq>> merges;
};

/// BPE over raw adjacent-pair frequencies, recounted every round. The most
/// frequent pair is merged (ties: lexicographically smallest (left, right));
/// the vocabulary is the prefix closure of the merged strings plus the
/// alphabet, and `target_size` counts that closed set. A merge whose closure
/// would overshoot the target is skipped in favour of the next candidate.
BpeTraining train_bpe_detailed(const Alphabet& alphabet, std::span<const Symbol> corpus, std::size_t target_size);
PrefixVocabulary train_bpe(const Alphabet& alphabet, std::span<const Symbol> corpus, std::size_t target_size);

/// LZW dictionary growth: extend the current match while it stays in the
/// dictionary, otherwise insert match + symbol and restart from the symbol.
/// Stops inserting once the dictionary holds `budget` entries.
PrefixVocabulary train_lzw(const Alphabet& alphabet, std::span<const Symbol> sequence, std::size_t budget);

}  // namespace fincontext
