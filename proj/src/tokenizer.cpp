#include "fincontext/tokenizer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "fincontext/errors.hpp"

namespace fincontext {

namespace {

constexpr std::uint32_t kNoChild = ~std::uint32_t{0};

// Growable trie used while collecting strings; children kept in ordered maps
// so a preorder walk visits entries in lexicographic order.
struct ScratchTrie {
  std::vector<std::map<Symbol, std::uint32_t>> children{1};

  std::uint32_t insert(std::span<const Symbol> text) {
    std::uint32_t node = 0;
    for (Symbol y : text) {
      auto it = children[node].find(y);
      if (it == children[node].end()) {
        const auto fresh = static_cast<std::uint32_t>(children.size());
        children[node].emplace(y, fresh);
        children.emplace_back();
        node = fresh;
      } else {
        node = it->second;
      }
    }
    return node;
  }
};

}  // namespace

PrefixVocabulary::PrefixVocabulary(Alphabet alphabet, const std::vector<SymbolSeq>& strings,
                                   std::optional<std::size_t> budget)
    : alphabet_(std::move(alphabet)), budget_(budget) {
  if (alphabet_.size() == 0) throw FormatError("vocabulary alphabet is empty");
  ScratchTrie scratch;
  for (Symbol y = 0; y < alphabet_.size(); ++y) {
    const Symbol single[1] = {y};
    scratch.insert(single);
  }
  for (const auto& text : strings) {
    if (text.empty()) throw FormatError("vocabulary entries must be nonempty");
    for (Symbol y : text)
      if (y >= alphabet_.size()) throw AlphabetError("vocabulary entry uses a symbol outside the alphabet");
    scratch.insert(text);
  }
  const std::size_t entry_count = scratch.children.size() - 1;
  if (budget_ && entry_count > *budget_)
    throw CapacityError("prefix-closed vocabulary has " + std::to_string(entry_count) +
                        " entries, over the budget of " + std::to_string(*budget_));

  // Preorder relabelling: new node id = preorder rank, token id = rank - 1.
  nodes_.resize(scratch.children.size());
  entries_.reserve(entry_count);
  std::uint32_t next_id = 1;
  SymbolSeq path;
  auto visit = [&](auto&& self, std::uint32_t scratch_node, std::uint32_t node) -> void {
    for (const auto& [y, scratch_child] : scratch.children[scratch_node]) {
      const std::uint32_t id = next_id++;
      nodes_[node].children.emplace_back(y, id);
      path.push_back(y);
      entries_.push_back(path);
      max_length_ = std::max(max_length_, path.size());
      self(self, scratch_child, id);
      path.pop_back();
    }
  };
  visit(visit, 0, 0);

  root_children_.assign(alphabet_.size(), kNoChild);
  for (const auto& [y, id] : nodes_[0].children) root_children_[y] = id;
}

std::span<const Symbol> PrefixVocabulary::entry(TokenId token) const {
  if (token >= entries_.size()) throw FormatError("unknown token id " + std::to_string(token));
  return entries_[token];
}

std::optional<std::uint32_t> PrefixVocabulary::child_node(std::uint32_t node, Symbol y) const {
  if (node == 0) {
    if (y >= root_children_.size() || root_children_[y] == kNoChild) return std::nullopt;
    return root_children_[y];
  }
  const auto& children = nodes_[node].children;
  if (children.size() <= 8) {
    for (const auto& [symbol, id] : children)
      if (symbol == y) return id;
    return std::nullopt;
  }
  auto it = std::lower_bound(children.begin(), children.end(), y,
                             [](const std::pair<Symbol, std::uint32_t>& c, Symbol s) { return c.first < s; });
  if (it != children.end() && it->first == y) return it->second;
  return std::nullopt;
}

std::optional<TokenId> PrefixVocabulary::find(std::span<const Symbol> text) const {
  if (text.empty()) return std::nullopt;
  std::uint32_t node = 0;
  for (Symbol y : text) {
    auto next = child_node(node, y);
    if (!next) return std::nullopt;
    node = *next;
  }
  return node - 1;
}

TokenId PrefixVocabulary::single(Symbol y) const {
  if (y >= root_children_.size()) throw AlphabetError("symbol outside the vocabulary alphabet");
  return root_children_[y] - 1;
}

std::optional<TokenId> PrefixVocabulary::child(TokenId token, Symbol y) const {
  if (token >= entries_.size()) throw FormatError("unknown token id " + std::to_string(token));
  auto node = child_node(token + 1, y);
  if (!node) return std::nullopt;
  return *node - 1;
}

std::vector<Symbol> PrefixVocabulary::ext_set(TokenId token) const {
  if (token >= entries_.size()) throw FormatError("unknown token id " + std::to_string(token));
  std::vector<Symbol> out;
  for (const auto& [y, id] : nodes_[token + 1].children) out.push_back(y);
  return out;
}

bool PrefixVocabulary::audit() const {
  for (Symbol y = 0; y < alphabet_.size(); ++y) {
    const Symbol single[1] = {y};
    if (!find(single)) return false;
  }
  for (TokenId t = 0; t < entries_.size(); ++t) {
    const auto& text = entries_[t];
    if (text.empty()) return false;
    if (find(text) != t) return false;
    for (std::size_t len = 1; len < text.size(); ++len)
      if (!find(std::span<const Symbol>(text).first(len))) return false;
  }
  if (budget_ && entries_.size() > *budget_) return false;
  return true;
}

PrefixVocabulary build_vocab(const Alphabet& alphabet, const std::vector<SymbolSeq>& strings,
                             std::optional<std::size_t> budget) {
  return PrefixVocabulary(alphabet, strings, budget);
}

TokenSeq greedy_parse(const PrefixVocabulary& vocab, std::span<const Symbol> source) {
  TokenSeq tokens;
  tokens.reserve(source.size() / 2 + 1);
  std::size_t i = 0;
  while (i < source.size()) {
    TokenId token = vocab.single(source[i]);
    ++i;
    while (i < source.size()) {
      auto longer = vocab.child(token, source[i]);
      if (!longer) break;
      token = *longer;
      ++i;
    }
    tokens.push_back(token);
  }
  return tokens;
}

SymbolSeq expand(const PrefixVocabulary& vocab, std::span<const TokenId> tokens) {
  SymbolSeq out;
  for (TokenId t : tokens) {
    auto text = vocab.entry(t);
    out.insert(out.end(), text.begin(), text.end());
  }
  return out;
}

std::vector<Symbol> ext_set(const PrefixVocabulary& vocab, TokenId token) { return vocab.ext_set(token); }

BpeTraining train_bpe_detailed(const Alphabet& alphabet, std::span<const Symbol> corpus, std::size_t target_size) {
  if (target_size < alphabet.size()) throw ParameterError("BPE target size is smaller than the alphabet");
  if (corpus.size() < 2) throw DataError("BPE needs a corpus of at least two symbols");

  std::vector<SymbolSeq> units;
  std::map<SymbolSeq, std::uint32_t> unit_of;
  for (Symbol y = 0; y < alphabet.size(); ++y) {
    units.push_back(SymbolSeq{y});
    unit_of.emplace(units.back(), y);
  }
  std::vector<std::uint32_t> seq;
  seq.reserve(corpus.size());
  for (Symbol y : corpus) {
    if (y >= alphabet.size()) throw AlphabetError("corpus symbol outside alphabet");
    seq.push_back(y);
  }
  std::set<SymbolSeq> closed;
  for (const auto& u : units) closed.insert(u);
  std::vector<std::pair<SymbolSeq, SymbolSeq>> merges;

  auto pair_key = [](std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; };
  auto closure_additions = [&](const SymbolSeq& text) {
    std::size_t added = 0;
    SymbolSeq prefix;
    for (Symbol y : text) {
      prefix.push_back(y);
      if (!closed.count(prefix)) ++added;
    }
    return added;
  };

  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  while (closed.size() < target_size && seq.size() >= 2) {
    counts.clear();
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) ++counts[pair_key(seq[i], seq[i + 1])];

    // Candidate order: count descending, then (left, right) strings ascending.
    auto better = [&](std::uint64_t ka, std::uint64_t ca, std::uint64_t kb, std::uint64_t cb) {
      if (ca != cb) return ca > cb;
      const auto& la = units[ka >> 32];
      const auto& lb = units[kb >> 32];
      if (la != lb) return la < lb;
      return units[ka & 0xffffffffu] < units[kb & 0xffffffffu];
    };
    std::unordered_set<std::uint64_t> rejected;
    std::optional<std::uint64_t> chosen;
    SymbolSeq merged;
    for (;;) {
      std::optional<std::uint64_t> best;
      std::uint64_t best_count = 0;
      for (const auto& [key, count] : counts) {
        if (rejected.count(key)) continue;
        if (!best || better(key, count, *best, best_count)) {
          best = key;
          best_count = count;
        }
      }
      if (!best) break;
      const auto& left = units[*best >> 32];
      const auto& right = units[*best & 0xffffffffu];
      merged = left;
      merged.insert(merged.end(), right.begin(), right.end());
      if (closed.size() + closure_additions(merged) <= target_size) {
        chosen = best;
        break;
      }
      rejected.insert(*best);
    }
    if (!chosen) break;

    const auto a = static_cast<std::uint32_t>(*chosen >> 32);
    const auto b = static_cast<std::uint32_t>(*chosen & 0xffffffffu);
    merges.emplace_back(units[a], units[b]);
    std::uint32_t fresh;
    if (auto it = unit_of.find(merged); it != unit_of.end()) {
      fresh = it->second;
    } else {
      fresh = static_cast<std::uint32_t>(units.size());
      units.push_back(merged);
      unit_of.emplace(merged, fresh);
    }
    SymbolSeq prefix;
    for (Symbol y : merged) {
      prefix.push_back(y);
      closed.insert(prefix);
    }
    std::size_t out = 0;
    for (std::size_t i = 0; i < seq.size();) {
      if (i + 1 < seq.size() && seq[i] == a && seq[i + 1] == b) {
        seq[out++] = fresh;
        i += 2;
      } else {
        seq[out++] = seq[i++];
      }
    }
    seq.resize(out);
  }

  std::vector<SymbolSeq> strings(closed.begin(), closed.end());
  return BpeTraining{PrefixVocabulary(alphabet, strings), std::move(merges)};
}

PrefixVocabulary train_bpe(const Alphabet& alphabet, std::span<const Symbol> corpus, std::size_t target_size) {
  return train_bpe_detailed(alphabet, corpus, target_size).vocabulary;
}

PrefixVocabulary train_lzw(const Alphabet& alphabet, std::span<const Symbol> sequence, std::size_t budget) {
  if (budget < alphabet.size()) throw ParameterError("LZW budget is smaller than the alphabet");
  ScratchTrie dict;
  std::size_t size = 0;
  std::vector<SymbolSeq> inserted;
  for (Symbol y = 0; y < alphabet.size(); ++y) {
    const Symbol single[1] = {y};
    dict.insert(single);
    ++size;
  }
  std::uint32_t node = 0;
  SymbolSeq current;
  for (Symbol y : sequence) {
    if (size >= budget) break;
    if (y >= alphabet.size()) throw AlphabetError("sequence symbol outside alphabet");
    auto it = dict.children[node].find(y);
    if (it != dict.children[node].end()) {
      node = it->second;
      current.push_back(y);
      continue;
    }
    current.push_back(y);
    dict.insert(current);
    inserted.push_back(current);
    ++size;
    current.assign(1, y);
    node = dict.children[0].at(y);
  }
  return PrefixVocabulary(alphabet, inserted, budget);
}

}  // namespace fincontext
