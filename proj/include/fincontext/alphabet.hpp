#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fincontext {

/// Index of a symbol inside its alphabet.
using Symbol = std::uint16_t;
using SymbolSeq = std::vector<Symbol>;

/// Ordered set of distinct symbol labels.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> labels);

  /// Labels "0", "1", ..., "n-1".
  static Alphabet numeric(std::size_t size);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(Symbol s) const;
  std::optional<Symbol> find(const std::string& label) const;
  /// Like find(), but throws AlphabetError for unknown labels.
  Symbol index(const std::string& label) const;
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const Alphabet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Symbol> index_;
};

}  // namespace fincontext
