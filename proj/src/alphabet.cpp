#include "fincontext/alphabet.hpp"

#include <limits>

#include "fincontext/errors.hpp"

namespace fincontext {

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() > std::numeric_limits<Symbol>::max() + std::size_t{1})
    throw AlphabetError("alphabet has more than 65536 symbols");
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], static_cast<Symbol>(i)).second)
      throw AlphabetError("duplicate alphabet label '" + labels_[i] + "'");
  }
}

Alphabet Alphabet::numeric(std::size_t size) {
  std::vector<std::string> labels;
  labels.reserve(size);
  for (std::size_t i = 0; i < size; ++i) labels.push_back(std::to_string(i));
  return Alphabet(std::move(labels));
}

const std::string& Alphabet::label(Symbol s) const {
  if (s >= labels_.size()) throw AlphabetError("symbol index " + std::to_string(s) + " outside alphabet");
  return labels_[s];
}

std::optional<Symbol> Alphabet::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Symbol Alphabet::index(const std::string& label) const {
  if (auto s = find(label)) return *s;
  throw AlphabetError("unknown symbol label '" + label + "'");
}

}  // namespace fincontext
