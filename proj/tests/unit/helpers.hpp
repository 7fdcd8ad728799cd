#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fincontext/markov_source.hpp"
#include "fincontext/tokenizer.hpp"
#include "oracle.hpp"

namespace testing_helpers {

inline const nlohmann::json& golden() {
  static const nlohmann::json j = [] {
    std::ifstream in(std::string(FINCONTEXT_FIXTURES) + "/golden.json");
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline fincontext::TransitionKernel kernel(std::size_t alphabet, std::size_t order,
                                           const std::vector<std::vector<double>>& rows) {
  fincontext::ProbTable t(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(alphabet));
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (std::size_t y = 0; y < alphabet; ++y)
      t(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(y)) = rows[c][y];
  return fincontext::TransitionKernel(fincontext::Alphabet::numeric(alphabet), order, t);
}

inline oracle::Chain chain(const fincontext::TransitionKernel& k) {
  oracle::Chain c;
  c.alphabet = static_cast<int>(k.alphabet_size());
  c.order = static_cast<int>(k.order());
  for (Eigen::Index r = 0; r < k.probs().rows(); ++r) {
    std::vector<double> row;
    for (Eigen::Index y = 0; y < k.probs().cols(); ++y) row.push_back(k.probs()(r, y));
    c.probs.push_back(row);
  }
  return c;
}

/// P(1|0) = 0.3, P(0|1) = 0.4.
inline fincontext::TransitionKernel two_state() { return kernel(2, 1, {{0.7, 0.3}, {0.4, 0.6}}); }

inline fincontext::SymbolSeq bits(const std::string& s) {
  fincontext::SymbolSeq out;
  for (char c : s) out.push_back(static_cast<fincontext::Symbol>(c - '0'));
  return out;
}

inline std::string text(const fincontext::PrefixVocabulary& v, fincontext::TokenId t) {
  std::string s;
  for (auto y : v.entry(t)) s += v.alphabet().label(y);
  return s;
}

/// {0, 1, 01, 010}
inline fincontext::PrefixVocabulary small_vocab() {
  return fincontext::PrefixVocabulary(fincontext::Alphabet::numeric(2), {bits("010")});
}

inline double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

}  // namespace testing_helpers
