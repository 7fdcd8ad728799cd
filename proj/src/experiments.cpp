#include "fincontext/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fincontext/errors.hpp"
#include "fincontext/fragmentation.hpp"
#include "fincontext/ngram.hpp"
#include "fincontext/rng.hpp"

namespace fincontext {

GeneratedSource generate_source(const SourceSpec& spec, std::uint64_t seed) {
  TransitionKernel kernel = sample_kernel(spec.alphabet_size, spec.order, spec.dirichlet_alpha, seed);
  StationaryLaw law = stationary_law(kernel);
  SymbolSeq seq = sample_sequence(kernel, law, spec.n, seed);
  return GeneratedSource{std::move(kernel), std::move(law), std::move(seq)};
}

double source_loss_at(const TransitionKernel& kernel, const StationaryLaw& law, std::size_t w) {
  if (w >= kernel.order()) return entropy_rate(kernel, law);
  return conditional_entropy(kernel, law, w);
}

TokenizerMethod parse_tokenizer_method(const std::string& name) {
  if (name == "bpe") return TokenizerMethod::Bpe;
  if (name == "lzw") return TokenizerMethod::Lzw;
  throw ParameterError("unknown tokenizer method '" + name + "' (expected bpe or lzw)");
}

std::string to_string(TokenizerMethod method) { return method == TokenizerMethod::Bpe ? "bpe" : "lzw"; }

PrefixVocabulary train_tokenizer(TokenizerMethod method, const Alphabet& alphabet, std::span<const Symbol> corpus,
                                 std::size_t size) {
  if (method == TokenizerMethod::Bpe) return train_bpe(alphabet, corpus, size);
  return train_lzw(alphabet, corpus, size);
}

std::uint64_t frag_kernel_seed(std::uint64_t seed, std::size_t k, std::size_t M, std::size_t instance) {
  return derive_seed(seed, "frag:k=" + std::to_string(k) + ":M=" + std::to_string(M) + ":i=" +
                               std::to_string(instance));
}

std::vector<FragRow> frag_instance(const FragSettings& settings, std::size_t k, std::size_t M, std::size_t instance,
                                   std::uint64_t seed) {
  if (M == 0) throw ParameterError("block length M must be at least 1");
  const std::size_t x = settings.fragment_alphabet_size;
  const std::uint64_t y_size = checked_power(x, M, 65536);
  const std::uint64_t kseed = frag_kernel_seed(seed, k, M, instance);
  const GeneratedSource src = generate_source({y_size, k, settings.dirichlet_alpha, settings.n}, kseed);
  const auto map = FragmentationMap::with_default_code(src.kernel.alphabet(), Alphabet::numeric(x), M);

  std::vector<FragRow> rows;
  for (std::size_t offset : settings.window_offsets) {
    const std::size_t w = k + offset;
    const auto report = decompose(src.kernel, src.law, map, w);
    FragRow r;
    r.k = k;
    r.M = M;
    r.instance = instance;
    r.w = w;
    r.kernel_seed = kseed;
    r.source_loss = report.source_loss;
    r.fragmented_loss = report.fragmented_loss;
    r.context_deficit = report.context_deficit;
    r.phase_ambiguity = report.phase_ambiguity;
    r.theory_penalty = report.gap;
    r.empirical_source_loss = empirical_source_loss(src.kernel.alphabet(), src.sequence, w, settings.laplace);
    r.empirical_fragmented_loss = empirical_fragmented_loss(map, src.sequence, w, settings.laplace);
    r.empirical_penalty = r.empirical_fragmented_loss - r.empirical_source_loss;
    rows.push_back(r);
  }
  return rows;
}

TransferRow transfer_check(const TransitionKernel& kernel, const StationaryLaw& law, const PrefixVocabulary& vocab,
                           std::span<const Symbol> eval, std::size_t w, std::size_t w_s, double eta) {
  TransferRow row;
  row.vocab_size = vocab.size();
  row.w = w;
  row.w_s = w_s;
  row.q_context = std::min(w_s, kernel.order());
  row.eta = eta;
  const ContextPredictor q = smooth(optimal_predictor(kernel, law, row.q_context), eta);
  TransferredPredictor transferred(q, vocab, w);
  row.lambda = transferred.lambda();
  row.comparison = compare_losses(transferred, eval);
  row.entropy_rate = entropy_rate(kernel, law);
  row.source_loss_ws = source_loss_at(kernel, law, w_s);

  const TokenSeq tokens = greedy_parse(vocab, eval);
  const auto stats = compression_stats(vocab, tokens);
  row.epsilon = typical_epsilon(vocab, tokens, w, w_s);
  row.rate = stats.rate;
  row.log2_alphabet = stats.log2_alphabet;
  row.transferred = token_loss_per_source_symbol(transferred, tokens);
  const TypicalPredictor typical = make_typical(std::move(transferred), w_s);
  row.typical = token_loss_per_source_symbol(typical, tokens);
  row.typical_bound = row.source_loss_ws + row.epsilon * row.rate * row.log2_alphabet;
  row.typical_holds = row.typical.bits_per_source_symbol <= row.typical_bound + 3.0 * row.typical.se;
  return row;
}

HeavyHitRow heavy_hit_check(const TransitionKernel& kernel, const StationaryLaw& law, const PrefixVocabulary& vocab,
                            std::span<const Symbol> eval, double beta, double d, std::size_t w, double eta) {
  HeavyHitRow row;
  const TokenSeq tokens = greedy_parse(vocab, eval);
  row.report = heavy_hitting_report(kernel, vocab, tokens, beta, d, w);
  row.w_d = row.report.span_threshold;
  row.source_loss_wd = source_loss_at(kernel, law, row.w_d);
  const ContextPredictor q = smooth(optimal_predictor(kernel, law, std::min(row.w_d, kernel.order())), eta);
  const TypicalPredictor typical = make_typical(TransferredPredictor(q, vocab, w), row.w_d);
  row.typical = token_loss_per_source_symbol(typical, tokens);
  row.loss_bound = row.source_loss_wd + row.report.loss_slack_bits;
  const double bound_se = 4.0 * std::log2(d) * row.report.miss.se / std::max(row.report.alpha_bound, 1e-300);
  row.loss_bound_holds =
      row.typical.bits_per_source_symbol <= row.loss_bound + 3.0 * std::hypot(row.typical.se, bound_se);
  return row;
}

std::string load_text(const std::filesystem::path& path, std::size_t max_bytes) {
  namespace fs = std::filesystem;
  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (!fs::exists(path)) throw DataError("text corpus path does not exist: " + path.string());
  if (fs::is_regular_file(path)) {
    std::string text = read_file(path);
    if (max_bytes && text.size() > max_bytes) text.resize(max_bytes);
    return text;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(path, fs::directory_options::skip_permission_denied)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".md" || ext == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::string text;
  for (const auto& f : files) {
    text += read_file(f);
    text += '\n';
    if (max_bytes && text.size() >= max_bytes) break;
  }
  if (max_bytes && text.size() > max_bytes) text.resize(max_bytes);
  return text;
}

}  // namespace fincontext
