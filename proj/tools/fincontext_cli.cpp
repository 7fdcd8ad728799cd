// Experiment driver. Every subcommand reads a JSON config (--config), applies
// --set key=value overrides and --seed, validates, then writes CSV/JSON under
// the output directory.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fincontext/errors.hpp"
#include "fincontext/experiments.hpp"
#include "fincontext/fragmentation.hpp"
#include "fincontext/io.hpp"
#include "fincontext/span_diagnostics.hpp"
#include "fincontext/transfer.hpp"

namespace fs = std::filesystem;
using namespace fincontext;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitAssumption = 4;

Json source_defaults(std::size_t order, double alpha, std::size_t n) {
  return Json{{"alphabet_size", 2}, {"order", order}, {"dirichlet_alpha", alpha}, {"n", n}};
}

Json defaults(const std::string& command) {
  if (command == "gen-source") return Json{{"source", source_defaults(12, 0.4, 1'000'000)}, {"seeds", {0}}};
  if (command == "frag-decompose")
    return Json{{"pairs", {{1, 2}, {1, 3}, {1, 4}, {2, 2}, {2, 3}, {3, 2}}},
                {"kernels", 8},
                {"n", 500'000},
                {"dirichlet_alpha", 0.5},
                {"laplace", 0.5},
                {"fragment_alphabet_size", 2},
                {"window_offsets", {0, 1}},
                {"seeds", {0}}};
  if (command == "tok-train")
    return Json{{"source", source_defaults(12, 0.4, 25'000'000)},
                {"method", "bpe"},
                {"vocab_sizes", {2, 4, 6, 8, 10, 15, 20}},
                {"train_prefix", 500'000},
                {"text", nullptr},
                {"text_max_bytes", 0},
                {"seeds", {0}}};
  if (command == "span-cdf")
    return Json{{"source", source_defaults(12, 0.4, 2'000'000)},
                {"text", nullptr},
                {"text_max_bytes", 1'200'000},
                {"method", "bpe"},
                {"vocab_sizes", {2, 4, 8, 20}},
                {"train_prefix", 500'000},
                {"windows", {1, 2, 4, 8, 12}},
                {"ws_max_factor", 16},
                {"ws_points", 256},
                {"log2_alphabet", nullptr},
                {"seeds", {0}}};
  if (command == "transfer-check")
    return Json{{"source", source_defaults(3, 1.0, 200'000)},
                {"method", "lzw"},
                {"vocab_sizes", {64}},
                {"train_prefix", 100'000},
                {"windows", {2}},
                {"w_s", {2, 4, 6}},
                {"eta", 1e-6},
                {"seeds", {0}}};
  if (command == "heavy-hitting")
    return Json{{"source", source_defaults(2, 2.0, 1'000'000)},
                {"kernel", nullptr},
                {"budgets", {16, 64, 256, 1024}},
                {"beta", 0.5},
                {"w", 4},
                {"train_prefix", 500'000},
                {"eta", 1e-6},
                {"seeds", {0}}};
  throw ParameterError("unknown command " + command);
}

// Assigns `value` at a dotted path such as "source.order".
void set_path(Json& cfg, const std::string& key, const Json& value) {
  Json* node = &cfg;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ParameterError("bad --set key '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

template <typename T>
T get(const Json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw ParameterError("config is missing '" + key + "'");
  try {
    return cfg.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParameterError("config field '" + key + "' has the wrong type");
  }
}

template <typename T>
std::vector<T> get_list(const Json& cfg, const std::string& key, bool allow_empty = false) {
  auto v = get<std::vector<T>>(cfg, key);
  if (v.empty() && !allow_empty) throw ParameterError("config list '" + key + "' is empty");
  return v;
}

SourceSpec source_spec(const Json& cfg) {
  const Json& s = cfg.at("source");
  SourceSpec spec;
  spec.alphabet_size = get<std::size_t>(s, "alphabet_size");
  spec.order = get<std::size_t>(s, "order");
  spec.dirichlet_alpha = get<double>(s, "dirichlet_alpha");
  spec.n = get<std::size_t>(s, "n");
  if (spec.alphabet_size < 2 || spec.alphabet_size > 65536) throw ParameterError("source.alphabet_size must be in [2, 65536]");
  if (!(spec.dirichlet_alpha > 0.0)) throw ParameterError("source.dirichlet_alpha must be positive");
  if (spec.n == 0) throw ParameterError("source.n must be positive");
  checked_power(spec.alphabet_size, spec.order + 1, kDefaultEnumerationBudget);
  return spec;
}

std::optional<fs::path> optional_path(const Json& cfg, const std::string& key) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) return std::nullopt;
  fs::path p = get<std::string>(cfg, key);
  if (!fs::exists(p)) throw ParameterError("config '" + key + "' refers to a missing path: " + p.string());
  return p;
}

void validate(const std::string& command, const Json& cfg) {
  for (auto s : get_list<std::uint64_t>(cfg, "seeds")) (void)s;
  if (cfg.contains("source")) source_spec(cfg);
  if (command == "frag-decompose") {
    for (const auto& pair : get<std::vector<std::vector<std::size_t>>>(cfg, "pairs"))
      if (pair.size() != 2 || pair[1] == 0) throw ParameterError("each pair must be [k, M] with M >= 1");
    if (get<std::size_t>(cfg, "kernels") == 0) throw ParameterError("kernels must be positive");
    if (get<std::size_t>(cfg, "fragment_alphabet_size") < 2) throw ParameterError("fragment_alphabet_size must be >= 2");
    if (!(get<double>(cfg, "laplace") >= 0.0)) throw ParameterError("laplace must be non-negative");
    get_list<std::size_t>(cfg, "window_offsets");
  }
  if (cfg.contains("method")) parse_tokenizer_method(get<std::string>(cfg, "method"));
  if (cfg.contains("vocab_sizes")) get_list<std::size_t>(cfg, "vocab_sizes");
  if (cfg.contains("windows"))
    for (auto w : get_list<std::size_t>(cfg, "windows"))
      if (w == 0) throw ParameterError("windows must be positive");
  if (cfg.contains("text")) optional_path(cfg, "text");
  if (cfg.contains("kernel")) optional_path(cfg, "kernel");
  if (cfg.contains("eta")) {
    const double eta = get<double>(cfg, "eta");
    if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("eta must lie in (0, 1)");
  }
  if (command == "heavy-hitting") {
    const double beta = get<double>(cfg, "beta");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
    get_list<std::size_t>(cfg, "budgets");
    if (get<std::size_t>(cfg, "w") == 0) throw ParameterError("w must be positive");
  }
  if (command == "transfer-check") get_list<std::size_t>(cfg, "w_s");
}

std::string f(double v) { return format_double(v); }
std::string u(std::uint64_t v) { return std::to_string(v); }

Json provenance_config(Json cfg) {
  cfg.erase("out");
  return cfg;
}

// --- commands -------------------------------------------------------------

void gen_source(const Json& cfg, const fs::path& out) {
  const auto seeds = get_list<std::uint64_t>(cfg, "seeds");
  const auto spec = source_spec(cfg);
  CsvWriter csv(out / "gen_source.csv", {"seed", "alphabet_size", "order", "n", "entropy_rate", "delta"});
  for (auto seed : seeds) {
    const auto src = generate_source(spec, seed);
    write_json(out / ("kernel_s" + u(seed) + ".json"), to_json(src.kernel));
    write_sequence(out / ("sequence_s" + u(seed) + ".bin"), src.kernel.alphabet(), src.sequence);
    csv.row({u(seed), u(spec.alphabet_size), u(spec.order), u(spec.n), f(entropy_rate(src.kernel, src.law)),
             f(min_transition_prob(src.kernel))});
  }
  csv.finish(provenance_config(cfg), seeds);
}

void frag_decompose(const Json& cfg, const fs::path& out) {
  const auto seeds = get_list<std::uint64_t>(cfg, "seeds");
  FragSettings settings;
  settings.fragment_alphabet_size = get<std::size_t>(cfg, "fragment_alphabet_size");
  settings.dirichlet_alpha = get<double>(cfg, "dirichlet_alpha");
  settings.n = get<std::size_t>(cfg, "n");
  settings.laplace = get<double>(cfg, "laplace");
  settings.window_offsets = get_list<std::size_t>(cfg, "window_offsets");
  const auto kernels = get<std::size_t>(cfg, "kernels");
  const auto pairs = get<std::vector<std::vector<std::size_t>>>(cfg, "pairs");

  CsvWriter csv(out / "frag_decompose.csv",
                {"seed", "k", "M", "instance", "w", "kernel_seed", "source_loss", "fragmented_loss", "context_deficit",
                 "phase_ambiguity", "theory_penalty", "empirical_source_loss", "empirical_fragmented_loss",
                 "empirical_penalty", "abs_error"});
  Json rows = Json::array();
  for (auto seed : seeds) {
    for (const auto& pair : pairs) {
      for (std::size_t i = 0; i < kernels; ++i) {
        for (const auto& r : frag_instance(settings, pair[0], pair[1], i, seed)) {
          const double err = std::abs(r.empirical_penalty - r.theory_penalty);
          csv.row({u(seed), u(r.k), u(r.M), u(r.instance), u(r.w), u(r.kernel_seed), f(r.source_loss),
                   f(r.fragmented_loss), f(r.context_deficit), f(r.phase_ambiguity), f(r.theory_penalty),
                   f(r.empirical_source_loss), f(r.empirical_fragmented_loss), f(r.empirical_penalty), f(err)});
          rows.push_back({{"seed", seed},
                          {"k", r.k},
                          {"M", r.M},
                          {"instance", r.instance},
                          {"w", r.w},
                          {"theory_penalty", r.theory_penalty},
                          {"context_deficit", r.context_deficit},
                          {"phase_ambiguity", r.phase_ambiguity},
                          {"empirical_penalty", r.empirical_penalty}});
        }
      }
    }
  }
  csv.finish(provenance_config(cfg), seeds);
  write_json(out / "frag_decompose.json", Json{{"config", provenance_config(cfg)}, {"rows", rows}});
}

struct Corpus {
  std::string name;
  Alphabet alphabet;
  SymbolSeq symbols;
};

// Either the configured text corpus or one generated source per seed.
std::vector<std::pair<std::uint64_t, Corpus>> corpora(const Json& cfg) {
  std::vector<std::pair<std::uint64_t, Corpus>> out;
  const auto seeds = get_list<std::uint64_t>(cfg, "seeds");
  if (auto text = optional_path(cfg, "text")) {
    auto decoded = decode_text(load_text(*text, get<std::size_t>(cfg, "text_max_bytes")));
    out.push_back({seeds.front(), Corpus{"text", std::move(decoded.alphabet), std::move(decoded.symbols)}});
    return out;
  }
  const auto spec = source_spec(cfg);
  for (auto seed : seeds) {
    auto src = generate_source(spec, seed);
    out.push_back({seed, Corpus{"markov", src.kernel.alphabet(), std::move(src.sequence)}});
  }
  return out;
}

std::span<const Symbol> prefix(const SymbolSeq& seq, std::size_t n) {
  return std::span<const Symbol>(seq).first(std::min(n, seq.size()));
}

void tok_train(const Json& cfg, const fs::path& out) {
  const auto seeds = get_list<std::uint64_t>(cfg, "seeds");
  const auto method = parse_tokenizer_method(get<std::string>(cfg, "method"));
  const auto sizes = get_list<std::size_t>(cfg, "vocab_sizes");
  const auto train_prefix = get<std::size_t>(cfg, "train_prefix");
  CsvWriter csv(out / "compression.csv",
                {"seed", "corpus", "method", "V", "vocab_size", "tokens", "symbols", "ratio", "rate"});
  for (const auto& [seed, corpus] : corpora(cfg)) {
    for (auto v : sizes) {
      const auto vocab = train_tokenizer(method, corpus.alphabet, prefix(corpus.symbols, train_prefix), v);
      write_json(out / ("vocab_" + to_string(method) + "_V" + u(v) + "_s" + u(seed) + ".json"), to_json(vocab));
      const auto tokens = greedy_parse(vocab, corpus.symbols);
      const auto stats = compression_stats(vocab, tokens);
      csv.row({u(seed), corpus.name, to_string(method), u(v), u(vocab.size()), u(stats.tokens), u(stats.symbols),
               f(stats.alpha), f(stats.rate)});
    }
  }
  csv.finish(provenance_config(cfg), seeds);
}

void span_cdf(const Json& cfg, const fs::path& out) {
  const auto seeds = get_list<std::uint64_t>(cfg, "seeds");
  const auto method = parse_tokenizer_method(get<std::string>(cfg, "method"));
  const auto sizes = get_list<std::size_t>(cfg, "vocab_sizes");
  const auto windows = get_list<std::size_t>(cfg, "windows");
  const auto train_prefix = get<std::size_t>(cfg, "train_prefix");
  const auto factor = get<std::size_t>(cfg, "ws_max_factor");
  const auto points = std::max<std::size_t>(1, get<std::size_t>(cfg, "ws_points"));
  std::optional<double> log2_alphabet;
  if (!cfg.at("log2_alphabet").is_null()) log2_alphabet = get<double>(cfg, "log2_alphabet");

  CsvWriter csv(out / "span_cdf.csv",
                {"seed", "corpus", "method", "vocab_size", "w", "w_s", "epsilon", "rate", "slack_bits"});
  Json summary = Json::array();
  for (const auto& [seed, corpus] : corpora(cfg)) {
    for (auto v : sizes) {
      const auto vocab = train_tokenizer(method, corpus.alphabet, prefix(corpus.symbols, train_prefix), v);
      const auto tokens = greedy_parse(vocab, corpus.symbols);
      const auto stats = compression_stats(vocab, tokens, log2_alphabet);
      for (auto w : windows) {
        const auto hist = span_distribution(vocab, tokens, w);
        const std::size_t last = factor * w;
        const std::size_t step = std::max<std::size_t>(1, last / points);
        for (const auto& p : slack_curve(hist, stats, 0, last, step))
          csv.row({u(seed), corpus.name, to_string(method), u(vocab.size()), u(p.w), u(p.w_s), f(p.epsilon), f(p.rate),
                   f(p.slack_bits)});
        summary.push_back({{"seed", seed},
                           {"corpus", corpus.name},
                           {"vocab_size", vocab.size()},
                           {"w", w},
                           {"alpha", stats.alpha},
                           {"rate", stats.rate},
                           {"mean_span", hist.mean()},
                           {"worst_case_span", hist.min_span()},
                           {"max_span", hist.max_span()}});
      }
    }
  }
  csv.finish(provenance_config(cfg), seeds);
  write_json(out / "span_summary.json", Json{{"config", provenance_config(cfg)}, {"reports", summary}});
}

void transfer_cmd(const Json& cfg, const fs::path& out) {
  const auto seeds = get_list<std::uint64_t>(cfg, "seeds");
  const auto spec = source_spec(cfg);
  const auto method = parse_tokenizer_method(get<std::string>(cfg, "method"));
  const auto sizes = get_list<std::size_t>(cfg, "vocab_sizes");
  const auto windows = get_list<std::size_t>(cfg, "windows");
  const auto spans = get_list<std::size_t>(cfg, "w_s");
  const auto train_prefix = get<std::size_t>(cfg, "train_prefix");
  const double eta = get<double>(cfg, "eta");

  CsvWriter csv(out / "transfer_check.csv",
                {"seed", "vocab_size", "w", "w_s", "lambda", "n", "source_loss_bits", "token_loss_bits", "difference",
                 "bound_2log_1_over_lambda", "entropy_rate", "source_loss_ws", "transferred_per_symbol", "epsilon",
                 "rate", "typical_per_symbol", "typical_se", "typical_bound", "typical_holds"});
  for (auto seed : seeds) {
    const auto src = generate_source(spec, seed);
    const auto train = prefix(src.sequence, train_prefix);
    const auto eval = std::span<const Symbol>(src.sequence).subspan(train.size());
    if (eval.empty()) throw ParameterError("train_prefix leaves no evaluation data");
    for (auto v : sizes) {
      const auto vocab = train_tokenizer(method, src.kernel.alphabet(), train, v);
      for (auto w : windows) {
        for (auto ws : spans) {
          const auto r = transfer_check(src.kernel, src.law, vocab, eval, w, ws, eta);
          const auto& c = r.comparison;
          csv.row({u(seed), u(r.vocab_size), u(w), u(ws), f(r.lambda), u(c.n), f(c.source_loss_bits),
                   f(c.token_loss_bits), f(c.difference), f(c.bound_2log_1_over_lambda), f(r.entropy_rate),
                   f(r.source_loss_ws), f(r.transferred.bits_per_source_symbol), f(r.epsilon), f(r.rate),
                   f(r.typical.bits_per_source_symbol), f(r.typical.se), f(r.typical_bound),
                   r.typical_holds ? "1" : "0"});
          write_json(out / ("transfer_s" + u(seed) + "_V" + u(v) + "_w" + u(w) + "_ws" + u(ws) + ".json"),
                     Json{{"n", c.n},
                          {"source_loss_bits", c.source_loss_bits},
                          {"token_loss_bits", c.token_loss_bits},
                          {"difference", c.difference},
                          {"bound_2log_1_over_lambda", c.bound_2log_1_over_lambda},
                          {"per_symbol_losses",
                           {{"source", c.source_per_symbol},
                            {"token", c.token_per_symbol},
                            {"typical", r.typical.bits_per_source_symbol},
                            {"typical_bound", r.typical_bound}}}});
        }
      }
    }
  }
  csv.finish(provenance_config(cfg), seeds);
}

void heavy_hitting(const Json& cfg, const fs::path& out) {
  const auto seeds = get_list<std::uint64_t>(cfg, "seeds");
  const auto spec = source_spec(cfg);
  const auto budgets = get_list<std::size_t>(cfg, "budgets");
  const double beta = get<double>(cfg, "beta");
  const auto w = get<std::size_t>(cfg, "w");
  const auto train_prefix = get<std::size_t>(cfg, "train_prefix");
  const double eta = get<double>(cfg, "eta");
  const auto kernel_path = optional_path(cfg, "kernel");

  CsvWriter csv(out / "heavy_hitting.csv",
                {"seed", "d", "vocab_size", "beta", "delta", "ell_d", "miss_prob", "miss_se", "short_prob", "short_se",
                 "inclusion_violations", "w", "w_d", "span_failure", "span_bound", "alpha", "alpha_bound",
                 "source_loss_wd", "token_loss", "token_loss_se", "loss_bound", "loss_bound_holds"});
  Json reports = Json::array();
  for (auto seed : seeds) {
    GeneratedSource src = [&] {
      if (!kernel_path) return generate_source(spec, seed);
      TransitionKernel kernel = kernel_from_json(read_json(*kernel_path));
      if (!is_delta_positive(kernel)) throw AssumptionError("kernel has a zero transition probability (delta = 0)");
      StationaryLaw law = stationary_law(kernel);
      SymbolSeq seq = sample_sequence(kernel, law, spec.n, seed);
      return GeneratedSource{std::move(kernel), std::move(law), std::move(seq)};
    }();
    if (!is_delta_positive(src.kernel)) throw AssumptionError("sampled kernel has delta = 0");
    const auto train = prefix(src.sequence, train_prefix);
    const auto eval = std::span<const Symbol>(src.sequence).subspan(train.size());
    if (eval.empty()) throw ParameterError("train_prefix leaves no evaluation data");
    for (auto d : budgets) {
      const auto vocab = train_lzw(src.kernel.alphabet(), train, d);
      const auto r = heavy_hit_check(src.kernel, src.law, vocab, eval, beta, static_cast<double>(d), w, eta);
      const auto& h = r.report;
      csv.row({u(seed), u(d), u(vocab.size()), f(beta), f(h.delta), f(h.ell_d), f(h.miss.mean), f(h.miss.se),
               f(h.short_tokens.mean), f(h.short_tokens.se), u(h.inclusion_violations), u(w), u(r.w_d),
               f(h.span_failure.mean), f(h.span_bound), f(h.alpha.mean), f(h.alpha_bound), f(r.source_loss_wd),
               f(r.typical.bits_per_source_symbol), f(r.typical.se), f(r.loss_bound), r.loss_bound_holds ? "1" : "0"});
      reports.push_back({{"seed", seed},
                         {"d", d},
                         {"beta", beta},
                         {"delta", h.delta},
                         {"ell_d", h.ell_d},
                         {"miss_prob", h.miss.mean},
                         {"short_token_prob", h.short_tokens.mean},
                         {"inclusion_violations", h.inclusion_violations},
                         {"typically_heavy_hitting", h.typically_heavy_hitting},
                         {"span_failure", h.span_failure.mean},
                         {"span_bound_holds", h.span_bound_holds},
                         {"alpha", h.alpha.mean},
                         {"alpha_bound", h.alpha_bound},
                         {"alpha_bound_holds", h.alpha_bound_holds},
                         {"loss_bound", r.loss_bound},
                         {"token_loss", r.typical.bits_per_source_symbol},
                         {"loss_bound_holds", r.loss_bound_holds}});
    }
  }
  csv.finish(provenance_config(cfg), seeds);
  write_json(out / "heavy_hitting.json", Json{{"config", provenance_config(cfg)}, {"reports", reports}});
}

fs::path output_dir(const std::string& command, const Json& cfg, const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (cfg.contains("out") && cfg.at("out").is_string()) return cfg.at("out").get<std::string>();
  const char* root = std::getenv("FINCONTEXT_OUT_ROOT");
  return fs::path(root && *root ? root : "out") / command;
}

int run(const std::string& command, const std::string& config_path, const std::vector<std::string>& sets,
        const std::vector<std::uint64_t>& seeds, const std::string& out_flag) {
  Json cfg = defaults(command);
  if (!config_path.empty()) {
    Json file;
    try {
      file = read_json(config_path);
    } catch (const Error& e) {
      throw ParameterError(e.what());
    }
    if (!file.is_object()) throw ParameterError("config file must hold a JSON object");
    for (const auto& [key, value] : file.items()) cfg[key] = value;
  }
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + s + "'");
    const std::string text = s.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    set_path(cfg, s.substr(0, eq), value);
  }
  if (!seeds.empty()) cfg["seeds"] = seeds;
  validate(command, cfg);

  const fs::path out = output_dir(command, cfg, out_flag);
  fs::create_directories(out);
  if (command == "gen-source") gen_source(cfg, out);
  else if (command == "frag-decompose") frag_decompose(cfg, out);
  else if (command == "tok-train") tok_train(cfg, out);
  else if (command == "span-cdf") span_cdf(cfg, out);
  else if (command == "transfer-check") transfer_cmd(cfg, out);
  else if (command == "heavy-hitting") heavy_hitting(cfg, out);
  std::cout << command << ": wrote " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-context fragmentation and tokenization experiments"};
  app.require_subcommand(1);

  std::string config_path, out_flag;
  std::vector<std::string> sets;
  std::vector<std::uint64_t> seeds;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen-source", "sample a Markov kernel and sequence per seed"},
      {"frag-decompose", "exact and empirical fragmentation penalty per (k, M) instance"},
      {"tok-train", "train BPE/LZW vocabularies and report compression"},
      {"span-cdf", "source-span distributions and slack curves"},
      {"transfer-check", "token-level transfer of optimal predictors and loss bounds"},
      {"heavy-hitting", "LZW heavy-hitting diagnostics and end-to-end bound"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--set", sets, "override a config field, key=value (value parsed as JSON)");
    sub->add_option("--seed", seeds, "seed (repeatable); replaces the config seed list");
    sub->add_option("--out", out_flag, "output directory (default $FINCONTEXT_OUT_ROOT/<command>)");
    sub->add_flag_function("--print-config", [name = name](std::int64_t) {
      std::cout << defaults(name).dump(2) << '\n';
      std::exit(0);
    }, "print the default config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, config_path, sets, seeds, out_flag);
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const AlphabetError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const AssumptionError& e) {
    std::cerr << "assumption violated: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const ErgodicityError& e) {
    std::cerr << "assumption violated: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const PositivityError& e) {
    std::cerr << "assumption violated: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
