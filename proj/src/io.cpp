#include "fincontext/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "fincontext/errors.hpp"
#include "fincontext/rng.hpp"

namespace fincontext {

namespace {

bool single_char_labels(const Alphabet& alphabet) {
  return std::all_of(alphabet.labels().begin(), alphabet.labels().end(),
                     [](const std::string& l) { return l.size() == 1; });
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw FormatError(std::string("missing JSON field '") + name + "'");
  return j.at(name);
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 0;
}

// Splits a string into labels: whole UTF-8 characters.
std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = utf8_length(static_cast<unsigned char>(s[i]));
    if (len == 0 || i + len > s.size()) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace

Json to_json(const Alphabet& alphabet) { return Json(alphabet.labels()); }

Alphabet alphabet_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("alphabet must be a JSON array of labels");
  std::vector<std::string> labels;
  for (const auto& l : j) {
    if (l.is_string())
      labels.push_back(l.get<std::string>());
    else if (l.is_number_integer())
      labels.push_back(std::to_string(l.get<long long>()));
    else
      throw FormatError("alphabet labels must be strings or integers");
  }
  return Alphabet(std::move(labels));
}

Json encode_string(const Alphabet& alphabet, std::span<const Symbol> text) {
  if (single_char_labels(alphabet)) {
    std::string s;
    for (Symbol y : text) s += alphabet.label(y);
    return s;
  }
  Json arr = Json::array();
  for (Symbol y : text) arr.push_back(alphabet.label(y));
  return arr;
}

SymbolSeq decode_string(const Alphabet& alphabet, const Json& j) {
  SymbolSeq out;
  if (j.is_string()) {
    for (const auto& ch : utf8_chars(j.get<std::string>())) out.push_back(alphabet.index(ch));
  } else if (j.is_array()) {
    for (const auto& l : j) out.push_back(alphabet.index(l.get<std::string>()));
  } else {
    throw FormatError("string must be a JSON string or an array of labels");
  }
  return out;
}

Json to_json(const TransitionKernel& kernel) {
  Json j;
  j["alphabet"] = to_json(kernel.alphabet());
  j["order"] = kernel.order();
  Json probs = Json::array();
  for (Eigen::Index c = 0; c < kernel.probs().rows(); ++c) {
    Json row = Json::array();
    for (Eigen::Index y = 0; y < kernel.probs().cols(); ++y) row.push_back(kernel.probs()(c, y));
    probs.push_back(std::move(row));
  }
  j["probs"] = std::move(probs);
  return j;
}

TransitionKernel kernel_from_json(const Json& j) {
  Alphabet alphabet = alphabet_from_json(field(j, "alphabet"));
  const auto order = field(j, "order").get<std::size_t>();
  const auto& rows = field(j, "probs");
  if (!rows.is_array()) throw FormatError("kernel probs must be an array of rows");
  ProbTable probs(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(alphabet.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (!rows[c].is_array() || rows[c].size() != alphabet.size()) throw FormatError("kernel row has the wrong width");
    for (std::size_t y = 0; y < alphabet.size(); ++y)
      probs(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(y)) = rows[c][y].get<double>();
  }
  return TransitionKernel(std::move(alphabet), order, std::move(probs));
}

Json to_json(const FragmentationMap& map) {
  Json j;
  j["source_alphabet"] = to_json(map.source_alphabet());
  j["fragment_alphabet"] = to_json(map.fragment_alphabet());
  j["M"] = map.block_length();
  Json code = Json::object();
  for (Symbol y = 0; y < map.source_alphabet().size(); ++y)
    code[map.source_alphabet().label(y)] = encode_string(map.fragment_alphabet(), map.codeword(y));
  j["code"] = std::move(code);
  return j;
}

FragmentationMap map_from_json(const Json& j) {
  Alphabet source = alphabet_from_json(field(j, "source_alphabet"));
  Alphabet fragments = alphabet_from_json(field(j, "fragment_alphabet"));
  const auto m = field(j, "M").get<std::size_t>();
  if (!j.contains("code")) return FragmentationMap::with_default_code(source, fragments, m);
  const auto& code = j.at("code");
  std::vector<SymbolSeq> words(source.size());
  std::vector<bool> seen(source.size(), false);
  for (const auto& [label, word] : code.items()) {
    const Symbol y = source.index(label);
    words[y] = decode_string(fragments, word);
    seen[y] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw FormatError("fragmentation code is missing a source symbol");
  return FragmentationMap(std::move(source), std::move(fragments), m, std::move(words));
}

Json to_json(const ContextPredictor& predictor) {
  Json j;
  j["alphabet"] = to_json(predictor.alphabet());
  j["w"] = predictor.context_length();
  j["eta"] = predictor.mixing();
  if (predictor.kind() == ContextPredictor::Kind::Counts) {
    j["alpha"] = predictor.laplace_alpha();
    std::map<std::uint64_t, const std::vector<std::uint64_t>*> sorted;
    for (const auto& [c, row] : predictor.counts()) sorted.emplace(c, &row);
    Json counts = Json::object();
    for (const auto& [c, row] : sorted) counts[std::to_string(c)] = *row;
    j["counts"] = std::move(counts);
  } else {
    Json probs = Json::array();
    const auto& t = predictor.table();
    for (Eigen::Index c = 0; c < t.rows(); ++c) {
      Json row = Json::array();
      for (Eigen::Index y = 0; y < t.cols(); ++y) row.push_back(t(c, y));
      probs.push_back(std::move(row));
    }
    j["probs"] = std::move(probs);
  }
  return j;
}

ContextPredictor predictor_from_json(const Json& j) {
  Alphabet alphabet = alphabet_from_json(field(j, "alphabet"));
  const auto w = field(j, "w").get<std::size_t>();
  const double eta = j.value("eta", 0.0);
  ContextPredictor q = [&] {
    if (j.contains("probs")) {
      const auto& rows = j.at("probs");
      ProbTable t(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(alphabet.size()));
      for (std::size_t c = 0; c < rows.size(); ++c) {
        if (rows[c].size() != alphabet.size()) throw FormatError("predictor row has the wrong width");
        for (std::size_t y = 0; y < alphabet.size(); ++y)
          t(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(y)) = rows[c][y].get<double>();
      }
      return ContextPredictor::from_table(alphabet, w, std::move(t));
    }
    CountTable counts;
    for (const auto& [key, row] : field(j, "counts").items()) {
      std::uint64_t c = 0;
      auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), c);
      if (ec != std::errc() || ptr != key.data() + key.size()) throw FormatError("bad context key '" + key + "'");
      counts.emplace(c, row.get<std::vector<std::uint64_t>>());
    }
    return ContextPredictor::from_counts(alphabet, w, field(j, "alpha").get<double>(), std::move(counts));
  }();
  if (eta < 0.0 || eta >= 1.0) throw FormatError("predictor eta must lie in [0, 1)");
  return eta > 0.0 ? q.mixed_with_uniform(eta) : q;
}

Json to_json(const PrefixVocabulary& vocab) {
  Json j;
  j["alphabet"] = to_json(vocab.alphabet());
  Json entries = Json::array();
  for (const auto& e : vocab.entries()) entries.push_back(encode_string(vocab.alphabet(), e));
  j["entries"] = std::move(entries);
  if (vocab.budget()) j["budget"] = *vocab.budget();
  return j;
}

PrefixVocabulary vocab_from_json(const Json& j) {
  Alphabet alphabet = alphabet_from_json(field(j, "alphabet"));
  std::vector<SymbolSeq> strings;
  for (const auto& e : field(j, "entries")) strings.push_back(decode_string(alphabet, e));
  std::optional<std::size_t> budget;
  if (j.contains("budget")) budget = j.at("budget").get<std::size_t>();
  return PrefixVocabulary(std::move(alphabet), strings, budget);
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_sequence(const std::filesystem::path& path, const Alphabet& alphabet, std::span<const Symbol> seq) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const bool bytes = alphabet.size() <= 256;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  std::vector<char> buf;
  buf.reserve(seq.size() * (bytes ? 1 : 2));
  for (Symbol y : seq) {
    buf.push_back(static_cast<char>(y & 0xff));
    if (!bytes) buf.push_back(static_cast<char>(y >> 8));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  Json side;
  side["alphabet"] = to_json(alphabet);
  side["encoding"] = bytes ? "u8" : "u16le";
  side["length"] = seq.size();
  write_json(path.string() + ".json", side);
}

SymbolSeq read_sequence(const std::filesystem::path& path, Alphabet* alphabet) {
  const Json side = read_json(path.string() + ".json");
  Alphabet alph = alphabet_from_json(field(side, "alphabet"));
  const auto encoding = field(side, "encoding").get<std::string>();
  const auto length = field(side, "length").get<std::size_t>();
  const std::size_t width = encoding == "u8" ? 1 : encoding == "u16le" ? 2 : 0;
  if (width == 0) throw FormatError("unknown sequence encoding '" + encoding + "'");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<unsigned char> buf(length * width);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw FormatError("sequence file is truncated");
  SymbolSeq seq(length);
  for (std::size_t i = 0; i < length; ++i) {
    seq[i] = width == 1 ? buf[i] : static_cast<Symbol>(buf[2 * i] | (buf[2 * i + 1] << 8));
    if (seq[i] >= alph.size()) throw FormatError("sequence symbol outside the sidecar alphabet");
  }
  if (alphabet) *alphabet = std::move(alph);
  return seq;
}

void write_tokens(const std::filesystem::path& path, std::span<const TokenId> tokens, std::size_t vocab_size) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::string buf;
  for (TokenId t : tokens) {
    std::uint32_t v = t;
    while (v >= 0x80) {
      buf.push_back(static_cast<char>((v & 0x7f) | 0x80));
      v >>= 7;
    }
    buf.push_back(static_cast<char>(v));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  Json side;
  side["vocab_size"] = vocab_size;
  side["tokens"] = tokens.size();
  side["encoding"] = "leb128";
  write_json(path.string() + ".json", side);
}

TokenSeq read_tokens(const std::filesystem::path& path) {
  const Json side = read_json(path.string() + ".json");
  const auto count = field(side, "tokens").get<std::size_t>();
  const auto vocab_size = field(side, "vocab_size").get<std::size_t>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  TokenSeq tokens;
  tokens.reserve(count);
  std::uint64_t v = 0;
  int shift = 0;
  for (char ch : buf) {
    const auto b = static_cast<unsigned char>(ch);
    if (shift > 28) throw FormatError("token varint too long");
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if (b & 0x80) {
      shift += 7;
      continue;
    }
    if (v >= vocab_size) throw FormatError("token id " + std::to_string(v) + " outside the vocabulary");
    tokens.push_back(static_cast<TokenId>(v));
    v = 0;
    shift = 0;
  }
  if (shift != 0 || tokens.size() != count) throw FormatError("token stream does not match its sidecar");
  return tokens;
}

TextCorpus decode_text(std::string_view utf8) {
  std::vector<std::uint32_t> points;
  points.reserve(utf8.size());
  for (std::size_t i = 0; i < utf8.size();) {
    const auto lead = static_cast<unsigned char>(utf8[i]);
    std::size_t len = utf8_length(lead);
    std::uint32_t cp = 0xfffd;
    bool ok = len > 0 && i + len <= utf8.size();
    if (ok) {
      cp = len == 1 ? lead : len == 2 ? (lead & 0x1f) : len == 3 ? (lead & 0x0f) : (lead & 0x07);
      for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(utf8[i + k]);
        if ((b >> 6) != 0x2) {
          ok = false;
          break;
        }
        cp = (cp << 6) | (b & 0x3f);
      }
    }
    if (!ok) {
      cp = 0xfffd;
      len = 1;
    }
    points.push_back(cp);
    i += len;
  }
  std::set<std::uint32_t> distinct(points.begin(), points.end());
  if (distinct.size() > 65536) throw CapacityError("text has more distinct characters than symbols allow");
  std::map<std::uint32_t, Symbol> index;
  std::vector<std::string> labels;
  for (std::uint32_t cp : distinct) {
    index.emplace(cp, static_cast<Symbol>(labels.size()));
    std::string s;
    if (cp < 0x80) {
      s.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      s.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      s.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      s.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      s.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      s.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      s.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      s.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
    labels.push_back(std::move(s));
  }
  TextCorpus corpus{Alphabet(std::move(labels)), {}};
  corpus.symbols.reserve(points.size());
  for (std::uint32_t cp : points) corpus.symbols.push_back(index.at(cp));
  return corpus;
}

std::uint64_t config_hash(const Json& config) { return fnv1a64(config.dump()); }

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header) : columns_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path);
  if (!out_) throw DataError("cannot write " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw FormatError("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out_ << '"';
      for (char ch : c) {
        if (ch == '"') out_ << '"';
        out_ << ch;
      }
      out_ << '"';
    } else {
      out_ << c;
    }
  }
  out_ << '\n';
}

void CsvWriter::finish(const Json& config, const std::vector<std::uint64_t>& seeds) {
  out_ << "# config_hash=" << hex64(config_hash(config)) << '\n';
  out_ << "# seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i) out_ << (i ? ";" : "") << seeds[i];
  out_ << '\n' << "# version=" << kArtifactVersion << '\n';
  out_.close();
}

}  // namespace fincontext
