#pragma once

// Run configuration: every setting has a key usable in a key=value config
// file (one pair per line, '#' starts a comment) and as a --flag.

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "semunit/error.hpp"
#include "semunit/pipeline.hpp"
#include "semunit/text.hpp"

namespace semunit {

struct RunConfig {
  PipelineConfig pipeline;
  int holdout = 5;  // ablate without --test: every k-th sentence is held out
  std::string corpus;
  std::string parses;
  std::string test;
  std::string test_parses;
  std::string embeddings;
  std::string model;
  std::string output;
  std::string metrics;
  std::string official_eval_script;
};

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

namespace detail {

inline bool parse_bool(const std::string& v) {
  const std::string s = to_lower_ascii(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got \"" + v + "\"");
}

inline int parse_int_value(const std::string& v) {
  int out = 0;
  if (!parse_int(v, out)) throw ConfigError("expected an integer, got \"" + v + "\"");
  return out;
}

inline double parse_double_value(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected a number, got \"" + v + "\"");
  return out;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct ConfigKey {
  std::string name;
  std::string help;
  bool is_bool = false;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

}  // namespace detail

// All recognised keys, in dump order.
inline const std::vector<detail::ConfigKey>& config_keys() {
  using detail::ConfigKey;
  using detail::parse_bool;
  using detail::parse_double_value;
  using detail::parse_int_value;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  auto i = [](auto v) { return std::to_string(v); };
  static const std::vector<ConfigKey> keys = {
      {"seed", "random seed for initialization, sampling and shuffling", false,
       [](RunConfig& c, const std::string& v) {
         std::uint64_t s = 0;
         const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
         if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("expected an unsigned seed");
         c.pipeline.train.rng_seed = s;
       },
       [i](const RunConfig& c) { return i(c.pipeline.train.rng_seed); }},
      {"epochs", "training epochs", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.train.epochs = parse_int_value(v); },
       [i](const RunConfig& c) { return i(c.pipeline.train.epochs); }},
      {"lr", "SGD learning rate", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.train.lr = parse_double_value(v); },
       [](const RunConfig& c) { return detail::format_double(c.pipeline.train.lr); }},
      {"lookahead", "window L for negative sampling and decoding", false,
       [](RunConfig& c, const std::string& v) {
         c.pipeline.train.lookahead = parse_int_value(v);
         c.pipeline.decode.lookahead = c.pipeline.train.lookahead;
       },
       [i](const RunConfig& c) { return i(c.pipeline.train.lookahead); }},
      {"neg-prob-cap", "cap on per-candidate negative selection probability", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.train.neg_prob_cap = parse_double_value(v); },
       [](const RunConfig& c) { return detail::format_double(c.pipeline.train.neg_prob_cap); }},
      {"downweight", "negative cap realization: accept | loss", false,
       [](RunConfig& c, const std::string& v) {
         if (v == "accept") c.pipeline.train.downweight = Downweight::accept;
         else if (v == "loss") c.pipeline.train.downweight = Downweight::loss;
         else throw ConfigError("downweight must be accept or loss");
       },
       [](const RunConfig& c) { return std::string(c.pipeline.train.downweight == Downweight::accept ? "accept" : "loss"); }},
      {"shuffle", "shuffle sentences every epoch", true,
       [](RunConfig& c, const std::string& v) { c.pipeline.train.shuffle = parse_bool(v); },
       [b](const RunConfig& c) { return b(c.pipeline.train.shuffle); }},
      {"composition-size", "incremental vector size M", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.network.composition_size = parse_int_value(v); },
       [i](const RunConfig& c) { return i(c.pipeline.network.composition_size); }},
      {"mwe-hidden", "hidden width of the MWE perceptron", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.network.mwe_hidden = parse_int_value(v); },
       [i](const RunConfig& c) { return i(c.pipeline.network.mwe_hidden); }},
      {"sense-hidden", "hidden width of the sense perceptron", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.network.sense_hidden = parse_int_value(v); },
       [i](const RunConfig& c) { return i(c.pipeline.network.sense_hidden); }},
      {"distance-into-composer", "feed distance features to the composer instead of the MWE perceptron", true,
       [](RunConfig& c, const std::string& v) { c.pipeline.network.distance_into_composer = parse_bool(v); },
       [b](const RunConfig& c) { return b(c.pipeline.network.distance_into_composer); }},
      {"mean-vector", "sentence-mean embedding as extra perceptron input", true,
       [](RunConfig& c, const std::string& v) { c.pipeline.network.mean_vector_feature = parse_bool(v); },
       [b](const RunConfig& c) { return b(c.pipeline.network.mean_vector_feature); }},
      {"bias", "bias terms in composer and perceptrons", true,
       [](RunConfig& c, const std::string& v) { c.pipeline.network.bias = parse_bool(v); },
       [b](const RunConfig& c) { return b(c.pipeline.network.bias); }},
      {"hash-dim", "character hash size (power of two <= 64)", false,
       [](RunConfig& c, const std::string& v) {
         const int d = parse_int_value(v);
         if (d < 1 || d > 64 || (d & (d - 1)) != 0) throw UsageError("hash-dim must be a power of two <= 64");
         c.pipeline.features.hash_dim = d;
       },
       [i](const RunConfig& c) { return i(c.pipeline.features.hash_dim); }},
      {"hash-mode", "hash words: all_words | unknown_only", false,
       [](RunConfig& c, const std::string& v) {
         if (v == "all_words") c.pipeline.features.hash_mode = HashMode::all_words;
         else if (v == "unknown_only") c.pipeline.features.hash_mode = HashMode::unknown_only;
         else throw ConfigError("hash-mode must be all_words or unknown_only");
       },
       [](const RunConfig& c) {
         return std::string(c.pipeline.features.hash_mode == HashMode::all_words ? "all_words" : "unknown_only");
       }},
      {"hash-chars", "characters hashed: all | alpha", false,
       [](RunConfig& c, const std::string& v) {
         if (v == "all") c.pipeline.features.hash_alpha_only = false;
         else if (v == "alpha") c.pipeline.features.hash_alpha_only = true;
         else throw ConfigError("hash-chars must be all or alpha");
       },
       [](const RunConfig& c) { return std::string(c.pipeline.features.hash_alpha_only ? "alpha" : "all"); }},
      {"lemmatize", "try the lemma column during embedding lookup", true,
       [](RunConfig& c, const std::string& v) { c.pipeline.features.lemmatize = parse_bool(v); },
       [b](const RunConfig& c) { return b(c.pipeline.features.lemmatize); }},
      {"gap-mode", "Gap feature: intervening (j-i-1) | offset (j-i)", false,
       [](RunConfig& c, const std::string& v) {
         if (v == "intervening") c.pipeline.features.gap_mode = GapMode::intervening;
         else if (v == "offset") c.pipeline.features.gap_mode = GapMode::offset;
         else throw ConfigError("gap-mode must be intervening or offset");
       },
       [](const RunConfig& c) {
         return std::string(c.pipeline.features.gap_mode == GapMode::intervening ? "intervening" : "offset");
       }},
      {"theta-start", "MWE score threshold for the second member", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.decode.theta_start = parse_double_value(v); },
       [](const RunConfig& c) { return detail::format_double(c.pipeline.decode.theta_start); }},
      {"theta-extend", "MWE score threshold for third and later members", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.decode.theta_extend = parse_double_value(v); },
       [](const RunConfig& c) { return detail::format_double(c.pipeline.decode.theta_extend); }},
      {"max-depth", "unit nesting depth: 1 (contiguous) or 2", false,
       [](RunConfig& c, const std::string& v) { c.pipeline.decode.max_depth = parse_int_value(v); },
       [i](const RunConfig& c) { return i(c.pipeline.decode.max_depth); }},
      {"holdout", "ablate: hold out every k-th sentence when no test corpus is given", false,
       [](RunConfig& c, const std::string& v) { c.holdout = parse_int_value(v); },
       [i](const RunConfig& c) { return i(c.holdout); }},
      {"corpus", "corpus file", false, [](RunConfig& c, const std::string& v) { c.corpus = v; },
       [](const RunConfig& c) { return c.corpus; }},
      {"parses", "dependency parse file aligned with the corpus", false,
       [](RunConfig& c, const std::string& v) { c.parses = v; }, [](const RunConfig& c) { return c.parses; }},
      {"test", "held-out corpus for ablate", false, [](RunConfig& c, const std::string& v) { c.test = v; },
       [](const RunConfig& c) { return c.test; }},
      {"test-parses", "parse file aligned with the held-out corpus", false,
       [](RunConfig& c, const std::string& v) { c.test_parses = v; },
       [](const RunConfig& c) { return c.test_parses; }},
      {"embeddings", "word2vec file (binary or text)", false,
       [](RunConfig& c, const std::string& v) { c.embeddings = v; },
       [](const RunConfig& c) { return c.embeddings; }},
      {"model", "model file", false, [](RunConfig& c, const std::string& v) { c.model = v; },
       [](const RunConfig& c) { return c.model; }},
      {"output", "output file (standard output when empty)", false,
       [](RunConfig& c, const std::string& v) { c.output = v; }, [](const RunConfig& c) { return c.output; }},
      {"metrics", "key=value metrics file", false, [](RunConfig& c, const std::string& v) { c.metrics = v; },
       [](const RunConfig& c) { return c.metrics; }},
      {"official-eval-script", "external scorer run alongside eval", false,
       [](RunConfig& c, const std::string& v) { c.official_eval_script = v; },
       [](const RunConfig& c) { return c.official_eval_script; }},
  };
  return keys;
}

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      try {
        k.set(c, value);
      } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
      }
      return;
    }
  }
  throw ConfigError("unknown config key \"" + key + "\"");
}

// Keys may be written with '-' or '_'.
inline void apply_config_file(RunConfig& c, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string_view body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    std::string key(trim(body.substr(0, eq)));
    for (char& ch : key) {
      if (ch == '_') ch = '-';
    }
    try {
      set_config_value(c, key, std::string(trim(body.substr(eq + 1))));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline void dump_config(const RunConfig& c, std::ostream& out) {
  for (const auto& k : config_keys()) out << k.name << '=' << k.get(c) << '\n';
}

}  // namespace semunit
