#pragma once

// Model file layout (all integers little-endian):
//
//   magic     8 bytes  "SEMUNIT\0"
//   version   u8       currently 1
//   config    u32 byte length + UTF-8 key=value lines
//   pos tags  u32 count, then u32 length + bytes per tag (OTHER is implicit)
//   senses    u32 count, then u32 length + bytes per label
//   tensors   u32 count, then per tensor: u32 name length + name,
//             u32 rows, u32 cols, rows*cols float32 in row-major order
//
// Tensors appear in ModelParams::visit order.

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "semunit/error.hpp"
#include "semunit/features.hpp"
#include "semunit/network.hpp"
#include "semunit/text.hpp"

namespace semunit {

inline constexpr std::array<char, 8> kModelMagic = {'S', 'E', 'M', 'U', 'N', 'I', 'T', '\0'};
inline constexpr std::uint8_t kModelVersion = 1;

// Everything prediction needs: parameters plus the feature settings and
// label inventory they were trained with.
struct Model {
  ModelParams params;
  FeatureConfig features;
  std::vector<std::string> sense_inventory;
};

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

inline void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void put_f32(std::ostream& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  put_u32(out, bits);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw DataError("model file truncated");
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

inline std::string get_string(std::istream& in) {
  const std::uint32_t n = get_u32(in);
  if (n > (1u << 28)) throw DataError("model file: implausible string length");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (static_cast<std::uint32_t>(in.gcount()) != n) throw DataError("model file truncated");
  return s;
}

inline float get_f32(std::istream& in) {
  const std::uint32_t bits = get_u32(in);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

inline const char* bool_str(bool b) { return b ? "true" : "false"; }

inline std::string model_config_text(const Model& m) {
  const NetworkConfig& c = m.params.config;
  const FeatureConfig& f = m.features;
  std::ostringstream os;
  os << "composition_size=" << c.composition_size << '\n'
     << "embedding_dim=" << c.embedding_dim << '\n'
     << "hash_dim=" << c.hash_dim << '\n'
     << "word_feature_dim=" << c.word_feature_dim << '\n'
     << "distance_dim=" << c.distance_dim << '\n'
     << "mwe_hidden=" << c.mwe_hidden << '\n'
     << "sense_hidden=" << c.sense_hidden << '\n'
     << "n_senses=" << c.n_senses << '\n'
     << "distance_into_composer=" << bool_str(c.distance_into_composer) << '\n'
     << "mean_vector=" << bool_str(c.mean_vector_feature) << '\n'
     << "bias=" << bool_str(c.bias) << '\n'
     << "recurrency=" << bool_str(c.recurrency) << '\n'
     << "hash_mode=" << (f.hash_mode == HashMode::all_words ? "all_words" : "unknown_only") << '\n'
     << "hash_chars=" << (f.hash_alpha_only ? "alpha" : "all") << '\n'
     << "lemmatize=" << bool_str(f.lemmatize) << '\n'
     << "gap_mode=" << (f.gap_mode == GapMode::intervening ? "intervening" : "offset") << '\n'
     << "use_embeddings=" << bool_str(f.use_embeddings) << '\n'
     << "use_hash=" << bool_str(f.use_hash) << '\n'
     << "use_heuristic=" << bool_str(f.use_heuristic) << '\n'
     << "use_distance=" << bool_str(f.use_distance) << '\n';
  return os.str();
}

inline std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[std::string(trim(std::string_view(line).substr(0, eq)))] = std::string(trim(std::string_view(line).substr(eq + 1)));
  }
  return kv;
}

}  // namespace detail

inline void save_model(const Model& m, std::ostream& out) {
  out.write(kModelMagic.data(), kModelMagic.size());
  out.put(static_cast<char>(kModelVersion));
  detail::put_string(out, detail::model_config_text(m));
  detail::put_u32(out, static_cast<std::uint32_t>(m.params.config.pos_tags.size()));
  for (const auto& t : m.params.config.pos_tags) detail::put_string(out, t);
  detail::put_u32(out, static_cast<std::uint32_t>(m.sense_inventory.size()));
  for (const auto& s : m.sense_inventory) detail::put_string(out, s);
  std::uint32_t count = 0;
  m.params.visit([&](const std::string&, const MatrixXd&) { ++count; });
  detail::put_u32(out, count);
  m.params.visit([&](const std::string& name, const MatrixXd& mat) {
    detail::put_string(out, name);
    detail::put_u32(out, static_cast<std::uint32_t>(mat.rows()));
    detail::put_u32(out, static_cast<std::uint32_t>(mat.cols()));
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index c = 0; c < mat.cols(); ++c) detail::put_f32(out, static_cast<float>(mat(r, c)));
    }
  });
  if (!out) throw DataError("failed writing model");
}

inline Model load_model(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kModelMagic) {
    throw DataError("not a model file (bad magic)");
  }
  const int version = in.get();
  if (version != kModelVersion) throw DataError("unsupported model version " + std::to_string(version));

  const auto kv = detail::parse_kv(detail::get_string(in));
  auto get = [&kv](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw DataError("model config lacks " + key);
    return it->second;
  };
  auto get_int = [&](const std::string& key) {
    int v = 0;
    if (!parse_int(get(key), v)) throw DataError("model config: bad integer for " + key);
    return v;
  };
  auto get_bool = [&](const std::string& key) { return get(key) == "true"; };

  Model m;
  NetworkConfig c;
  c.composition_size = get_int("composition_size");
  c.embedding_dim = get_int("embedding_dim");
  c.hash_dim = get_int("hash_dim");
  c.word_feature_dim = get_int("word_feature_dim");
  c.distance_dim = get_int("distance_dim");
  c.mwe_hidden = get_int("mwe_hidden");
  c.sense_hidden = get_int("sense_hidden");
  c.n_senses = get_int("n_senses");
  c.distance_into_composer = get_bool("distance_into_composer");
  c.mean_vector_feature = get_bool("mean_vector");
  c.bias = get_bool("bias");
  c.recurrency = get_bool("recurrency");
  m.features.hash_dim = c.hash_dim;
  m.features.hash_mode = get("hash_mode") == "all_words" ? HashMode::all_words : HashMode::unknown_only;
  m.features.hash_alpha_only = get("hash_chars") == "alpha";
  m.features.lemmatize = get_bool("lemmatize");
  m.features.gap_mode = get("gap_mode") == "offset" ? GapMode::offset : GapMode::intervening;
  m.features.use_embeddings = get_bool("use_embeddings");
  m.features.use_hash = get_bool("use_hash");
  m.features.use_heuristic = get_bool("use_heuristic");
  m.features.use_distance = get_bool("use_distance");

  const std::uint32_t n_pos = detail::get_u32(in);
  for (std::uint32_t k = 0; k < n_pos; ++k) c.pos_tags.push_back(detail::get_string(in));
  const std::uint32_t n_senses = detail::get_u32(in);
  for (std::uint32_t k = 0; k < n_senses; ++k) m.sense_inventory.push_back(detail::get_string(in));
  if (static_cast<int>(m.sense_inventory.size()) != c.n_senses) throw DataError("model sense inventory size mismatch");

  m.params = ModelParams::zeros(c);
  std::uint32_t expected = 0;
  m.params.visit([&](const std::string&, const MatrixXd&) { ++expected; });
  if (detail::get_u32(in) != expected) throw DataError("model tensor count mismatch");
  m.params.visit([&](const std::string& name, MatrixXd& mat) {
    if (detail::get_string(in) != name) throw DataError("model tensor order mismatch at " + name);
    const std::uint32_t rows = detail::get_u32(in);
    const std::uint32_t cols = detail::get_u32(in);
    if (rows != static_cast<std::uint32_t>(mat.rows()) || cols != static_cast<std::uint32_t>(mat.cols())) {
      throw DataError("model tensor " + name + " has unexpected shape");
    }
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index col = 0; col < mat.cols(); ++col) mat(r, col) = detail::get_f32(in);
    }
  });
  return m;
}

inline void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  save_model(m, out);
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  return load_model(in);
}

}  // namespace semunit
