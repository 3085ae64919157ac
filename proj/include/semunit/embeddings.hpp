#pragma once

// Pretrained word2vec tables (binary or text), the normalizing lookup cascade,
// and the frequency-rank feature derived from file order.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "semunit/corpus.hpp"
#include "semunit/error.hpp"
#include "semunit/text.hpp"

namespace semunit {

inline constexpr double kLogRangeMax = 12.0;

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim) : dim_(dim) {
    if (dim <= 0) throw DataError("embedding dimension must be positive");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }

  // Appends a record with the given frequency rank.
  void add(std::string word, std::span<const float> values, std::int64_t rank) {
    if (static_cast<int>(values.size()) != dim_) throw DataError("embedding record has wrong dimension");
    const auto row = static_cast<std::int64_t>(ranks_.size());
    if (!index_.emplace(std::move(word), row).second) return;  // first occurrence wins
    data_.insert(data_.end(), values.begin(), values.end());
    ranks_.push_back(rank);
  }
  void add(std::string word, std::span<const float> values) {
    add(std::move(word), values, static_cast<std::int64_t>(ranks_.size()));
  }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  std::optional<std::int64_t> rank(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return ranks_[static_cast<std::size_t>(it->second)];
  }

  std::span<const float> values(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return {};
    return {data_.data() + it->second * dim_, static_cast<std::size_t>(dim_)};
  }

 private:
  int dim_ = 0;
  std::unordered_map<std::string, std::int64_t> index_;
  std::vector<float> data_;
  std::vector<std::int64_t> ranks_;
};

enum class EmbeddingFormat { automatic, binary, text };

namespace detail {

inline bool looks_like_text_floats(std::string_view bytes) {
  for (char c : bytes) {
    if (!(is_digit_byte(static_cast<unsigned char>(c)) || c == ' ' || c == '.' || c == '-' ||
          c == '+' || c == 'e' || c == 'E' || c == '\n' || c == '\r' || c == '\t')) {
      return false;
    }
  }
  return true;
}

inline float read_le_float(const char* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) |
                       static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8 |
                       static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 16 |
                       static_cast<std::uint32_t>(static_cast<unsigned char>(p[3])) << 24;
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline bool parse_float(std::string_view s, float& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

// Loads a word2vec file. Ranks are record positions in the file, kept even
// when `vocab_filter` drops records.
inline EmbeddingTable load_embeddings(std::istream& in,
                                      const std::unordered_set<std::string>* vocab_filter = nullptr,
                                      EmbeddingFormat format = EmbeddingFormat::automatic) {
  auto here = [&in]() -> std::streamoff {
    in.clear();
    return static_cast<std::streamoff>(in.tellg());
  };
  auto fail = [&](const std::string& what, std::streamoff at) {
    throw DataError("embeddings at byte " + std::to_string(static_cast<long long>(at)) + ": " + what);
  };

  std::string header;
  if (!std::getline(in, header)) fail("empty file", 0);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto head_fields = detail::split_ws(header);
  std::int64_t count = -1;
  int dim = 0;
  bool has_header = false;
  if (head_fields.size() == 2) {
    int c = 0;
    if (parse_int(head_fields[0], c) && parse_int(head_fields[1], dim)) {
      count = c;
      has_header = true;
      if (count < 0) fail("negative record count", 0);
      if (dim <= 0) fail("dimension must be positive", 0);
    }
  }
  if (!has_header) {
    if (format == EmbeddingFormat::binary) fail("binary file without \"<count> <dim>\" header", 0);
    format = EmbeddingFormat::text;
    dim = static_cast<int>(head_fields.size()) - 1;
    if (dim <= 0) fail("cannot infer dimension from first record", 0);
    in.clear();
    in.seekg(0);
  }
  const std::streamoff body_start = in.tellg();

  if (format == EmbeddingFormat::automatic) {
    std::string word;
    char c;
    while (in.get(c) && (c == '\n' || c == ' ')) {}
    if (in) {
      word.push_back(c);
      while (in.get(c) && c != ' ') word.push_back(c);
    }
    std::string probe(static_cast<std::size_t>(std::min(dim * 4, 4096)), '\0');
    in.read(probe.data(), static_cast<std::streamsize>(probe.size()));
    probe.resize(static_cast<std::size_t>(in.gcount()));
    if (const auto eol = probe.find('\n'); eol != std::string::npos) probe.resize(eol);
    format = detail::looks_like_text_floats(probe) ? EmbeddingFormat::text : EmbeddingFormat::binary;
    in.clear();
    in.seekg(body_start);
  }

  EmbeddingTable table(dim);
  std::vector<float> values(static_cast<std::size_t>(dim));
  std::int64_t record = 0;

  if (format == EmbeddingFormat::binary) {
    std::vector<char> raw(static_cast<std::size_t>(dim) * 4);
    for (; record < count; ++record) {
      std::string word;
      char c;
      while (in.get(c) && (c == '\n' || c == ' ')) {}
      if (!in) fail("truncated file: expected " + std::to_string(count) + " records, found " + std::to_string(record), here());
      word.push_back(c);
      while (in.get(c) && c != ' ') word.push_back(c);
      if (!in) fail("truncated record for word \"" + word + "\"", here());
      const std::streamoff at = in.tellg();
      in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
      if (in.gcount() != static_cast<std::streamsize>(raw.size())) fail("truncated vector for word \"" + word + "\"", at);
      if (vocab_filter && !vocab_filter->count(word)) continue;
      for (int k = 0; k < dim; ++k) values[static_cast<std::size_t>(k)] = detail::read_le_float(raw.data() + 4 * k);
      table.add(std::move(word), values, record);
    }
    return table;
  }

  std::string line;
  while (true) {
    const std::streamoff at = in.tellg();
    if (!std::getline(in, line)) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = detail::split_ws(line);
    if (static_cast<int>(f.size()) != dim + 1) {
      fail("record has " + std::to_string(f.size() - 1) + " values, expected " + std::to_string(dim), at);
    }
    if (has_header && record >= count) fail("more records than the header declares", at);
    const std::string word(f[0]);
    if (!vocab_filter || vocab_filter->count(word)) {
      for (int k = 0; k < dim; ++k) {
        if (!detail::parse_float(f[static_cast<std::size_t>(k) + 1], values[static_cast<std::size_t>(k)])) {
          fail("malformed float in record for \"" + word + "\"", at);
        }
      }
      table.add(word, values, record);
    }
    ++record;
  }
  if (has_header && record != count) {
    in.clear();
    fail("truncated file: header declares " + std::to_string(count) + " records, found " + std::to_string(record), here());
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path,
                                      const std::unordered_set<std::string>* vocab_filter = nullptr,
                                      EmbeddingFormat format = EmbeddingFormat::automatic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file " + path);
  return load_embeddings(in, vocab_filter, format);
}

struct LookupResult {
  Eigen::VectorXd vector;  // zero-filled when not found
  bool found = false;
  std::optional<std::int64_t> rank;
};

// The normalized forms tried by `lookup`, in order.
inline std::vector<std::string> lookup_candidates(std::string_view surface, std::string_view lemma,
                                                  bool lemmatize) {
  std::vector<std::string> out;
  const auto first = surface.find_first_not_of("#@");
  const std::string stripped(first == std::string_view::npos ? std::string_view{} : surface.substr(first));
  out.push_back(stripped);
  if (is_number(stripped)) out.emplace_back("NUM");
  const std::string lowered = to_lower_ascii(stripped);
  out.push_back(lowered);
  if (lemmatize) out.emplace_back(lemma);
  out.push_back(keep_alpha(lowered));
  return out;
}

inline LookupResult lookup(const EmbeddingTable& table, std::string_view surface, std::string_view lemma,
                           bool lemmatize) {
  LookupResult r;
  r.vector = Eigen::VectorXd::Zero(table.dim());
  for (const std::string& cand : lookup_candidates(surface, lemma, lemmatize)) {
    if (cand.empty()) continue;
    const auto v = table.values(cand);
    if (v.empty()) continue;
    for (int k = 0; k < table.dim(); ++k) r.vector[k] = v[static_cast<std::size_t>(k)];
    r.found = true;
    r.rank = table.rank(cand);
    return r;
  }
  return r;
}

inline Eigen::VectorXd sentence_mean(const EmbeddingTable& table, const Sentence& s, bool lemmatize) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim());
  if (s.tokens.empty()) return sum;
  for (const Token& t : s.tokens) sum += lookup(table, t.surface, t.lemma, lemmatize).vector;
  return sum / static_cast<double>(s.tokens.size());
}

// ln(0.1 * rank + 1), clamped to [0, 12]; unknown words get the maximum.
inline double log_range(std::optional<std::int64_t> rank) {
  if (!rank) return kLogRangeMax;
  return std::min(kLogRangeMax, std::log(0.1 * static_cast<double>(*rank) + 1.0));
}

}  // namespace semunit
