#pragma once

// Per-word and per-pair input features: the character hash vector, the
// heuristic word features and the inter-word distance features.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semunit/corpus.hpp"
#include "semunit/embeddings.hpp"
#include "semunit/error.hpp"
#include "semunit/parse.hpp"
#include "semunit/text.hpp"

namespace semunit {

inline constexpr int kWordFeatureDim = 15;
inline constexpr int kDistanceFeatureDim = 4;

// Heuristic word feature layout.
enum WordFeature : int {
  kCapFirst, kCapNorm, kCapRatio, kHasNAlpha, kHasNum, kHasPrime, kIsAt, kIsHash,
  kIsNum, kIsPunct, kIsUnk, kIsUrl, kLogRange, kQuotPre, kQuotPost
};

inline constexpr std::array<std::string_view, kWordFeatureDim> kWordFeatureNames = {
    "Cap-First", "Cap-Norm", "Cap-Ratio", "Has-NAlpha", "Has-Num", "Has-Prime", "Is-At", "Is-Hash",
    "Is-Num", "Is-Punct", "Is-Unk", "Is-Url", "Log-Range", "Quot-Pre", "Quot-Post"};

enum DistanceFeature : int { kGap, kParDist, kParParent, kInterQt };

inline constexpr std::array<std::string_view, kDistanceFeatureDim> kDistanceFeatureNames = {
    "Gap", "Par-Dist", "Par-Parent", "Inter-Qt"};

enum class HashMode { unknown_only, all_words };
enum class GapMode { intervening, offset };

struct FeatureConfig {
  int hash_dim = 16;
  HashMode hash_mode = HashMode::all_words;
  bool hash_alpha_only = false;
  bool lemmatize = true;
  GapMode gap_mode = GapMode::intervening;
  // Ablation switches: a disabled family is fed as zeros.
  bool use_embeddings = true;
  bool use_hash = true;
  bool use_heuristic = true;
  bool use_distance = true;
};

// FNV-1a 64 followed by the splitmix64 finalizer.
inline std::uint64_t mix_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

inline Eigen::VectorXd char_hash(std::string_view word, int dim, bool alpha_only) {
  if (dim < 1 || dim > 64 || (dim & (dim - 1)) != 0) {
    throw UsageError("hash dimension must be a power of two no larger than 64");
  }
  const std::string kept = alpha_only ? keep_alpha(word) : std::string(word);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(dim, -1.0);
  if (kept.empty()) return v;
  const std::uint64_t h = mix_hash(kept);
  for (int d = 0; d < dim; ++d) {
    if ((h >> d) & 1U) v[d] = 1.0;
  }
  return v;
}

inline Eigen::VectorXd word_hash_feature(std::string_view word, bool lookup_found, HashMode mode, int dim,
                                         bool alpha_only) {
  if (mode == HashMode::unknown_only && lookup_found) return Eigen::VectorXd::Zero(dim);
  return char_hash(word, dim, alpha_only);
}

inline bool is_quote_token(std::string_view w) {
  return w == "\"" || w == "\xE2\x80\x9C" || w == "\xE2\x80\x9D" || w == "``" || w == "''";
}

inline bool has_punctuation(std::string_view w) {
  if (w.find_first_of("!?.,;:{}[]()/\"") != std::string_view::npos) return true;
  return is_quote_token(w) || w.find("\xE2\x80\x9C") != std::string_view::npos ||
         w.find("\xE2\x80\x9D") != std::string_view::npos;
}

inline double sign_feature(bool b) { return b ? 1.0 : -1.0; }

// The 15 heuristic features of token `i` (1-based).
inline Eigen::VectorXd word_features(const Sentence& s, int i, const LookupResult& lookup) {
  if (i < 1 || i > s.size()) throw UsageError("word_features: token index out of range");
  const std::string& w = s.token(i).surface;
  Eigen::VectorXd f(kWordFeatureDim);

  const bool cap_first = !w.empty() && is_upper_byte(static_cast<unsigned char>(w.front()));
  int letters = 0;
  int upper = 0;
  bool non_alpha = false;
  bool digit = false;
  for (char ch : w) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_alpha_byte(c)) {
      ++letters;
      if (is_upper_byte(c)) ++upper;
    } else {
      non_alpha = true;
    }
    if (is_digit_byte(c)) digit = true;
  }

  f[kCapFirst] = sign_feature(cap_first);
  f[kCapNorm] = (cap_first ? 1.0 : 0.0) / static_cast<double>(s.size());
  f[kCapRatio] = letters == 0 ? 0.0 : static_cast<double>(upper) / letters;
  f[kHasNAlpha] = sign_feature(non_alpha);
  f[kHasNum] = sign_feature(digit);
  f[kHasPrime] = sign_feature(w.find('\'') != std::string::npos ||
                              w.find("\xE2\x80\x99") != std::string::npos);
  f[kIsAt] = sign_feature(!w.empty() && w.front() == '@');
  f[kIsHash] = sign_feature(!w.empty() && w.front() == '#');
  f[kIsNum] = sign_feature(is_number(w) || w == "NUM");
  f[kIsPunct] = sign_feature(has_punctuation(w));
  f[kIsUnk] = sign_feature(!lookup.found);
  f[kIsUrl] = sign_feature(w == "URL");
  f[kLogRange] = log_range(lookup.rank);
  f[kQuotPre] = sign_feature(i > 1 && is_quote_token(s.token(i - 1).surface));
  f[kQuotPost] = sign_feature(i < s.size() && is_quote_token(s.token(i + 1).surface));
  return f;
}

// Max of the edge counts from i and from j up to their lowest common
// ancestor; the virtual root 0 is an ancestor of every token.
inline int hierarchical_distance(const DependencyParse& parse, int i, int j) {
  const int n = parse.size();
  if (i == j || i < 1 || j < 1 || i > n || j > n) {
    throw UsageError("hierarchical_distance: need two distinct tokens of the parse");
  }
  auto chain = [&](int t) {
    std::vector<int> path{t};
    while (t != 0) {
      if (static_cast<int>(path.size()) > n + 1) throw DataError("parse contains a head cycle");
      t = parse.head_of(t);
      if (t < 0 || t > n) throw DataError("parse head out of range");
      path.push_back(t);
    }
    return path;
  };
  const auto up_i = chain(i);
  const auto up_j = chain(j);
  std::vector<int> depth_in_i(static_cast<std::size_t>(n) + 1, -1);
  for (std::size_t k = 0; k < up_i.size(); ++k) depth_in_i[static_cast<std::size_t>(up_i[k])] = static_cast<int>(k);
  for (std::size_t k = 0; k < up_j.size(); ++k) {
    const int d = depth_in_i[static_cast<std::size_t>(up_j[k])];
    if (d >= 0) return std::max(d, static_cast<int>(k));
  }
  throw DataError("parse has no common root");  // unreachable for validated parses
}

inline double par_dist_grade(int hierarchical) {
  if (hierarchical <= 1) return 2.0;
  if (hierarchical == 2) return 0.0;
  return -1.5;
}

inline Eigen::VectorXd distance_features(const Sentence& s, const std::optional<DependencyParse>& parse, int i,
                                         int j, GapMode gap_mode = GapMode::intervening) {
  if (i >= j || i < 1 || j > s.size()) throw UsageError("distance_features: need 1 <= i < j <= n");
  Eigen::VectorXd f(kDistanceFeatureDim);
  const int gap = gap_mode == GapMode::intervening ? j - i - 1 : j - i;
  f[kGap] = gap / 8.0;
  if (parse) {
    f[kParDist] = par_dist_grade(hierarchical_distance(*parse, i, j));
    f[kParParent] = sign_feature(parse->head_of(i) == j || parse->head_of(j) == i);
  } else {
    f[kParDist] = -1.5;
    f[kParParent] = -1.0;
  }
  bool quote = false;
  for (int k = i + 1; k < j && !quote; ++k) quote = is_quote_token(s.token(k).surface);
  f[kInterQt] = sign_feature(quote);
  return f;
}

// Composer inputs for one token.
struct TokenFeatures {
  Eigen::VectorXd embedding;
  Eigen::VectorXd hash;
  Eigen::VectorXd heuristic;
  std::string pos;
};

// Everything the network reads from one sentence. Holds a reference to the
// sentence for on-demand pair features.
class SentenceFeatures {
 public:
  SentenceFeatures(const Sentence& s, const EmbeddingTable& table, const FeatureConfig& cfg)
      : sentence_(&s), cfg_(cfg) {
    tokens_.reserve(s.tokens.size());
    mean_ = Eigen::VectorXd::Zero(table.dim());
    for (int i = 1; i <= s.size(); ++i) {
      const Token& t = s.token(i);
      const LookupResult lk = lookup(table, t.surface, t.lemma, cfg.lemmatize);
      TokenFeatures tf;
      tf.embedding = cfg.use_embeddings ? lk.vector : Eigen::VectorXd::Zero(table.dim());
      tf.hash = cfg.use_hash ? word_hash_feature(t.surface, lk.found, cfg.hash_mode, cfg.hash_dim, cfg.hash_alpha_only)
                             : Eigen::VectorXd::Zero(cfg.hash_dim);
      tf.heuristic = cfg.use_heuristic ? word_features(s, i, lk) : Eigen::VectorXd::Zero(kWordFeatureDim);
      tf.pos = t.pos;
      mean_ += tf.embedding;
      tokens_.push_back(std::move(tf));
    }
    if (!tokens_.empty()) mean_ /= static_cast<double>(tokens_.size());
  }

  int size() const { return static_cast<int>(tokens_.size()); }
  const TokenFeatures& token(int i) const { return tokens_.at(static_cast<std::size_t>(i - 1)); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Sentence& sentence() const { return *sentence_; }

  Eigen::VectorXd pair(int i, int j) const {
    if (!cfg_.use_distance) return Eigen::VectorXd::Zero(kDistanceFeatureDim);
    return distance_features(*sentence_, sentence_->parse, i, j, cfg_.gap_mode);
  }

 private:
  const Sentence* sentence_;
  FeatureConfig cfg_;
  std::vector<TokenFeatures> tokens_;
  Eigen::VectorXd mean_;
};

}  // namespace semunit
