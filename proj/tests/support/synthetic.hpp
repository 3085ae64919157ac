#pragma once

// Synthetic corpus with planted two-word MWEs ("mk<k> pt<k>", sense k) among
// filler words whose sense is carried only by their embedding cluster.
// Filler vocabulary is indexed so that train and held-out data can draw from
// disjoint word sets.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "semunit/corpus.hpp"
#include "semunit/embeddings.hpp"
#include "semunit/features.hpp"
#include "semunit/parse.hpp"

namespace semunit::testkit {

struct SyntheticOptions {
  int sentences = 50;
  int min_length = 6;
  int max_length = 12;
  int embedding_dim = 8;
  int vocab_begin = 0;  // filler word indices drawn from [vocab_begin, vocab_end)
  int vocab_end = 30;
  double noise = 0.25;
  std::uint64_t seed = 7;
  bool with_parses = true;
};

inline const std::vector<std::string>& synthetic_senses() {
  static const std::vector<std::string> senses = {"n.animal", "n.artifact", "v.motion", "v.cognition"};
  return senses;
}

struct SyntheticWord {
  std::string form;
  std::string pos;
  int cluster;  // 0..3 sense clusters, 4 function words, 5 pair partners
};

inline std::string filler_form(int cluster, int k) {
  static const char* const stems[] = {"anim", "arti", "movo", "cogi", "fun"};
  return std::string(stems[cluster]) + "x" + std::to_string(k);
}

inline const char* cluster_pos(int cluster) {
  switch (cluster) {
    case 0:
    case 1: return "NOUN";
    case 2:
    case 3: return "VERB";
    case 4: return "DET";
    default: return "ADP";
  }
}

// Deterministic embedding for a word: its cluster direction plus noise keyed
// to the word form.
inline std::vector<float> synthetic_vector(const std::string& form, int cluster, int dim, double noise) {
  std::seed_seq seq(form.begin(), form.end());
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, noise);
  std::vector<float> v(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    v[static_cast<std::size_t>(d)] = static_cast<float>((d == cluster % dim ? 1.0 : 0.0) + gauss(rng));
  }
  return v;
}

struct SyntheticData {
  Corpus corpus;
  EmbeddingTable table;
  std::size_t planted = 0;
};

inline void add_vocabulary(EmbeddingTable& table, const SyntheticOptions& o, int begin, int end) {
  for (int cluster = 0; cluster < 5; ++cluster) {
    for (int k = begin; k < end; ++k) {
      const std::string f = filler_form(cluster, k);
      table.add(f, synthetic_vector(f, cluster, o.embedding_dim, o.noise));
    }
  }
  for (int k = 0; k < 4; ++k) {
    const std::string mk = "mk" + std::to_string(k);
    const std::string pt = "pt" + std::to_string(k);
    table.add(mk, synthetic_vector(mk, k, o.embedding_dim, o.noise));
    table.add(pt, synthetic_vector(pt, 5, o.embedding_dim, o.noise));
  }
}

inline SyntheticData make_synthetic(const SyntheticOptions& o) {
  SyntheticData data{Corpus{}, EmbeddingTable(o.embedding_dim), 0};
  add_vocabulary(data.table, o, o.vocab_begin, o.vocab_end);

  std::mt19937_64 rng(o.seed);
  auto uniform = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  for (int sid = 0; sid < o.sentences; ++sid) {
    const int len = uniform(o.min_length, o.max_length);
    const int n_pairs = uniform(1, 2);
    std::vector<int> pair_at;  // first position (0-based) of each planted pair
    for (int p = 0; p < n_pairs; ++p) {
      const int at = uniform(0, len - 2);
      bool clash = false;
      for (int q : pair_at) clash = clash || std::abs(q - at) < 2;
      if (!clash) pair_at.push_back(at);
    }

    Sentence s;
    s.sent_id = "syn." + std::to_string(sid);
    std::vector<int> heads(static_cast<std::size_t>(len), 0);
    int root = -1;
    for (int i = 0; i < len; ++i) {
      Token t;
      t.index = i + 1;
      t.sent_id = s.sent_id;
      int pair_kind = -1;
      bool partner = false;
      for (int q : pair_at) {
        if (q == i) pair_kind = 0;
        if (q + 1 == i) partner = true;
      }
      if (pair_kind == 0) {
        const int k = uniform(0, 3);
        t.surface = "mk" + std::to_string(k);
        t.pos = "VERB";
        t.mwe_tag = 'B';
        t.supersense = synthetic_senses()[static_cast<std::size_t>(k)];
        ++data.planted;
      } else if (partner) {
        const std::string& prev = s.tokens.back().surface;
        t.surface = "pt" + prev.substr(2);
        t.pos = "ADP";
        t.mwe_tag = 'I';
        t.mwe_parent = i;
        heads[static_cast<std::size_t>(i)] = i;  // head is the marker (1-based i)
      } else {
        const int cluster = uniform(0, 4);
        t.surface = filler_form(cluster, uniform(o.vocab_begin, o.vocab_end - 1));
        t.pos = cluster_pos(cluster);
        if (cluster < 4) t.supersense = synthetic_senses()[static_cast<std::size_t>(cluster)];
      }
      t.lemma = t.surface;
      if (root < 0 && t.pos == std::string("VERB") && !partner) root = i;
      s.tokens.push_back(std::move(t));
    }
    if (root < 0) root = 0;
    for (int i = 0; i < len; ++i) {
      if (heads[static_cast<std::size_t>(i)] != 0) continue;
      heads[static_cast<std::size_t>(i)] = i == root ? 0 : root + 1;
    }
    if (o.with_parses) s.parse = DependencyParse{heads};
    data.corpus.sentences.push_back(std::move(s));
  }
  rebuild_sense_inventory(data.corpus);
  return data;
}

// word2vec text serialization of a table built by make_synthetic.
inline std::string synthetic_embedding_text(const SyntheticOptions& o, int begin, int end) {
  EmbeddingTable table(o.embedding_dim);
  add_vocabulary(table, o, begin, end);
  std::vector<std::string> words;
  for (int cluster = 0; cluster < 5; ++cluster) {
    for (int k = begin; k < end; ++k) words.push_back(filler_form(cluster, k));
  }
  for (int k = 0; k < 4; ++k) {
    words.push_back("mk" + std::to_string(k));
    words.push_back("pt" + std::to_string(k));
  }
  std::ostringstream os;
  os << words.size() << ' ' << o.embedding_dim << '\n';
  os.precision(9);
  for (const auto& w : words) {
    os << w;
    for (float f : table.values(w)) os << ' ' << f;
    os << '\n';
  }
  return os.str();
}

inline std::string parses_text(const Corpus& c) {
  std::ostringstream os;
  for (const auto& s : c.sentences) {
    for (int i = 1; i <= s.size(); ++i) {
      os << i << '\t' << s.token(i).surface << '\t' << s.token(i).pos << '\t' << s.parse->head_of(i) << '\n';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace semunit::testkit
