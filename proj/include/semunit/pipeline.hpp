#pragma once

// End-to-end helpers tying corpus, parses, embeddings, training and decoding.

#include <fstream>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "semunit/corpus.hpp"
#include "semunit/embeddings.hpp"
#include "semunit/features.hpp"
#include "semunit/model_io.hpp"
#include "semunit/network.hpp"
#include "semunit/parse.hpp"
#include "semunit/predictor.hpp"
#include "semunit/trainer.hpp"

namespace semunit {

struct PipelineConfig {
  NetworkConfig network;
  FeatureConfig features;
  TrainConfig train;
  DecodeConfig decode;
};

inline void attach_parses(Corpus& corpus, std::vector<DependencyParse> parses) {
  if (parses.size() != corpus.sentences.size()) {
    throw DataError("parse file has " + std::to_string(parses.size()) + " sentences, corpus has " +
                    std::to_string(corpus.sentences.size()));
  }
  for (std::size_t k = 0; k < parses.size(); ++k) {
    Sentence& s = corpus.sentences[k];
    if (parses[k].size() != s.size()) {
      throw DataError("sentence " + s.sent_id + ": parse has " + std::to_string(parses[k].size()) +
                      " tokens, corpus has " + std::to_string(s.size()));
    }
    s.parse = std::move(parses[k]);
  }
}

inline Corpus read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path);
  return read_corpus(in);
}

inline std::vector<DependencyParse> read_parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open parse file " + path);
  return read_parses(in);
}

// Every form the lookup cascade may try for the corpus, for filtering large
// embedding files down to what is needed.
inline std::unordered_set<std::string> lookup_vocabulary(const std::vector<const Corpus*>& corpora) {
  std::unordered_set<std::string> vocab{"NUM"};
  for (const Corpus* c : corpora) {
    for (const auto& s : c->sentences) {
      for (const auto& t : s.tokens) {
        for (auto& form : lookup_candidates(t.surface, t.lemma, true)) vocab.insert(std::move(form));
      }
    }
  }
  return vocab;
}

// Fills in the corpus-dependent network sizes and trains.
inline Model train_model(const Corpus& corpus, const EmbeddingTable& table, PipelineConfig cfg,
                         const std::function<void(const EpochStats&)>& on_epoch = {},
                         std::vector<EpochStats>* epochs = nullptr) {
  cfg.network.pos_tags = collect_pos_tags(corpus);
  cfg.network.n_senses = static_cast<int>(corpus.sense_inventory.size());
  cfg.network.embedding_dim = table.dim();
  cfg.network.hash_dim = cfg.features.hash_dim;
  TrainResult r = train(corpus, table, cfg.network, cfg.features, cfg.train, on_epoch);
  if (epochs) *epochs = std::move(r.epochs);
  return Model{std::move(r.params), cfg.features, corpus.sense_inventory};
}

inline Corpus predict(const Model& model, const Corpus& input, const EmbeddingTable& table,
                      const DecodeConfig& decode) {
  if (table.dim() != model.params.config.embedding_dim) {
    throw DataError("embedding dimension " + std::to_string(table.dim()) + " does not match the model's " +
                    std::to_string(model.params.config.embedding_dim));
  }
  return predict_corpus(model.params, input, table, model.features, model.sense_inventory, decode);
}

}  // namespace semunit
