#pragma once

// Greedy unit decoding. Each unconsumed token heads a fresh composition; the
// following tokens inside the lookahead window are scored one by one and
// consumed when the MWE score clears the threshold for the unit's current
// length. Rejected tokens stay available and may become gap tokens.

#include <algorithm>
#include <string>
#include <vector>

#include "semunit/corpus.hpp"
#include "semunit/embeddings.hpp"
#include "semunit/features.hpp"
#include "semunit/network.hpp"

namespace semunit {

struct DecodeConfig {
  double theta_start = -0.15;  // accepting the second member
  double theta_extend = 0.0;   // accepting the third and later members
  int lookahead = 9;
  int max_depth = 2;  // 1: contiguous units only; 2: one unit may sit in another's gap

  void validate() const {
    if (lookahead < 1) throw UsageError("lookahead must be at least 1");
    if (max_depth != 1 && max_depth != 2) throw UsageError("max_depth must be 1 or 2");
  }
};

// Index of the highest score; ties go to the lowest index.
inline int argmax_sense(const VectorXd& scores) {
  int best = 0;
  for (int k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

inline std::vector<SemanticUnit> predict_sentence(const ModelParams& params, const SentenceFeatures& sf,
                                                  const std::vector<std::string>& sense_inventory,
                                                  const DecodeConfig& dc) {
  dc.validate();
  if (static_cast<int>(sense_inventory.size()) != params.config.n_senses) {
    throw UsageError("sense inventory does not match the network");
  }
  const int n = sf.size();
  std::vector<char> consumed(static_cast<std::size_t>(n) + 1, 0);
  // Tokens left inside the gap of an earlier unit.
  std::vector<char> in_gap(static_cast<std::size_t>(n) + 1, 0);
  const auto aux = aux_input(params, sf);
  std::vector<SemanticUnit> units;

  for (int head = 1; head <= n; ++head) {
    if (consumed[static_cast<std::size_t>(head)]) continue;
    consumed[static_cast<std::size_t>(head)] = 1;
    const bool nested = in_gap[static_cast<std::size_t>(head)] != 0;
    const bool gaps_allowed = dc.max_depth == 2 && !nested;

    SemanticUnit unit;
    unit.positions.push_back(head);
    CompositionState state = extend_unit(params, sf, start_composition(params), 0, head);
    int last = head;
    for (int cand = head + 1; cand <= n && cand - last <= dc.lookahead; ++cand) {
      // Jumping over a consumed token would cross the unit that owns it.
      if (consumed[static_cast<std::size_t>(cand)]) break;
      if (!gaps_allowed && cand != last + 1) break;
      CompositionState next = extend_unit(params, sf, state, last, cand);
      const double score = mwe_forward(params, next.v, classifier_distance(params, sf, last, cand), aux).score;
      const double theta = unit.size() == 1 ? dc.theta_start : dc.theta_extend;
      if (score > theta) {
        for (int g = last + 1; g < cand; ++g) in_gap[static_cast<std::size_t>(g)] = 1;
        consumed[static_cast<std::size_t>(cand)] = 1;
        unit.positions.push_back(cand);
        state = std::move(next);
        last = cand;
      }
    }
    const SenseOutput senses = sense_forward(params, state.v, aux);
    unit.sense = sense_inventory[static_cast<std::size_t>(argmax_sense(senses.scores))];
    units.push_back(std::move(unit));
  }
  return units;
}

inline std::vector<SemanticUnit> predict_sentence(const ModelParams& params, const Sentence& s,
                                                  const EmbeddingTable& table, const FeatureConfig& fc,
                                                  const std::vector<std::string>& sense_inventory,
                                                  const DecodeConfig& dc) {
  const SentenceFeatures sf(s, table, fc);
  return predict_sentence(params, sf, sense_inventory, dc);
}

// Copies `input` with its tag and supersense columns replaced by predictions.
inline Corpus predict_corpus(const ModelParams& params, const Corpus& input, const EmbeddingTable& table,
                             const FeatureConfig& fc, const std::vector<std::string>& sense_inventory,
                             const DecodeConfig& dc) {
  Corpus out = input;
  for (Sentence& s : out.sentences) {
    apply_units(s, predict_sentence(params, s, table, fc, sense_inventory, dc));
  }
  rebuild_sense_inventory(out);
  return out;
}

}  // namespace semunit
