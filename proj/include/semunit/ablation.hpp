#pragma once

// Feature-family ablation: retrain with one input family disabled and score
// on held-out data.

#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "semunit/evaluator.hpp"
#include "semunit/pipeline.hpp"

namespace semunit {

enum class FeatureFamily { none, recurrency, heuristic, distance, word_hash, embeddings };

inline const std::vector<FeatureFamily>& ablation_families() {
  static const std::vector<FeatureFamily> families = {FeatureFamily::recurrency, FeatureFamily::heuristic,
                                                      FeatureFamily::distance, FeatureFamily::word_hash,
                                                      FeatureFamily::embeddings};
  return families;
}

inline std::string family_label(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::none: return "baseline";
    case FeatureFamily::recurrency: return "-Recurrency";
    case FeatureFamily::heuristic: return "-Heuristic";
    case FeatureFamily::distance: return "-Distance";
    case FeatureFamily::word_hash: return "-Word hash";
    case FeatureFamily::embeddings: return "-word2vec";
  }
  return "?";
}

inline PipelineConfig without(PipelineConfig cfg, FeatureFamily f) {
  switch (f) {
    case FeatureFamily::none: break;
    case FeatureFamily::recurrency: cfg.network.recurrency = false; break;
    case FeatureFamily::heuristic: cfg.features.use_heuristic = false; break;
    case FeatureFamily::distance: cfg.features.use_distance = false; break;
    case FeatureFamily::word_hash: cfg.features.use_hash = false; break;
    case FeatureFamily::embeddings: cfg.features.use_embeddings = false; break;
  }
  return cfg;
}

struct AblationRow {
  FeatureFamily family = FeatureFamily::none;
  ScoreReport report;
};

// Baseline first, then one row per family in the order of ablation_families().
inline std::vector<AblationRow> ablate(const Corpus& train_corpus, const Corpus& test_corpus,
                                       const EmbeddingTable& table, const PipelineConfig& cfg,
                                       const std::function<void(const std::string&)>& progress = {}) {
  std::vector<FeatureFamily> runs{FeatureFamily::none};
  runs.insert(runs.end(), ablation_families().begin(), ablation_families().end());
  std::vector<AblationRow> rows;
  for (FeatureFamily f : runs) {
    if (progress) progress(family_label(f));
    const PipelineConfig run_cfg = without(cfg, f);
    const Model model = train_model(train_corpus, table, run_cfg);
    const Corpus pred = predict(model, test_corpus, table, run_cfg.decode);
    rows.push_back({f, score(test_corpus, pred)});
  }
  return rows;
}

// Splits off every k-th sentence (k >= 2) as held-out data.
inline std::pair<Corpus, Corpus> holdout_split(const Corpus& c, int every) {
  if (every < 2) throw UsageError("holdout interval must be at least 2");
  Corpus train_part;
  Corpus test_part;
  for (std::size_t k = 0; k < c.sentences.size(); ++k) {
    ((k + 1) % static_cast<std::size_t>(every) == 0 ? test_part : train_part).sentences.push_back(c.sentences[k]);
  }
  // Both halves share the full inventory so the network sees every label.
  train_part.sense_inventory = c.sense_inventory;
  test_part.sense_inventory = c.sense_inventory;
  return {train_part, test_part};
}

inline void print_ablation(const std::vector<AblationRow>& rows, std::ostream& out) {
  out << std::left << std::setw(14) << "Ablated" << std::right;
  for (const char* group : {"MWE", "Supersense", "Combined"}) out << std::setw(27) << group;
  out << '\n' << std::left << std::setw(14) << "features" << std::right;
  for (int g = 0; g < 3; ++g) out << std::setw(9) << "Prec" << std::setw(9) << "Recall" << std::setw(9) << "F1";
  out << '\n';
  for (const auto& row : rows) {
    out << std::left << std::setw(14) << family_label(row.family) << std::right << std::fixed;
    for (const Prf* p : {&row.report.mwe, &row.report.supersense, &row.report.combined}) {
      out << std::setprecision(4) << std::setw(9) << p->precision << std::setw(9) << p->recall << std::setw(8)
          << std::setprecision(2) << p->f1 * 100.0 << '%';
    }
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

}  // namespace semunit
