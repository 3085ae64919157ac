#pragma once

// Training: incremental positive boundary samples, windowed negative samples,
// once-per-unit sense samples, squared-error losses and the online SGD loop.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "semunit/corpus.hpp"
#include "semunit/embeddings.hpp"
#include "semunit/error.hpp"
#include "semunit/features.hpp"
#include "semunit/network.hpp"

namespace semunit {

// How the cap on per-candidate negative selection probability is enforced.
enum class Downweight { accept, loss };

struct TrainConfig {
  int epochs = 10;
  double lr = 0.01;
  std::uint64_t rng_seed = 1;
  int lookahead = 9;
  double neg_prob_cap = 0.25;
  int sense_error_divisor = 0;  // 0: number of senses
  bool shuffle = true;
  Downweight downweight = Downweight::accept;

  void validate() const {
    if (epochs < 0) throw UsageError("epochs must be non-negative");
    if (lookahead < 1) throw UsageError("lookahead must be at least 1");
    if (!(neg_prob_cap > 0.0 && neg_prob_cap <= 1.0)) throw UsageError("neg_prob_cap must be in (0, 1]");
    if (!(lr > 0.0)) throw UsageError("learning rate must be positive");
    if (sense_error_divisor < 0) throw UsageError("sense_error_divisor must be non-negative");
  }
};

struct BoundarySample {
  std::vector<int> prefix;  // members composing v_{n-1}
  int candidate = 0;
  double target = 0.0;  // +1 or -1
  double weight = 1.0;
};

struct SenseSample {
  SemanticUnit unit;
  int target_index = 0;
};

// Positives: every unit of n >= 2 members yields n-1 prefix extensions.
// Negatives: each token w draws one candidate uniformly from the tokens at
// most `lookahead` positions ahead that are not in w's unit, extending the
// unit prefix that ends at w. With fewer than 1/cap eligible candidates the
// draw is kept with probability |E| * cap (or kept at that weight), so no
// single candidate is chosen with probability above the cap.
template <typename Rng>
std::vector<BoundarySample> generate_boundary_samples(const Sentence& s, const std::vector<SemanticUnit>& units,
                                                      Rng& rng, int lookahead = 9, double neg_prob_cap = 0.25,
                                                      Downweight mode = Downweight::accept) {
  const int n = s.size();
  std::vector<int> unit_of(static_cast<std::size_t>(n) + 1, -1);
  std::vector<int> rank_in_unit(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t k = 0; k < units[u].positions.size(); ++k) {
      const int p = units[u].positions[k];
      unit_of[static_cast<std::size_t>(p)] = static_cast<int>(u);
      rank_in_unit[static_cast<std::size_t>(p)] = static_cast<int>(k);
    }
  }

  std::vector<BoundarySample> out;
  for (const SemanticUnit& unit : units) {
    for (std::size_t k = 1; k < unit.positions.size(); ++k) {
      out.push_back({std::vector<int>(unit.positions.begin(), unit.positions.begin() + static_cast<std::ptrdiff_t>(k)),
                     unit.positions[k], 1.0, 1.0});
    }
  }

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<int> eligible;
  for (int w = 1; w <= n; ++w) {
    const int u = unit_of[static_cast<std::size_t>(w)];
    eligible.clear();
    for (int c = w + 1; c <= std::min(n, w + lookahead); ++c) {
      if (unit_of[static_cast<std::size_t>(c)] != u) eligible.push_back(c);
    }
    if (eligible.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    const int candidate = eligible[pick(rng)];
    const double keep = std::min(1.0, static_cast<double>(eligible.size()) * neg_prob_cap);
    double weight = 1.0;
    if (keep < 1.0) {
      if (mode == Downweight::accept) {
        if (coin(rng) >= keep) continue;
      } else {
        weight = keep;
      }
    }
    const auto& members = units[static_cast<std::size_t>(u)].positions;
    const auto upto = static_cast<std::ptrdiff_t>(rank_in_unit[static_cast<std::size_t>(w)]) + 1;
    out.push_back({std::vector<int>(members.begin(), members.begin() + upto), candidate, -1.0, weight});
  }
  return out;
}

inline std::vector<SenseSample> generate_sense_samples(const std::vector<SemanticUnit>& units,
                                                       const std::vector<std::string>& inventory) {
  std::vector<SenseSample> out;
  out.reserve(units.size());
  for (const SemanticUnit& unit : units) {
    const auto it = std::find(inventory.begin(), inventory.end(), unit.sense);
    if (it == inventory.end()) throw DataError("sense \"" + unit.sense + "\" is not in the sense inventory");
    out.push_back({unit, static_cast<int>(it - inventory.begin())});
  }
  return out;
}

struct ScalarLoss {
  double loss = 0.0;
  double grad = 0.0;
};

struct VectorLoss {
  double loss = 0.0;
  VectorXd grad;
};

inline ScalarLoss mwe_loss(double score, double target, double weight = 1.0) {
  const double diff = score - target;
  return {weight * diff * diff / 2.0, weight * diff};
}

// Squared error against a +1/-1 one-hot target, divided by `divisor` (the
// number of senses) so the sense head does not swamp the boundary head.
inline VectorLoss sense_loss(const VectorXd& scores, int target_index, int divisor = 0) {
  if (target_index < 0 || target_index >= scores.size()) throw UsageError("sense_loss: target out of range");
  const double div = divisor > 0 ? divisor : static_cast<double>(scores.size());
  VectorXd target = VectorXd::Constant(scores.size(), -1.0);
  target[target_index] = 1.0;
  const VectorXd diff = scores - target;
  return {diff.squaredNorm() / (2.0 * div), diff / div};
}

struct EpochStats {
  int epoch = 0;
  double mean_mwe_loss = 0.0;
  double mean_sense_loss = 0.0;
  std::size_t positive_samples = 0;
  std::size_t negative_samples = 0;
  std::size_t sense_samples = 0;

  std::string summary() const {
    std::ostringstream os;
    os << "epoch " << epoch << " mwe_loss=" << mean_mwe_loss << " sense_loss=" << mean_sense_loss
       << " positives=" << positive_samples << " negatives=" << negative_samples
       << " sense_samples=" << sense_samples;
    return os.str();
  }
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> epochs;
};

// Distinct POS tags of the corpus in order of first appearance.
inline std::vector<std::string> collect_pos_tags(const Corpus& corpus) {
  std::vector<std::string> tags;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.tokens) {
      if (std::find(tags.begin(), tags.end(), t.pos) == tags.end() && t.pos != kOtherPos) tags.push_back(t.pos);
    }
  }
  return tags;
}

// One online update for a boundary sample; returns its loss.
inline double train_boundary_sample(ModelParams& params, const SentenceFeatures& sf, const BoundarySample& b,
                                    double lr) {
  CompositionState state = compose_members(params, sf, b.prefix);
  const int last = b.prefix.back();
  state = extend_unit(params, sf, std::move(state), last, b.candidate);
  const MweOutput out = mwe_forward(params, state.v, classifier_distance(params, sf, last, b.candidate),
                                    aux_input(params, sf));
  const ScalarLoss l = mwe_loss(out.score, b.target, b.weight);
  if (!std::isfinite(l.loss)) throw DataError("non-finite MWE loss in sentence " + sf.sentence().sent_id);
  const Gradients g = backward(params, state, MweGradient{out, l.grad}, std::nullopt);
  sgd_update(params, g, lr);
  return l.loss;
}

inline double train_sense_sample(ModelParams& params, const SentenceFeatures& sf, const SenseSample& s, double lr,
                                 int divisor) {
  const CompositionState state = compose_members(params, sf, s.unit.positions);
  const SenseOutput out = sense_forward(params, state.v, aux_input(params, sf));
  const VectorLoss l = sense_loss(out.scores, s.target_index, divisor);
  if (!std::isfinite(l.loss)) throw DataError("non-finite sense loss in sentence " + sf.sentence().sent_id);
  const Gradients g = backward(params, state, std::nullopt, SenseGradient{out, l.grad});
  sgd_update(params, g, lr);
  return l.loss;
}

// Online SGD over the corpus. Parses, when present, travel with each
// sentence. Deterministic for a fixed rng_seed.
inline TrainResult train(const Corpus& corpus, const EmbeddingTable& table, const NetworkConfig& net_config,
                         const FeatureConfig& feature_config, const TrainConfig& tc,
                         const std::function<void(const EpochStats&)>& on_epoch = {}) {
  tc.validate();
  if (net_config.n_senses != static_cast<int>(corpus.sense_inventory.size())) {
    throw UsageError("network sense count does not match the corpus sense inventory");
  }
  if (net_config.embedding_dim != table.dim() || net_config.hash_dim != feature_config.hash_dim) {
    throw UsageError("network input sizes do not match the embedding table / hash size");
  }
  TrainResult result{init_params(net_config, tc.rng_seed), {}};
  ModelParams& params = result.params;
  std::mt19937_64 sampler(tc.rng_seed ^ 0x5DEECE66DULL);

  std::vector<std::size_t> order(corpus.sentences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    if (tc.shuffle) {
      std::mt19937_64 perm(tc.rng_seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(epoch));
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), perm);
    }
    EpochStats stats;
    stats.epoch = epoch;
    double mwe_total = 0.0;
    double sense_total = 0.0;
    for (std::size_t idx : order) {
      const Sentence& s = corpus.sentences[idx];
      const SentenceFeatures sf(s, table, feature_config);
      const auto units = units_from_tags(s);
      auto boundary = generate_boundary_samples(s, units, sampler, tc.lookahead, tc.neg_prob_cap, tc.downweight);
      const auto senses = generate_sense_samples(units, corpus.sense_inventory);

      // Interleave by head position: boundary samples of a head, then its sense.
      std::stable_sort(boundary.begin(), boundary.end(),
                       [](const BoundarySample& a, const BoundarySample& b) { return a.prefix.front() < b.prefix.front(); });
      std::size_t bi = 0;
      for (const SenseSample& ss : senses) {
        while (bi < boundary.size() && boundary[bi].prefix.front() <= ss.unit.first()) {
          mwe_total += train_boundary_sample(params, sf, boundary[bi], tc.lr);
          (boundary[bi].target > 0 ? stats.positive_samples : stats.negative_samples) += 1;
          ++bi;
        }
        sense_total += train_sense_sample(params, sf, ss, tc.lr, tc.sense_error_divisor);
        ++stats.sense_samples;
      }
      for (; bi < boundary.size(); ++bi) {
        mwe_total += train_boundary_sample(params, sf, boundary[bi], tc.lr);
        (boundary[bi].target > 0 ? stats.positive_samples : stats.negative_samples) += 1;
      }
    }
    const std::size_t nb = stats.positive_samples + stats.negative_samples;
    stats.mean_mwe_loss = nb ? mwe_total / static_cast<double>(nb) : 0.0;
    stats.mean_sense_loss = stats.sense_samples ? sense_total / static_cast<double>(stats.sense_samples) : 0.0;
    result.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

}  // namespace semunit
