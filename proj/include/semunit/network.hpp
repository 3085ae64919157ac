#pragma once

// The incremental unit-vector composer and the two tanh perceptrons that
// read it (MWE boundary scorer, sense classifier), with hand-written
// backpropagation and plain SGD.
//
// Composition of the n-th member w of a candidate unit, with p = POS(w):
//
//   v_n = tanh(Wv[p] e(w) + Wh[p] h(w) + Wf f(w) + Wc[p] v_{n-1} [+ Wd d] + b[p])
//
// where v_0 is the learned seed vector and d is the distance feature vector
// between the previous member and w (only when distances feed the composer).
// All matrices map a feature space into the M-dimensional composition space
// and are stored M x feature_dim.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "semunit/error.hpp"
#include "semunit/features.hpp"

namespace semunit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr std::string_view kOtherPos = "OTHER";

struct NetworkConfig {
  int composition_size = 300;  // M
  int embedding_dim = 300;
  int hash_dim = 16;
  int word_feature_dim = kWordFeatureDim;
  int distance_dim = kDistanceFeatureDim;
  int mwe_hidden = 1024;
  int sense_hidden = 256;
  int n_senses = 42;
  // Known tags; index pos_tags.size() is the OTHER fallback.
  std::vector<std::string> pos_tags;
  bool distance_into_composer = true;
  bool mean_vector_feature = true;
  bool bias = true;
  // When off, every step composes against the seed instead of v_{n-1}.
  bool recurrency = true;

  int n_pos() const { return static_cast<int>(pos_tags.size()) + 1; }

  int pos_index(std::string_view tag) const {
    for (std::size_t k = 0; k < pos_tags.size(); ++k) {
      if (pos_tags[k] == tag) return static_cast<int>(k);
    }
    return static_cast<int>(pos_tags.size());
  }

  int mwe_input_dim() const {
    return composition_size + (distance_into_composer ? 0 : distance_dim) +
           (mean_vector_feature ? embedding_dim : 0);
  }
  int sense_input_dim() const { return composition_size + (mean_vector_feature ? embedding_dim : 0); }

  void validate() const {
    if (composition_size < 1 || embedding_dim < 1 || hash_dim < 1 || word_feature_dim < 1 ||
        distance_dim < 1 || mwe_hidden < 1 || sense_hidden < 1 || n_senses < 1) {
      throw UsageError("network sizes must all be at least 1");
    }
  }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct PosBlock {
  MatrixXd word;   // M x D_v
  MatrixXd hash;   // M x D_h
  MatrixXd recur;  // M x M
  MatrixXd bias;   // M x 1
};

// Two-layer tanh perceptron: out = tanh(w2 tanh(w1 x + b1) + b2).
struct Perceptron {
  MatrixXd w1;
  MatrixXd b1;
  MatrixXd w2;
  MatrixXd b2;

  bool empty() const { return w1.size() == 0; }
};

struct ModelParams {
  NetworkConfig config;
  std::vector<PosBlock> pos;
  MatrixXd feat;  // M x D_f, shared across POS
  MatrixXd dist;  // M x D_d, empty unless distances feed the composer
  MatrixXd seed;  // M x 1
  Perceptron mwe;
  Perceptron sense;

  static ModelParams zeros(const NetworkConfig& cfg) {
    cfg.validate();
    const int m = cfg.composition_size;
    ModelParams p;
    p.config = cfg;
    p.pos.resize(static_cast<std::size_t>(cfg.n_pos()));
    for (auto& b : p.pos) {
      b.word = MatrixXd::Zero(m, cfg.embedding_dim);
      b.hash = MatrixXd::Zero(m, cfg.hash_dim);
      b.recur = MatrixXd::Zero(m, m);
      b.bias = MatrixXd::Zero(m, 1);
    }
    p.feat = MatrixXd::Zero(m, cfg.word_feature_dim);
    p.dist = cfg.distance_into_composer ? MatrixXd::Zero(m, cfg.distance_dim) : MatrixXd(m, 0);
    p.seed = MatrixXd::Zero(m, 1);
    p.mwe = {MatrixXd::Zero(cfg.mwe_hidden, cfg.mwe_input_dim()), MatrixXd::Zero(cfg.mwe_hidden, 1),
             MatrixXd::Zero(1, cfg.mwe_hidden), MatrixXd::Zero(1, 1)};
    p.sense = {MatrixXd::Zero(cfg.sense_hidden, cfg.sense_input_dim()), MatrixXd::Zero(cfg.sense_hidden, 1),
               MatrixXd::Zero(cfg.n_senses, cfg.sense_hidden), MatrixXd::Zero(cfg.n_senses, 1)};
    return p;
  }

  // Calls f(name, matrix) for every parameter tensor in serialization order.
  template <typename F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <typename F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& self, F& f) {
    for (std::size_t k = 0; k < self.pos.size(); ++k) {
      const std::string tag =
          k < self.config.pos_tags.size() ? self.config.pos_tags[k] : std::string(kOtherPos);
      f("pos." + tag + ".word", self.pos[k].word);
      f("pos." + tag + ".hash", self.pos[k].hash);
      f("pos." + tag + ".recur", self.pos[k].recur);
      f("pos." + tag + ".bias", self.pos[k].bias);
    }
    f(std::string("feat"), self.feat);
    f(std::string("dist"), self.dist);
    f(std::string("seed"), self.seed);
    f(std::string("mwe.w1"), self.mwe.w1);
    f(std::string("mwe.b1"), self.mwe.b1);
    f(std::string("mwe.w2"), self.mwe.w2);
    f(std::string("mwe.b2"), self.mwe.b2);
    f(std::string("sense.w1"), self.sense.w1);
    f(std::string("sense.b1"), self.sense.b1);
    f(std::string("sense.w2"), self.sense.w2);
    f(std::string("sense.b2"), self.sense.b2);
  }
};

// Gradients of one sample. Per-POS blocks exist only for tags the sample
// used and perceptron blocks only for the heads it ran; everything absent is
// an implicit zero.
struct Gradients {
  std::map<int, PosBlock> pos;
  MatrixXd feat;
  MatrixXd dist;
  MatrixXd seed;
  Perceptron mwe;
  Perceptron sense;
  VectorXd d_unit;  // d loss / d v_n, the gradient entering the composer

  // Calls f(name, param, grad_or_null) pairing each parameter tensor with its
  // gradient, in the same order as ModelParams::visit.
  template <typename F>
  void pair_with(ModelParams& params, F&& f) const {
    std::size_t slot = 0;
    std::vector<const MatrixXd*> grads;
    for (std::size_t k = 0; k < params.pos.size(); ++k) {
      const auto it = pos.find(static_cast<int>(k));
      if (it == pos.end()) {
        grads.insert(grads.end(), 4, nullptr);
      } else {
        grads.push_back(&it->second.word);
        grads.push_back(&it->second.hash);
        grads.push_back(&it->second.recur);
        grads.push_back(&it->second.bias);
      }
    }
    auto opt = [](const MatrixXd& m) -> const MatrixXd* { return m.size() ? &m : nullptr; };
    for (const MatrixXd* m : {&feat, &dist, &seed, &mwe.w1, &mwe.b1, &mwe.w2, &mwe.b2, &sense.w1, &sense.b1,
                              &sense.w2, &sense.b2}) {
      grads.push_back(opt(*m));
    }
    params.visit([&](const std::string& name, MatrixXd& p) { f(name, p, grads[slot++]); });
  }
};

inline ModelParams init_params(const NetworkConfig& cfg, std::uint64_t rng_seed) {
  ModelParams p = ModelParams::zeros(cfg);
  std::mt19937_64 rng(rng_seed);
  auto fill = [&rng](MatrixXd& m) {
    if (m.size() == 0) return;
    const double r = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    std::uniform_real_distribution<double> dist(-r, r);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  };
  for (auto& b : p.pos) {
    fill(b.word);
    fill(b.hash);
    fill(b.recur);
  }
  fill(p.feat);
  fill(p.dist);
  fill(p.mwe.w1);
  fill(p.mwe.w2);
  fill(p.sense.w1);
  fill(p.sense.w2);
  return p;
}

struct CompositionStep {
  int pos = 0;
  VectorXd embedding;
  VectorXd hash;
  VectorXd heuristic;
  std::optional<VectorXd> distance;
  VectorXd prev;  // the vector multiplied by Wc[pos]
  VectorXd out;
};

struct CompositionState {
  VectorXd v;
  int n = 0;
  std::vector<CompositionStep> tape;
};

inline CompositionState start_composition(const ModelParams& params) {
  return {params.seed.col(0), 0, {}};
}

inline CompositionState compose_step(const ModelParams& params, CompositionState state, const TokenFeatures& word,
                                     const std::optional<VectorXd>& distance = std::nullopt) {
  const NetworkConfig& cfg = params.config;
  if (word.embedding.size() != cfg.embedding_dim || word.hash.size() != cfg.hash_dim ||
      word.heuristic.size() != cfg.word_feature_dim) {
    throw UsageError("compose_step: word feature dimensions do not match the network");
  }
  const bool wants_distance = cfg.distance_into_composer && state.n >= 1;
  if (wants_distance != distance.has_value()) {
    throw UsageError(wants_distance ? "compose_step: distance features required"
                                    : "compose_step: unexpected distance features");
  }
  if (distance && distance->size() != cfg.distance_dim) {
    throw UsageError("compose_step: distance feature dimension mismatch");
  }

  CompositionStep step;
  step.pos = cfg.pos_index(word.pos);
  const PosBlock& block = params.pos[static_cast<std::size_t>(step.pos)];
  step.embedding = word.embedding;
  step.hash = word.hash;
  step.heuristic = word.heuristic;
  step.distance = distance;
  step.prev = (state.n == 0 || !cfg.recurrency) ? VectorXd(params.seed.col(0)) : state.v;

  VectorXd pre = block.word * step.embedding + block.hash * step.hash + params.feat * step.heuristic +
                 block.recur * step.prev;
  if (distance) pre.noalias() += params.dist * *distance;
  if (cfg.bias) pre += block.bias.col(0);
  step.out = pre.array().tanh().matrix();

  state.v = step.out;
  state.n += 1;
  state.tape.push_back(std::move(step));
  return state;
}

namespace detail {

inline VectorXd concat(std::initializer_list<const VectorXd*> parts) {
  Eigen::Index n = 0;
  for (const VectorXd* p : parts) {
    if (p) n += p->size();
  }
  VectorXd out(n);
  Eigen::Index at = 0;
  for (const VectorXd* p : parts) {
    if (!p) continue;
    out.segment(at, p->size()) = *p;
    at += p->size();
  }
  return out;
}

}  // namespace detail

struct MweOutput {
  double score = 0.0;
  VectorXd input;
  VectorXd hidden;
};

struct SenseOutput {
  VectorXd scores;
  VectorXd input;
  VectorXd hidden;
};

// `distance` is required exactly when distances do not feed the composer;
// `aux` (the sentence-mean embedding) exactly when the mean feature is on.
inline MweOutput mwe_forward(const ModelParams& params, const VectorXd& v, const std::optional<VectorXd>& distance,
                             const std::optional<VectorXd>& aux) {
  const NetworkConfig& cfg = params.config;
  if (v.size() != cfg.composition_size) throw UsageError("mwe_forward: unit vector size mismatch");
  if (distance.has_value() == cfg.distance_into_composer) {
    throw UsageError(cfg.distance_into_composer ? "mwe_forward: distance features belong to the composer"
                                                : "mwe_forward: distance features required");
  }
  if (aux.has_value() != cfg.mean_vector_feature) throw UsageError("mwe_forward: sentence-mean input mismatch");
  MweOutput out;
  out.input = detail::concat({&v, distance ? &*distance : nullptr, aux ? &*aux : nullptr});
  if (out.input.size() != params.mwe.w1.cols()) throw UsageError("mwe_forward: input dimension mismatch");
  const Perceptron& mlp = params.mwe;
  if (cfg.bias) {
    out.hidden = (mlp.w1 * out.input + mlp.b1.col(0)).array().tanh().matrix();
    out.score = std::tanh((mlp.w2.row(0) * out.hidden)(0) + mlp.b2(0, 0));
  } else {
    out.hidden = (mlp.w1 * out.input).array().tanh().matrix();
    out.score = std::tanh((mlp.w2.row(0) * out.hidden)(0));
  }
  return out;
}

inline SenseOutput sense_forward(const ModelParams& params, const VectorXd& v, const std::optional<VectorXd>& aux) {
  const NetworkConfig& cfg = params.config;
  if (v.size() != cfg.composition_size) throw UsageError("sense_forward: unit vector size mismatch");
  if (aux.has_value() != cfg.mean_vector_feature) throw UsageError("sense_forward: sentence-mean input mismatch");
  SenseOutput out;
  out.input = detail::concat({&v, aux ? &*aux : nullptr});
  if (out.input.size() != params.sense.w1.cols()) throw UsageError("sense_forward: input dimension mismatch");
  const Perceptron& mlp = params.sense;
  VectorXd pre1 = mlp.w1 * out.input;
  if (cfg.bias) pre1 += mlp.b1.col(0);
  out.hidden = pre1.array().tanh().matrix();
  VectorXd pre2 = mlp.w2 * out.hidden;
  if (cfg.bias) pre2 += mlp.b2.col(0);
  out.scores = pre2.array().tanh().matrix();
  return out;
}

namespace detail {

// Backpropagates d_out through one perceptron; returns d loss / d input.
inline VectorXd perceptron_backward(const Perceptron& mlp, bool bias, const VectorXd& input, const VectorXd& hidden,
                                    const VectorXd& output, const VectorXd& d_out, Perceptron& grad) {
  const VectorXd d_pre2 = d_out.cwiseProduct((1.0 - output.array().square()).matrix());
  grad.w2 = d_pre2 * hidden.transpose();
  grad.b2 = bias ? MatrixXd(d_pre2) : MatrixXd::Zero(d_pre2.size(), 1);
  const VectorXd d_hidden = mlp.w2.transpose() * d_pre2;
  const VectorXd d_pre1 = d_hidden.cwiseProduct((1.0 - hidden.array().square()).matrix());
  grad.w1 = d_pre1 * input.transpose();
  grad.b1 = bias ? MatrixXd(d_pre1) : MatrixXd::Zero(d_pre1.size(), 1);
  return mlp.w1.transpose() * d_pre1;
}

}  // namespace detail

struct MweGradient {
  const MweOutput& output;
  double d_score;
};

struct SenseGradient {
  const SenseOutput& output;
  const VectorXd& d_scores;
};

// Exact gradients for one sample: the composition chain in `state` followed
// by one or both perceptrons evaluated on its final vector.
inline Gradients backward(const ModelParams& params, const CompositionState& state,
                          const std::optional<MweGradient>& mwe, const std::optional<SenseGradient>& sense) {
  const NetworkConfig& cfg = params.config;
  const int m = cfg.composition_size;
  if (state.n != static_cast<int>(state.tape.size()) || state.n == 0) {
    throw UsageError("backward: composition tape does not match state");
  }
  Gradients g;
  g.d_unit = VectorXd::Zero(m);
  if (mwe) {
    if (mwe->output.input.size() != params.mwe.w1.cols() || mwe->output.input.head(m) != state.v) {
      throw UsageError("backward: MWE tape does not belong to this composition");
    }
    const VectorXd d_out = VectorXd::Constant(1, mwe->d_score);
    const VectorXd out = VectorXd::Constant(1, mwe->output.score);
    const VectorXd d_in =
        detail::perceptron_backward(params.mwe, cfg.bias, mwe->output.input, mwe->output.hidden, out, d_out, g.mwe);
    g.d_unit += d_in.head(m);
  }
  if (sense) {
    if (sense->output.input.size() != params.sense.w1.cols() || sense->output.input.head(m) != state.v ||
        sense->d_scores.size() != cfg.n_senses) {
      throw UsageError("backward: sense tape does not belong to this composition");
    }
    const VectorXd d_in = detail::perceptron_backward(params.sense, cfg.bias, sense->output.input,
                                                      sense->output.hidden, sense->output.scores,
                                                      sense->d_scores, g.sense);
    g.d_unit += d_in.head(m);
  }

  g.feat = MatrixXd::Zero(m, cfg.word_feature_dim);
  g.dist = cfg.distance_into_composer ? MatrixXd::Zero(m, cfg.distance_dim) : MatrixXd(m, 0);
  g.seed = MatrixXd::Zero(m, 1);

  VectorXd dv = g.d_unit;
  for (int k = state.n - 1; k >= 0; --k) {
    const CompositionStep& step = state.tape[static_cast<std::size_t>(k)];
    auto [it, fresh] = g.pos.try_emplace(step.pos);
    PosBlock& gb = it->second;
    if (fresh) {
      gb.word = MatrixXd::Zero(m, cfg.embedding_dim);
      gb.hash = MatrixXd::Zero(m, cfg.hash_dim);
      gb.recur = MatrixXd::Zero(m, m);
      gb.bias = MatrixXd::Zero(m, 1);
    }
    const VectorXd da = dv.cwiseProduct((1.0 - step.out.array().square()).matrix());
    gb.word.noalias() += da * step.embedding.transpose();
    gb.hash.noalias() += da * step.hash.transpose();
    g.feat.noalias() += da * step.heuristic.transpose();
    if (step.distance) g.dist.noalias() += da * step.distance->transpose();
    if (cfg.bias) gb.bias += da;
    gb.recur.noalias() += da * step.prev.transpose();
    const VectorXd d_prev = params.pos[static_cast<std::size_t>(step.pos)].recur.transpose() * da;
    if (k == 0 || !cfg.recurrency) {
      g.seed += d_prev;
      dv = VectorXd::Zero(m);  // earlier steps do not reach v_n without recurrency
    } else {
      dv = d_prev;
    }
  }
  return g;
}

// p <- p - lr * g for every parameter with a gradient. Non-finite gradients
// abort the update before anything is modified.
inline void sgd_update(ModelParams& params, const Gradients& grads, double lr) {
  if (lr < 0.0 || !std::isfinite(lr)) throw UsageError("sgd_update: learning rate must be non-negative");
  grads.pair_with(params, [](const std::string& name, MatrixXd& p, const MatrixXd* g) {
    if (!g) return;
    if (g->rows() != p.rows() || g->cols() != p.cols()) throw UsageError("sgd_update: gradient shape mismatch for " + name);
    if (!g->allFinite()) throw DataError("non-finite gradient for " + name);
  });
  grads.pair_with(params, [lr](const std::string&, MatrixXd& p, const MatrixXd* g) {
    if (g) p.noalias() -= lr * *g;
  });
}

// Composition helpers over a featurized sentence. Members are 1-based token
// positions in unit order; each extension reads the distance features
// between the previous member and the new one.

inline std::optional<VectorXd> composer_distance(const ModelParams& params, const SentenceFeatures& sf,
                                                 const CompositionState& state, int last, int next) {
  if (!params.config.distance_into_composer || state.n == 0) return std::nullopt;
  return sf.pair(last, next);
}

inline std::optional<VectorXd> classifier_distance(const ModelParams& params, const SentenceFeatures& sf, int last,
                                                   int next) {
  if (params.config.distance_into_composer) return std::nullopt;
  return sf.pair(last, next);
}

inline std::optional<VectorXd> aux_input(const ModelParams& params, const SentenceFeatures& sf) {
  if (!params.config.mean_vector_feature) return std::nullopt;
  return sf.mean();
}

inline CompositionState extend_unit(const ModelParams& params, const SentenceFeatures& sf, CompositionState state,
                                    int last, int next) {
  auto distance = composer_distance(params, sf, state, last, next);
  return compose_step(params, std::move(state), sf.token(next), distance);
}

inline CompositionState compose_members(const ModelParams& params, const SentenceFeatures& sf,
                                        const std::vector<int>& members) {
  CompositionState state = start_composition(params);
  int last = 0;
  for (int t : members) {
    state = extend_unit(params, sf, std::move(state), last, t);
    last = t;
  }
  return state;
}

}  // namespace semunit
