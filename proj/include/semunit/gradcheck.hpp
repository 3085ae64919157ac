#pragma once

// Central finite-difference verification of `backward` on random tiny
// networks. Each trial draws a configuration (distance routing, mean-vector
// input, bias and recurrency switches vary), random parameters including the
// seed, a random composition chain, and checks every parameter entry of the
// combined MWE + sense loss.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "semunit/network.hpp"
#include "semunit/trainer.hpp"

namespace semunit {

struct GradCheckOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  double epsilon = 1e-4;
  double tolerance = 1e-4;
  // Entries where both gradients are below this are compared absolutely.
  double magnitude_floor = 1e-6;
};

struct GradCheckResult {
  int trials = 0;
  long long entries = 0;
  double max_relative_error = 0.0;
  std::string worst;  // "trial N <tensor>[r,c]"
  bool passed = true;
};

namespace detail {

struct GradCheckCase {
  std::vector<TokenFeatures> words;
  std::vector<VectorXd> distances;  // distances[k] between words k-1 and k (k >= 1)
  VectorXd classifier_distance;
  VectorXd aux;
  double mwe_target = 1.0;
  double mwe_weight = 1.0;
  int sense_target = 0;
};

inline double case_loss(const ModelParams& p, const GradCheckCase& c, Gradients* grads) {
  const NetworkConfig& cfg = p.config;
  CompositionState state = start_composition(p);
  for (std::size_t k = 0; k < c.words.size(); ++k) {
    std::optional<VectorXd> d;
    if (cfg.distance_into_composer && k > 0) d = c.distances[k];
    state = compose_step(p, std::move(state), c.words[k], d);
  }
  std::optional<VectorXd> aux;
  if (cfg.mean_vector_feature) aux = c.aux;
  std::optional<VectorXd> cd;
  if (!cfg.distance_into_composer) cd = c.classifier_distance;
  const MweOutput mo = mwe_forward(p, state.v, cd, aux);
  const SenseOutput so = sense_forward(p, state.v, aux);
  const ScalarLoss ml = mwe_loss(mo.score, c.mwe_target, c.mwe_weight);
  const VectorLoss sl = sense_loss(so.scores, c.sense_target);
  if (grads) *grads = backward(p, state, MweGradient{mo, ml.grad}, SenseGradient{so, sl.grad});
  return ml.loss + sl.loss;
}

}  // namespace detail

inline GradCheckResult gradient_check(const GradCheckOptions& opt = {}) {
  GradCheckResult result;
  std::mt19937_64 rng(opt.seed);
  auto uniform_int = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_vec = [&](int n) {
    VectorXd v(n);
    for (int k = 0; k < n; ++k) v[k] = unit(rng);
    return v;
  };

  for (int trial = 0; trial < opt.trials; ++trial) {
    NetworkConfig cfg;
    cfg.composition_size = uniform_int(1, 8);
    cfg.embedding_dim = uniform_int(1, 5);
    cfg.hash_dim = 1 << uniform_int(0, 3);
    cfg.mwe_hidden = uniform_int(1, 6);
    cfg.sense_hidden = uniform_int(1, 5);
    cfg.n_senses = uniform_int(2, 5);
    cfg.pos_tags = {"NOUN", "VERB"};
    cfg.distance_into_composer = trial % 2 == 0;
    cfg.mean_vector_feature = (trial / 2) % 2 == 0;
    cfg.bias = uniform_int(0, 3) != 0;
    cfg.recurrency = uniform_int(0, 3) != 0;

    ModelParams params = init_params(cfg, rng());
    // Nonzero seed and biases so their gradients are exercised too.
    params.visit([&](const std::string&, MatrixXd& m) {
      for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] += 0.3 * unit(rng);
    });

    detail::GradCheckCase c;
    const int len = uniform_int(1, 4);
    static const char* const kTags[] = {"NOUN", "VERB", "ADP"};
    for (int k = 0; k < len; ++k) {
      TokenFeatures w;
      w.embedding = random_vec(cfg.embedding_dim);
      w.hash = random_vec(cfg.hash_dim);
      w.heuristic = random_vec(cfg.word_feature_dim);
      w.pos = kTags[uniform_int(0, 2)];
      c.words.push_back(std::move(w));
      c.distances.push_back(random_vec(cfg.distance_dim));
    }
    c.classifier_distance = random_vec(cfg.distance_dim);
    c.aux = random_vec(cfg.embedding_dim);
    c.mwe_target = uniform_int(0, 1) ? 1.0 : -1.0;
    c.mwe_weight = 0.25 + 0.75 * (unit(rng) + 1.0) / 2.0;
    c.sense_target = uniform_int(0, cfg.n_senses - 1);

    Gradients analytic;
    detail::case_loss(params, c, &analytic);

    // Flatten analytic gradients in visit order.
    std::vector<const MatrixXd*> grads;
    analytic.pair_with(params, [&](const std::string&, MatrixXd&, const MatrixXd* g) { grads.push_back(g); });

    std::size_t slot = 0;
    params.visit([&](const std::string& name, MatrixXd& m) {
      const MatrixXd* g = grads[slot++];
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index col = 0; col < m.cols(); ++col) {
          const double saved = m(r, col);
          m(r, col) = saved + opt.epsilon;
          const double up = detail::case_loss(params, c, nullptr);
          m(r, col) = saved - opt.epsilon;
          const double down = detail::case_loss(params, c, nullptr);
          m(r, col) = saved;
          const double numeric = (up - down) / (2.0 * opt.epsilon);
          const double a = g ? (*g)(r, col) : 0.0;
          const double denom = std::max({std::abs(a), std::abs(numeric), opt.magnitude_floor});
          const double err = std::abs(a - numeric) / denom;
          ++result.entries;
          if (err > result.max_relative_error) {
            result.max_relative_error = err;
            std::ostringstream os;
            os << "trial " << trial << ' ' << name << '[' << r << ',' << col << "] analytic=" << a
               << " numeric=" << numeric;
            result.worst = os.str();
          }
        }
      }
    });
    ++result.trials;
  }
  result.passed = result.max_relative_error <= opt.tolerance;
  return result;
}

}  // namespace semunit
