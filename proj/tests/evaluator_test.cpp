#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "semunit/ablation.hpp"
#include "semunit/evaluator.hpp"
#include "support/random_sentence.hpp"

using namespace semunit;

namespace {

Sentence with_units(const std::string& id, int n, const std::vector<SemanticUnit>& units) {
  Sentence s;
  s.sent_id = id;
  for (int i = 1; i <= n; ++i) s.tokens.push_back(Token{i, "w", "w", "X", 'O', 0, "", "", id});
  apply_units(s, units);
  return s;
}

Corpus one(Sentence s) {
  Corpus c;
  c.sentences.push_back(std::move(s));
  rebuild_sense_inventory(c);
  return c;
}

Corpus random_corpus(std::mt19937_64& rng, const std::string& prefix, int n) {
  Corpus c;
  for (int k = 0; k < n; ++k) {
    c.sentences.push_back(testkit::random_sentence(prefix + std::to_string(k % 3) + "." + std::to_string(k),
                                                   testkit::draw(rng, 1, 15), rng));
  }
  rebuild_sense_inventory(c);
  return c;
}

}  // namespace

TEST(MweLinks, Definition) {
  EXPECT_TRUE(mwe_links({{{3}, "unknown"}}).empty());
  EXPECT_EQ(mwe_links({{{1, 2, 3}, "unknown"}}), (std::vector<std::pair<int, int>>{{1, 2}, {2, 3}}));
  EXPECT_EQ(mwe_links({{{1, 4}, "unknown"}}), (std::vector<std::pair<int, int>>{{1, 4}}));
}

TEST(Score, HandExample) {
  const Corpus gold = one(with_units("s", 5, {{{1, 2}, "unknown"}, {{3}, "unknown"}, {{4}, "unknown"}, {{5}, "unknown"}}));
  const Corpus pred = one(with_units("s", 5, {{{1, 2}, "unknown"}, {{3}, "unknown"}, {{4, 5}, "unknown"}}));
  const ScoreReport r = score(gold, pred);
  EXPECT_DOUBLE_EQ(r.mwe.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.mwe.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.mwe.f1, 2.0 / 3.0);
  // no senses anywhere: supersense counts are empty
  EXPECT_EQ(r.sense_counts.total_gold, 0);
  EXPECT_EQ(r.supersense.f1, 0.0);
}

TEST(Score, PartialLinkCredit) {
  // gold {1,2,3}; pred {1,2} and {3}: one of two gold links recovered
  const Corpus gold = one(with_units("s", 3, {{{1, 2, 3}, "v.motion"}}));
  const Corpus pred = one(with_units("s", 3, {{{1, 2}, "v.motion"}, {{3}, "n.time"}}));
  const ScoreReport r = score(gold, pred);
  EXPECT_DOUBLE_EQ(r.mwe.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.mwe.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.supersense.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.supersense.recall, 1.0);
  EXPECT_EQ(r.per_sense_recall.at("v.motion"), 1.0);
  // combined sums: (1 + 1) / (1 + 2) precision, (1 + 1) / (2 + 1) recall
  EXPECT_DOUBLE_EQ(r.combined.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.combined.recall, 2.0 / 3.0);
}

TEST(Score, PerfectOnIdentity) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Corpus c = random_corpus(rng, "src", 8);
    const ScoreReport r = score(c, c);
    if (r.mwe_counts.total_gold > 0) {
      EXPECT_EQ(r.mwe.f1, 1.0);
    }
    if (r.sense_counts.total_gold > 0) {
      EXPECT_EQ(r.supersense.f1, 1.0);
    }
    EXPECT_EQ(r.combined.f1, 1.0);
    ASSERT_TRUE(r.macro_f1.has_value());
    EXPECT_EQ(*r.macro_f1, 1.0);
  }
}

TEST(Score, SwapExchangesPrecisionAndRecall) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Corpus gold = random_corpus(rng, "a", 5);
    Corpus pred = gold;
    for (auto& s : pred.sentences) apply_units(s, testkit::random_units(s.size(), rng));
    rebuild_sense_inventory(pred);
    const ScoreReport ab = score(gold, pred);
    const ScoreReport ba = score(pred, gold);
    EXPECT_DOUBLE_EQ(ab.mwe.precision, ba.mwe.recall);
    EXPECT_DOUBLE_EQ(ab.mwe.recall, ba.mwe.precision);
    EXPECT_DOUBLE_EQ(ab.supersense.precision, ba.supersense.recall);
    EXPECT_DOUBLE_EQ(ab.combined.f1, ba.combined.f1);

    const Counts sum = ab.mwe_counts + ab.sense_counts;
    EXPECT_DOUBLE_EQ(ab.combined.precision, prf(sum).precision);
    EXPECT_DOUBLE_EQ(ab.combined.recall, prf(sum).recall);
    for (const Prf* p : {&ab.mwe, &ab.supersense, &ab.combined}) {
      EXPECT_GE(p->precision, 0.0);
      EXPECT_LE(p->precision, 1.0);
      EXPECT_GE(p->recall, 0.0);
      EXPECT_LE(p->recall, 1.0);
      if (p->precision + p->recall > 0) {
        EXPECT_NEAR(p->f1, 2 * p->precision * p->recall / (p->precision + p->recall), 1e-15);
      }
    }
  }
}

TEST(Score, MacroNeedsSourcePrefix) {
  Corpus c = one(with_units("plain", 2, {{{1, 2}, "unknown"}}));
  EXPECT_FALSE(score(c, c).macro_f1.has_value());
  std::ostringstream out;
  print_report(score(c, c), out);
  EXPECT_NE(out.str().find("n/a"), std::string::npos);

  // two sources: one perfect, one with F1 0
  Corpus gold;
  gold.sentences.push_back(with_units("rev.1", 2, {{{1, 2}, "unknown"}}));
  gold.sentences.push_back(with_units("tweet.1", 2, {{{1, 2}, "unknown"}}));
  Corpus pred = gold;
  apply_units(pred.sentences[1], {{{1}, "unknown"}, {{2}, "unknown"}});
  const ScoreReport r = score(gold, pred);
  ASSERT_TRUE(r.macro_f1.has_value());
  EXPECT_DOUBLE_EQ(*r.macro_f1, 0.5);
}

TEST(Score, Mismatches) {
  const Corpus a = one(with_units("s", 2, {{{1}, "unknown"}, {{2}, "unknown"}}));
  const Corpus b = one(with_units("s", 3, {{{1}, "unknown"}, {{2}, "unknown"}, {{3}, "unknown"}}));
  EXPECT_THROW(score(a, b), DataError);
  EXPECT_THROW(score(a, Corpus{}), DataError);
}

TEST(Report, KeyValueOutput) {
  const Corpus c = one(with_units("x.1", 3, {{{1, 3}, "v.motion"}, {{2}, "unknown"}}));
  std::ostringstream out;
  write_report_kv(score(c, c), out, "test.");
  const std::string s = out.str();
  EXPECT_NE(s.find("test.mwe.f1=1\n"), std::string::npos);
  EXPECT_NE(s.find("test.supersense.precision=1\n"), std::string::npos);
  EXPECT_NE(s.find("test.macro.f1=1\n"), std::string::npos);
  EXPECT_NE(s.find("test.recall.v.motion=1\n"), std::string::npos);
}

TEST(Ablation, FamiliesAndSplit) {
  ASSERT_EQ(ablation_families().size(), 5u);
  EXPECT_EQ(family_label(ablation_families().back()), "-word2vec");
  PipelineConfig cfg;
  EXPECT_FALSE(without(cfg, FeatureFamily::recurrency).network.recurrency);
  EXPECT_FALSE(without(cfg, FeatureFamily::embeddings).features.use_embeddings);
  EXPECT_FALSE(without(cfg, FeatureFamily::word_hash).features.use_hash);
  EXPECT_FALSE(without(cfg, FeatureFamily::distance).features.use_distance);
  EXPECT_FALSE(without(cfg, FeatureFamily::heuristic).features.use_heuristic);
  EXPECT_TRUE(without(cfg, FeatureFamily::none).features.use_embeddings);

  std::mt19937_64 rng(1);
  const Corpus c = random_corpus(rng, "h", 10);
  const auto [train_part, test_part] = holdout_split(c, 5);
  EXPECT_EQ(train_part.sentences.size(), 8u);
  EXPECT_EQ(test_part.sentences.size(), 2u);
  EXPECT_EQ(test_part.sentences[0], c.sentences[4]);
  EXPECT_EQ(train_part.sense_inventory, c.sense_inventory);
  EXPECT_THROW(holdout_split(c, 1), UsageError);
}
