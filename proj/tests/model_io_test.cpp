#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "semunit/model_io.hpp"
#include "semunit/predictor.hpp"
#include "support/random_model.hpp"

using namespace semunit;

namespace {

Model sample_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Model m;
  m.params = testkit::random_model(rng, 3, 8);
  m.features.hash_dim = 8;
  m.features.hash_mode = HashMode::unknown_only;
  m.features.lemmatize = false;
  m.features.use_distance = false;
  m.sense_inventory = testkit::random_senses();
  return m;
}

std::string saved(const Model& m) {
  std::ostringstream out(std::ios::binary);
  save_model(m, out);
  return out.str();
}

}  // namespace

TEST(ModelIo, RoundTripKeepsConfigAndFloat32Values) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Model m = sample_model(seed);
    std::istringstream in(saved(m), std::ios::binary);
    Model back = load_model(in);
    EXPECT_EQ(back.params.config, m.params.config);
    EXPECT_EQ(back.sense_inventory, m.sense_inventory);
    EXPECT_EQ(back.features.hash_mode, HashMode::unknown_only);
    EXPECT_FALSE(back.features.lemmatize);
    EXPECT_FALSE(back.features.use_distance);
    EXPECT_TRUE(back.features.use_hash);

    ModelParams original = m.params;
    std::vector<MatrixXd> values;
    original.visit([&](const std::string&, MatrixXd& x) { values.push_back(x.cast<float>().cast<double>()); });
    std::size_t k = 0;
    back.params.visit([&](const std::string& name, MatrixXd& x) { EXPECT_EQ(x, values[k++]) << name; });

    // saving the loaded model reproduces the same bytes
    EXPECT_EQ(saved(back), saved(m));
  }
}

TEST(ModelIo, LoadedModelPredictsLikeTheSavedOne) {
  Model m = sample_model(3);
  // round the original to float32 so both decode the same numbers
  m.params.visit([](const std::string&, MatrixXd& x) { x = x.cast<float>().cast<double>(); });
  std::istringstream in(saved(m), std::ios::binary);
  const Model back = load_model(in);
  std::mt19937_64 rng(3);
  EmbeddingTable table(3);
  for (int k = 0; k < 10; ++k) {
    const Sentence s = testkit::random_sentence("m", 10, rng);
    EXPECT_EQ(predict_sentence(m.params, s, table, m.features, m.sense_inventory, DecodeConfig{}),
              predict_sentence(back.params, s, table, back.features, back.sense_inventory, DecodeConfig{}));
  }
}

TEST(ModelIo, RejectsBadInput) {
  std::istringstream bad_magic("NOTAMODEL........");
  EXPECT_THROW(load_model(bad_magic), DataError);
  std::string bytes = saved(sample_model(2));
  bytes[8] = 9;
  std::istringstream bad_version(bytes);
  EXPECT_THROW(load_model(bad_version), DataError);
  std::istringstream truncated(saved(sample_model(2)).substr(0, 200));
  EXPECT_THROW(load_model(truncated), DataError);
  EXPECT_THROW(load_model(std::string("/nonexistent/model.bin")), DataError);
}
