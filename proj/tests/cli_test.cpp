#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gtest/gtest.h"
#include "semunit/cli.hpp"
#include "support/synthetic.hpp"

using namespace semunit;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("semunit_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream out(path(name), std::ios::binary);
    out << text;
  }

  int cli(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  // Synthetic corpus, parses and embeddings on disk.
  void write_synthetic() {
    testkit::SyntheticOptions o;
    const auto d = testkit::make_synthetic(o);
    std::ostringstream corpus;
    write_corpus(d.corpus, corpus);
    write("train.tsv", corpus.str());
    write("train.conll", testkit::parses_text(d.corpus));
    write("vectors.txt", testkit::synthetic_embedding_text(o, o.vocab_begin, o.vocab_end));
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::map<std::string, std::string> read_kv(const std::string& file) {
  std::ifstream in(file);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

const char* const kGold =
    "1\tThe\tthe\tDET\tO\t0\t\t\tr.1\n"
    "2\tdog\tdog\tNOUN\tO\t0\t\tn.animal\tr.1\n"
    "3\tran\trun\tVERB\tB\t0\t\tv.motion\tr.1\n"
    "4\toff\toff\tADP\tI\t3\t\t\tr.1\n"
    "\n";

}  // namespace

TEST_F(CliTest, EvalIdentityIsPerfect) {
  write("gold.tsv", kGold);
  ASSERT_EQ(cli({"eval", path("gold.tsv"), path("gold.tsv"), "--metrics", path("m.txt")}), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("1.0000   1.0000  100.00%"), std::string::npos) << out_.str();
  const auto kv = read_kv(path("m.txt"));
  EXPECT_EQ(kv.at("mwe.f1"), "1");
  EXPECT_EQ(kv.at("supersense.f1"), "1");
  EXPECT_EQ(kv.at("combined.f1"), "1");
}

TEST_F(CliTest, EvalRunsExternalScriptWhenGiven) {
  write("gold.tsv", kGold);
  write("score.sh", "#!/bin/sh\necho external-scorer \"$#\"\n");
  fs::permissions(path("score.sh"), fs::perms::owner_all);
  ASSERT_EQ(cli({"eval", path("gold.tsv"), path("gold.tsv"), "--official-eval-script", path("score.sh")}), kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("external-scorer 2"), std::string::npos) << out_.str();
  EXPECT_EQ(cli({"eval", path("gold.tsv"), path("gold.tsv"), "--official-eval-script", path("missing.sh")}),
            kExitData);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli({}), kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}), kExitUsage);
  EXPECT_EQ(cli({"eval", path("nope.tsv"), path("nope.tsv")}), kExitData);
  EXPECT_NE(err_.str().find("nope.tsv"), std::string::npos);
  write("bad.tsv", "1\tdog\n");
  EXPECT_EQ(cli({"eval", path("bad.tsv"), path("bad.tsv")}), kExitData);
  EXPECT_NE(err_.str().find("line 1"), std::string::npos);
  EXPECT_EQ(cli({"--theta-start", "abc", "gradcheck"}), kExitUsage);
  EXPECT_EQ(cli({"--hash-dim", "12", "gradcheck", "--trials", "1"}), kExitUsage);
  EXPECT_EQ(cli({"train"}), kExitUsage);
  write("bad.cfg", "no-such-key = 3\n");
  EXPECT_EQ(cli({"--config", path("bad.cfg"), "gradcheck"}), kExitUsage);
  EXPECT_EQ(cli({"gradcheck", "--trials", "2", "--tolerance", "0"}), kExitCheck);
  EXPECT_EQ(cli({"--help"}), kExitOk);
}

TEST_F(CliTest, GradcheckPasses) {
  EXPECT_EQ(cli({"gradcheck", "--trials", "100"}), kExitOk) << out_.str();
  EXPECT_NE(out_.str().find("passed"), std::string::npos);
}

TEST_F(CliTest, DefaultConfigSnapshot) {
  ASSERT_EQ(cli({"--print-config", "gradcheck"}), kExitOk);
  const std::string expected =
      "seed=1\nepochs=10\nlr=0.01\nlookahead=9\nneg-prob-cap=0.25\ndownweight=accept\nshuffle=true\n"
      "composition-size=300\nmwe-hidden=1024\nsense-hidden=256\ndistance-into-composer=true\nmean-vector=true\n"
      "bias=true\nhash-dim=16\nhash-mode=all_words\nhash-chars=all\nlemmatize=true\ngap-mode=intervening\n"
      "theta-start=-0.15\ntheta-extend=0\nmax-depth=2\nholdout=5\ncorpus=\nparses=\ntest=\ntest-parses=\n"
      "embeddings=\nmodel=\noutput=\nmetrics=\nofficial-eval-script=\n";
  EXPECT_EQ(out_.str(), expected);
}

TEST_F(CliTest, ConfigFileThenFlagsOverride) {
  write("run.cfg", "# comment\ntheta_start = 0.25\nepochs=3\nlemmatize=false\n");
  ASSERT_EQ(cli({"--config", path("run.cfg"), "--epochs", "7", "--print-config", "gradcheck"}), kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("theta-start=0.25\n"), std::string::npos);
  EXPECT_NE(out_.str().find("epochs=7\n"), std::string::npos);
  EXPECT_NE(out_.str().find("lemmatize=false\n"), std::string::npos);
  ASSERT_EQ(cli({"--lemmatize", "--print-config", "gradcheck"}), kExitOk);
  EXPECT_NE(out_.str().find("lemmatize=true\n"), std::string::npos);
  ASSERT_EQ(cli({"--lemmatize", "false", "--print-config", "gradcheck"}), kExitOk);
  EXPECT_NE(out_.str().find("lemmatize=false\n"), std::string::npos);
}

TEST_F(CliTest, FeaturesDump) {
  write("gold.tsv", kGold);
  ASSERT_EQ(cli({"features", path("gold.tsv")}), kExitOk) << err_.str();
  std::istringstream lines(out_.str());
  std::string line;
  int t_rows = 0, p_rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("T\t", 0) == 0) {
      ++t_rows;
      // T, sent_id, index, surface, found, rank, 16 hash bits, 15 features
      EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 5 + 16 + 15);
    }
    if (line.rfind("P\t", 0) == 0) ++p_rows;
  }
  EXPECT_EQ(t_rows, 4);
  EXPECT_EQ(p_rows, 6);
}

TEST_F(CliTest, TrainPredictEvalOnSyntheticCorpus) {
  write_synthetic();
  const std::vector<std::string> shape = {"--composition-size", "16", "--mwe-hidden", "32", "--sense-hidden", "16",
                                          "--epochs", "30", "--lr", "0.05"};
  std::vector<std::string> train_args = shape;
  const std::vector<std::string> rest = {"--parses",  path("train.conll"), "--embeddings", path("vectors.txt"),
                                         "--model",   path("model.bin"),   "--metrics",    path("train.txt"),
                                         "train",     path("train.tsv")};
  train_args.insert(train_args.end(), rest.begin(), rest.end());
  ASSERT_EQ(cli(train_args), kExitOk) << err_.str();
  EXPECT_NE(err_.str().find("epoch 30 "), std::string::npos);
  EXPECT_EQ(read_kv(path("train.txt")).count("epoch.30.mwe_loss"), 1u);

  ASSERT_EQ(cli({"--parses", path("train.conll"), "--embeddings", path("vectors.txt"), "--model", path("model.bin"),
                 "--output", path("pred.tsv"), "predict", path("train.tsv")}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(cli({"eval", path("train.tsv"), path("pred.tsv"), "--metrics", path("eval.txt")}), kExitOk);
  const auto kv = read_kv(path("eval.txt"));
  EXPECT_GE(std::stod(kv.at("mwe.f1")), 0.95);
  EXPECT_GE(std::stod(kv.at("supersense.f1")), 0.95);

  // predicting to stdout gives the same corpus
  ASSERT_EQ(cli({"--parses", path("train.conll"), "--embeddings", path("vectors.txt"), "--model", path("model.bin"),
                 "predict", path("train.tsv")}),
            kExitOk);
  std::ifstream pred(path("pred.tsv"));
  std::stringstream file_text;
  file_text << pred.rdbuf();
  EXPECT_EQ(out_.str(), file_text.str());

  // a mismatched parse file is a data error
  write("short.conll", "1\tx\tX\t0\n\n");
  EXPECT_EQ(cli({"--parses", path("short.conll"), "--embeddings", path("vectors.txt"), "--model", path("model.bin"),
                 "predict", path("train.tsv")}),
            kExitData);
}

TEST_F(CliTest, BinaryReportsExitCodes) {
  const std::string bin = SEMUNIT_CLI_PATH;
  write("gold.tsv", kGold);
  const std::string quiet = " >/dev/null 2>&1";
  auto status = [](int raw) { return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1; };
  EXPECT_EQ(status(std::system((bin + " eval " + path("gold.tsv") + " " + path("gold.tsv") + quiet).c_str())), 0);
  EXPECT_EQ(status(std::system((bin + " eval " + path("x.tsv") + " " + path("x.tsv") + quiet).c_str())), 2);
  EXPECT_EQ(status(std::system((bin + " --bogus gradcheck" + quiet).c_str())), 1);
}
