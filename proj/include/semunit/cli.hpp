#pragma once

// The `semunit` command line: train, predict, eval, ablate, gradcheck, features.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 check failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "semunit/ablation.hpp"
#include "semunit/config.hpp"
#include "semunit/evaluator.hpp"
#include "semunit/gradcheck.hpp"
#include "semunit/pipeline.hpp"

namespace semunit {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitCheck = 3 };

namespace cli_detail {

inline std::unique_ptr<std::ostream> open_output(const std::string& path) {
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw DataError("cannot write " + path);
  return f;
}

inline void require(const std::string& value, const char* what) {
  if (value.empty()) throw ConfigError(std::string("missing ") + what);
}

inline Corpus load_corpus(const std::string& corpus_path, const std::string& parse_path) {
  Corpus c = read_corpus_file(corpus_path);
  if (!parse_path.empty()) attach_parses(c, read_parse_file(parse_path));
  return c;
}

inline EmbeddingTable load_table(const std::string& path, const std::vector<const Corpus*>& corpora) {
  const auto vocab = lookup_vocabulary(corpora);
  return load_embeddings(path, &vocab);
}

inline int run_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(c.corpus, "training corpus");
  require(c.embeddings, "--embeddings");
  require(c.model, "--model");
  const Corpus corpus = load_corpus(c.corpus, c.parses);
  const EmbeddingTable table = load_table(c.embeddings, {&corpus});
  std::vector<EpochStats> epochs;
  const Model model =
      train_model(corpus, table, c.pipeline, [&err](const EpochStats& s) { err << s.summary() << std::endl; }, &epochs);
  save_model(model, c.model);
  if (!c.metrics.empty()) {
    auto m = open_output(c.metrics);
    *m << "sentences=" << corpus.sentences.size() << '\n'
       << "senses=" << corpus.sense_inventory.size() << '\n'
       << "embeddings_loaded=" << table.size() << '\n';
    for (const auto& e : epochs) {
      *m << "epoch." << e.epoch << ".mwe_loss=" << e.mean_mwe_loss << '\n'
         << "epoch." << e.epoch << ".sense_loss=" << e.mean_sense_loss << '\n'
         << "epoch." << e.epoch << ".positives=" << e.positive_samples << '\n'
         << "epoch." << e.epoch << ".negatives=" << e.negative_samples << '\n'
         << "epoch." << e.epoch << ".sense_samples=" << e.sense_samples << '\n';
    }
  }
  out << "wrote model " << c.model << '\n';
  return kExitOk;
}

inline int run_predict(const RunConfig& c, std::ostream& out) {
  require(c.model, "--model");
  require(c.corpus, "input corpus");
  require(c.embeddings, "--embeddings");
  const Model model = load_model(c.model);
  const Corpus corpus = load_corpus(c.corpus, c.parses);
  const EmbeddingTable table = load_table(c.embeddings, {&corpus});
  const Corpus pred = predict(model, corpus, table, c.pipeline.decode);
  if (c.output.empty()) {
    write_corpus(pred, out);
  } else {
    write_corpus(pred, *open_output(c.output));
  }
  return kExitOk;
}

inline std::string run_external(const std::string& script, const std::string& gold, const std::string& pred) {
  const bool python = script.size() > 3 && script.substr(script.size() - 3) == ".py";
  auto quote = [](const std::string& s) {
    std::string q = "'";
    for (char ch : s) q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
    return q + "'";
  };
  const std::string cmd = (python ? "python3 " : "") + quote(script) + " " + quote(gold) + " " + quote(pred) + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw DataError("cannot run " + script);
  std::string text;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe.get())) text.append(buf, n);
  return text;
}

inline int run_eval(const RunConfig& c, const std::string& gold_path, const std::string& pred_path,
                    std::ostream& out) {
  const Corpus gold = read_corpus_file(gold_path);
  const Corpus pred = read_corpus_file(pred_path);
  const ScoreReport r = score(gold, pred);
  print_report(r, out);
  if (!c.metrics.empty()) write_report_kv(r, *open_output(c.metrics));
  if (!c.official_eval_script.empty()) {
    std::ifstream probe(c.official_eval_script);
    if (!probe) throw DataError("official evaluation script not found: " + c.official_eval_script);
    out << "\n--- reimplemented scorer (key=value) ---\n";
    write_report_kv(r, out);
    out << "--- " << c.official_eval_script << " ---\n" << run_external(c.official_eval_script, gold_path, pred_path);
  }
  return kExitOk;
}

inline int run_ablate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(c.corpus, "training corpus");
  require(c.embeddings, "--embeddings");
  const Corpus full = load_corpus(c.corpus, c.parses);
  Corpus train_part;
  Corpus test_part;
  if (!c.test.empty()) {
    train_part = full;
    test_part = load_corpus(c.test, c.test_parses);
  } else {
    std::tie(train_part, test_part) = holdout_split(full, c.holdout);
  }
  const EmbeddingTable table = load_table(c.embeddings, {&train_part, &test_part});
  const auto rows = ablate(train_part, test_part, table, c.pipeline,
                           [&err](const std::string& label) { err << "ablation run: " << label << std::endl; });
  print_ablation(rows, out);
  if (!c.metrics.empty()) {
    auto m = open_output(c.metrics);
    for (const auto& row : rows) {
      std::string prefix = family_label(row.family);
      if (prefix.front() == '-') prefix.erase(0, 1);
      for (char& ch : prefix) {
        if (ch == ' ') ch = '_';
      }
      write_report_kv(row.report, *m, to_lower_ascii(prefix) + ".");
    }
  }
  return kExitOk;
}

inline int run_gradcheck(const RunConfig& c, int trials, double tolerance, std::ostream& out) {
  GradCheckOptions opt;
  opt.trials = trials;
  opt.seed = c.pipeline.train.rng_seed;
  opt.tolerance = tolerance;
  const GradCheckResult r = gradient_check(opt);
  out << "trials=" << r.trials << " entries=" << r.entries << " max_relative_error=" << r.max_relative_error
      << " tolerance=" << tolerance << '\n';
  if (!r.passed) {
    out << "FAILED worst: " << r.worst << '\n';
    return kExitCheck;
  }
  out << "passed\n";
  return kExitOk;
}

inline int run_features(const RunConfig& c, bool with_embeddings, std::ostream& out) {
  require(c.corpus, "input corpus");
  const Corpus corpus = load_corpus(c.corpus, c.parses);
  const EmbeddingTable table = c.embeddings.empty() ? EmbeddingTable(1) : load_table(c.embeddings, {&corpus});
  const FeatureConfig& fc = c.pipeline.features;
  const int lookahead = c.pipeline.decode.lookahead;

  out << "#T\tsent_id\tindex\tsurface\tfound\trank";
  for (int d = 0; d < fc.hash_dim; ++d) out << "\thash" << d;
  for (auto name : kWordFeatureNames) out << '\t' << name;
  if (with_embeddings) out << "\tembedding...";
  out << "\n#P\tsent_id\ti\tj";
  for (auto name : kDistanceFeatureNames) out << '\t' << name;
  out << '\n';

  for (const Sentence& s : corpus.sentences) {
    const SentenceFeatures sf(s, table, fc);
    for (int i = 1; i <= s.size(); ++i) {
      const Token& t = s.token(i);
      const LookupResult lk = lookup(table, t.surface, t.lemma, fc.lemmatize);
      out << "T\t" << s.sent_id << '\t' << i << '\t' << t.surface << '\t' << (lk.found ? 1 : 0) << '\t';
      if (lk.rank) {
        out << *lk.rank;
      } else {
        out << '-';
      }
      const TokenFeatures& tf = sf.token(i);
      for (Eigen::Index d = 0; d < tf.hash.size(); ++d) out << '\t' << tf.hash[d];
      for (Eigen::Index d = 0; d < tf.heuristic.size(); ++d) out << '\t' << tf.heuristic[d];
      if (with_embeddings) {
        for (Eigen::Index d = 0; d < tf.embedding.size(); ++d) out << '\t' << tf.embedding[d];
      }
      out << '\n';
    }
    for (int i = 1; i <= s.size(); ++i) {
      for (int j = i + 1; j <= std::min(s.size(), i + lookahead); ++j) {
        const auto d = sf.pair(i, j);
        out << "P\t" << s.sent_id << '\t' << i << '\t' << j;
        for (Eigen::Index k = 0; k < d.size(); ++k) out << '\t' << d[k];
        out << '\n';
      }
    }
  }
  return kExitOk;
}

}  // namespace cli_detail

// Runs the command line; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Minimal semantic unit detection and supersense tagging", "semunit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool print_config = false;
  std::map<std::string, std::string> overrides;
  app.add_option("--config", config_path, "key=value config file");
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");
  for (const auto& key : config_keys()) {
    const std::string name = key.name;
    auto* opt = app.add_option_function<std::string>(
        "--" + name, [&overrides, name](const std::string& v) { overrides[name] = v; }, key.help);
    if (key.is_bool) opt->expected(0, 1)->default_str("true");
  }

  std::string positional_corpus;
  std::string gold_path;
  std::string pred_path;
  int trials = 100;
  double tolerance = 1e-4;
  bool with_embeddings = false;

  auto* train_cmd = app.add_subcommand("train", "train a model from a tagged corpus");
  train_cmd->add_option("corpus", positional_corpus, "training corpus");
  auto* predict_cmd = app.add_subcommand("predict", "tag a corpus with a trained model");
  predict_cmd->add_option("corpus", positional_corpus, "input corpus");
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
  eval_cmd->add_option("gold", gold_path, "gold corpus")->required();
  eval_cmd->add_option("pred", pred_path, "predicted corpus")->required();
  auto* ablate_cmd = app.add_subcommand("ablate", "retrain with each feature family disabled");
  ablate_cmd->add_option("corpus", positional_corpus, "training corpus");
  auto* grad_cmd = app.add_subcommand("gradcheck", "verify backpropagation against finite differences");
  grad_cmd->add_option("--trials", trials, "random configurations to check")->capture_default_str();
  grad_cmd->add_option("--tolerance", tolerance, "maximum relative error")->capture_default_str();
  auto* feat_cmd = app.add_subcommand("features", "dump per-token and per-pair features");
  feat_cmd->add_option("corpus", positional_corpus, "input corpus");
  feat_cmd->add_flag("--with-embeddings", with_embeddings, "include embedding values");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw DataError("cannot open config file " + config_path);
      apply_config_file(cfg, in);
    }
    for (const auto& key : config_keys()) {
      const auto it = overrides.find(key.name);
      if (it != overrides.end()) set_config_value(cfg, key.name, it->second.empty() ? "true" : it->second);
    }
    if (!positional_corpus.empty()) cfg.corpus = positional_corpus;
    cfg.pipeline.decode.lookahead = cfg.pipeline.train.lookahead;
    if (print_config) {
      dump_config(cfg, out);
      return kExitOk;
    }

    if (train_cmd->parsed()) return cli_detail::run_train(cfg, out, err);
    if (predict_cmd->parsed()) return cli_detail::run_predict(cfg, out);
    if (eval_cmd->parsed()) return cli_detail::run_eval(cfg, gold_path, pred_path, out);
    if (ablate_cmd->parsed()) return cli_detail::run_ablate(cfg, out, err);
    if (grad_cmd->parsed()) return cli_detail::run_gradcheck(cfg, trials, tolerance, out);
    if (feat_cmd->parsed()) return cli_detail::run_features(cfg, with_embeddings, out);
  } catch (const UsageError& e) {
    err << "semunit: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "semunit: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "semunit: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace semunit
