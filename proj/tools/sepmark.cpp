#include <charconv>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sepmark/corpus.hpp"
#include "sepmark/demos.hpp"
#include "sepmark/error.hpp"
#include "sepmark/eval.hpp"
#include "sepmark/features.hpp"
#include "sepmark/learning.hpp"
#include "sepmark/log.hpp"
#include "sepmark/model.hpp"
#include "sepmark/network.hpp"
#include "sepmark/util.hpp"

#ifndef SEPMARK_VERSION
#define SEPMARK_VERSION "0.0.0"
#endif

using namespace sepmark;

namespace {

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool parse_real(std::string_view text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

std::optional<PenaltyGrid> try_parse_grid(const std::string& text) {
  std::vector<std::string_view> parts = split(text, ':');
  PenaltyGrid grid;
  if (parts.size() != 3 || !parse_real(parts[0], grid.lo) ||
      !parse_real(parts[1], grid.hi) || !parse_real(parts[2], grid.step)) {
    return std::nullopt;
  }
  return grid;
}

std::optional<std::array<double, 6>> try_parse_weights(
    const std::string& text) {
  std::vector<std::string_view> parts = split(text, ',');
  std::array<double, 6> weights{};
  if (parts.size() != weights.size()) return std::nullopt;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!parse_real(parts[i], weights[i])) return std::nullopt;
  }
  return weights;
}

CorpusFormat to_format(const std::string& name) {
  return name == "conll" ? CorpusFormat::Conll : CorpusFormat::Olner;
}

const BrownClusterMap* maybe_brown(const std::string& path,
                                   std::optional<BrownClusterMap>& storage) {
  if (path.empty()) return nullptr;
  storage = load_brown_clusters(path);
  return &*storage;
}

void write_manifest(const std::string& primary_artifact,
                    const std::vector<std::string>& artifacts,
                    const std::string& command,
                    const nlohmann::json& config) {
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["artifacts"] = artifacts;
  manifest["created"] = utc_timestamp();
  manifest["version"] = SEPMARK_VERSION;
  std::string path = primary_artifact + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest file: " + path);
  out << manifest.dump(2) << "\n";
}

// Everything the flags can set; each subcommand binds its own subset.
struct Options {
  std::string scheme = "edge";
  std::string features = "conll";
  std::string format = "olner";
  std::string brown;
  std::string train_path;
  std::string dev_path;
  std::string input_path;
  std::string test_path;
  std::string model_path;
  std::string compare_path;
  std::string out_path;
  std::string grid = "-2:2:0.1";
  std::string weights;
  double l2 = 0.0;
  int max_iters = 200;
  int threads = 0;
  int replicates = 1000;
  int tokens = 3;
  std::uint64_t seed = 1;
  bool split_overlap = false;
  bool strict_gold = false;
};

int default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void run_train(const Options& opt) {
  Corpus corpus = read_corpus_file(opt.train_path, to_format(opt.format));
  std::optional<BrownClusterMap> brown_storage;
  const BrownClusterMap* brown = maybe_brown(opt.brown, brown_storage);

  TrainConfig config;
  config.lambda = opt.l2;
  config.max_iterations = opt.max_iters;
  config.threads = opt.threads;
  config.strict_gold = opt.strict_gold;
  TrainResult result = train(corpus, *scheme_from_string(opt.scheme),
                             resolve_feature_config(opt.features), config,
                             brown);

  if (!opt.dev_path.empty()) {
    Corpus dev = read_corpus_file(opt.dev_path, to_format(opt.format));
    PenaltySweep sweep = tune_penalty(result.model, dev,
                                      *try_parse_grid(opt.grid), brown,
                                      opt.threads);
    std::cout << render_sweep(sweep);
  }

  save_model(result.model, opt.out_path);

  std::string tsv_path = opt.out_path + ".objective.tsv";
  std::ofstream tsv(tsv_path);
  if (!tsv) throw DataError("cannot write objective log: " + tsv_path);
  tsv << "iteration\tobjective\tgrad_norm\tseconds\n";
  for (const ObjectiveReport& report : result.reports) {
    char row[160];
    std::snprintf(row, sizeof(row), "%d\t%.10g\t%.10g\t%.6f\n",
                  report.iteration, report.objective, report.grad_norm,
                  report.seconds);
    tsv << row;
  }

  nlohmann::json config_json{{"scheme", opt.scheme},
                             {"features", opt.features},
                             {"format", opt.format},
                             {"l2", opt.l2},
                             {"max_iters", opt.max_iters},
                             {"threads", opt.threads},
                             {"strict_gold", opt.strict_gold},
                             {"train", opt.train_path},
                             {"dev", opt.dev_path},
                             {"brown", opt.brown},
                             {"penalty_grid", opt.grid},
                             {"out", opt.out_path}};
  write_manifest(opt.out_path, {opt.out_path, tsv_path}, "train", config_json);

  const ObjectiveReport& last = result.reports.back();
  std::cout << "trained " << opt.scheme << " model: "
            << result.model.dictionary.size() << " features, "
            << last.iteration << " iterations, objective "
            << last.objective;
  if (result.dropped_mentions > 0) {
    std::cout << ", dropped " << result.dropped_mentions << " mentions";
  }
  std::cout << "\n";
  std::cout << "wrote " << opt.out_path << "\n";
}

void run_predict(const Options& opt) {
  Model model = load_model(opt.model_path);
  std::optional<BrownClusterMap> brown_storage;
  const BrownClusterMap* brown = maybe_brown(opt.brown, brown_storage);
  Corpus input = read_corpus_file(opt.input_path, to_format(opt.format));
  Corpus predicted = predict_corpus(model, input, brown, opt.threads);
  write_corpus_file(predicted, opt.out_path, to_format(opt.format));

  nlohmann::json config_json{{"model", opt.model_path},
                             {"input", opt.input_path},
                             {"format", opt.format},
                             {"brown", opt.brown},
                             {"threads", opt.threads},
                             {"out", opt.out_path}};
  write_manifest(opt.out_path, {opt.out_path}, "predict", config_json);
  std::cout << "wrote predictions for " << predicted.sentences.size()
            << " sentences to " << opt.out_path << "\n";
}

void run_evaluate(const Options& opt) {
  Model model = load_model(opt.model_path);
  std::optional<BrownClusterMap> brown_storage;
  const BrownClusterMap* brown = maybe_brown(opt.brown, brown_storage);
  Corpus test = read_corpus_file(opt.test_path, to_format(opt.format));

  Corpus predicted = predict_corpus(model, test, brown, opt.threads);
  std::cout << "overall\n" << render_prf(score(test, predicted));

  if (opt.split_overlap) {
    auto [overlapping, plain] = split_by_overlap(test);
    Corpus pred_overlapping =
        predict_corpus(model, overlapping, brown, opt.threads);
    std::cout << "overlapping sentences (" << overlapping.sentences.size()
              << ")\n"
              << render_prf(score(overlapping, pred_overlapping));
    Corpus pred_plain = predict_corpus(model, plain, brown, opt.threads);
    std::cout << "non-overlapping sentences (" << plain.sentences.size()
              << ")\n"
              << render_prf(score(plain, pred_plain));
  }

  if (!opt.compare_path.empty()) {
    Model other = load_model(opt.compare_path);
    Corpus other_predicted = predict_corpus(other, test, brown, opt.threads);
    std::vector<std::vector<Mention>> lists_a, lists_b;
    for (const Sentence& s : predicted.sentences) lists_a.push_back(s.mentions);
    for (const Sentence& s : other_predicted.sentences) {
      lists_b.push_back(s.mentions);
    }
    SignificanceResult sig = bootstrap_significance(test, lists_a, lists_b,
                                                    opt.replicates, opt.seed);
    char block[256];
    std::snprintf(block, sizeof(block),
                  "comparison\nF1_a %.6f\nF1_b %.6f\np_value %.6f\n"
                  "replicates %d\n",
                  sig.f1_a, sig.f1_b, sig.p_value, sig.replicates);
    std::cout << block;
  }
}

void run_tune_penalty(const Options& opt) {
  Model model = load_model(opt.model_path);
  std::optional<BrownClusterMap> brown_storage;
  const BrownClusterMap* brown = maybe_brown(opt.brown, brown_storage);
  Corpus dev = read_corpus_file(opt.dev_path, to_format(opt.format));

  PenaltySweep sweep =
      tune_penalty(model, dev, *try_parse_grid(opt.grid), brown, opt.threads);
  std::cout << render_sweep(sweep);

  save_model(model, opt.out_path);
  nlohmann::json config_json{{"model", opt.model_path},
                             {"dev", opt.dev_path},
                             {"format", opt.format},
                             {"brown", opt.brown},
                             {"threads", opt.threads},
                             {"penalty_grid", opt.grid},
                             {"out", opt.out_path}};
  write_manifest(opt.out_path, {opt.out_path}, "tune-penalty", config_json);
  std::cout << "wrote " << opt.out_path << "\n";
}

void run_stats(const Options& opt) {
  Corpus corpus = read_corpus_file(opt.input_path, to_format(opt.format));
  std::cout << render_stats(compute_stats(corpus));
}

void run_bench(const Options& opt) {
  Model model = load_model(opt.model_path);
  std::optional<BrownClusterMap> brown_storage;
  const BrownClusterMap* brown = maybe_brown(opt.brown, brown_storage);
  Corpus corpus = read_corpus_file(opt.input_path, to_format(opt.format));
  std::cout << render_throughput(throughput(model, corpus, brown));
}

void run_demo_spurious(const Options& opt) {
  std::optional<std::array<double, 6>> weights;
  if (!opt.weights.empty()) weights = try_parse_weights(opt.weights);
  demos::render_spurious(demos::demo_spurious(weights), std::cout);
}

void run_demo_uniqueness(const Options& opt) {
  demos::render_uniqueness(demos::demo_uniqueness(opt.tokens), std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlapping mention tagger built on mention separators"};
  app.set_version_flag("--version", SEPMARK_VERSION);
  app.require_subcommand(1);
  app.footer("Set SEPMARK_LOG={error|warn|info|debug} to control logging.");

  Options opt;
  opt.threads = default_threads();

  auto scheme_names = CLI::IsMember(
      {"lcrf-single", "lcrf-multi", "state", "edge", "hypergraph"});
  auto format_names = CLI::IsMember({"olner", "conll"});
  auto grid_check = CLI::Validator(
      [](std::string& text) {
        return try_parse_grid(text) ? std::string()
                                    : "expected lo:hi:step, got '" + text + "'";
      },
      "GRID");
  auto weights_check = CLI::Validator(
      [](std::string& text) {
        return try_parse_weights(text)
                   ? std::string()
                   : "expected six comma-separated reals, got '" + text + "'";
      },
      "WEIGHTS");

  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--train", opt.train_path, "training corpus")
      ->required();
  train_cmd->add_option("--dev", opt.dev_path,
                        "development corpus for penalty tuning");
  train_cmd->add_option("--out", opt.out_path, "model output path")
      ->required();
  train_cmd->add_option("--scheme", opt.scheme, "model scheme")
      ->check(scheme_names);
  train_cmd->add_option("--features", opt.features,
                        "feature preset (ace|genia|conll) or config file");
  train_cmd->add_option("--l2", opt.l2, "L2 regularization strength");
  train_cmd->add_option("--max-iters", opt.max_iters, "optimizer iterations");
  train_cmd->add_option("--brown", opt.brown, "Brown cluster file");
  train_cmd->add_option("--threads", opt.threads, "worker threads");
  train_cmd->add_option("--format", opt.format, "corpus format")
      ->check(format_names);
  train_cmd->add_option("--penalty-grid", opt.grid, "dev tuning grid")
      ->check(grid_check);
  train_cmd->add_flag("--strict-gold", opt.strict_gold,
                      "fail on annotations the scheme cannot represent");

  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Decode a corpus with a trained model");
  predict_cmd->add_option("--model", opt.model_path, "model file")->required();
  predict_cmd->add_option("--input", opt.input_path, "input corpus")
      ->required();
  predict_cmd->add_option("--out", opt.out_path, "predictions output path")
      ->required();
  predict_cmd->add_option("--format", opt.format, "corpus format")
      ->check(format_names);
  predict_cmd->add_option("--brown", opt.brown, "Brown cluster file");
  predict_cmd->add_option("--threads", opt.threads, "worker threads");

  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Score a model against gold mentions");
  evaluate_cmd->add_option("--model", opt.model_path, "model file")
      ->required();
  evaluate_cmd->add_option("--test", opt.test_path, "test corpus")->required();
  evaluate_cmd->add_option("--format", opt.format, "corpus format")
      ->check(format_names);
  evaluate_cmd->add_option("--brown", opt.brown, "Brown cluster file");
  evaluate_cmd->add_option("--threads", opt.threads, "worker threads");
  evaluate_cmd->add_flag("--split-overlap", opt.split_overlap,
                         "also score overlapping and non-overlapping subsets");
  evaluate_cmd->add_option("--compare-model", opt.compare_path,
                           "second model for a bootstrap comparison");
  evaluate_cmd->add_option("--replicates", opt.replicates,
                           "bootstrap replicates");
  evaluate_cmd->add_option("--seed", opt.seed, "bootstrap seed");

  CLI::App* tune_cmd = app.add_subcommand(
      "tune-penalty", "Sweep the mention penalty on a development corpus");
  tune_cmd->add_option("--model", opt.model_path, "model file")->required();
  tune_cmd->add_option("--dev", opt.dev_path, "development corpus")
      ->required();
  tune_cmd->add_option("--out", opt.out_path, "tuned model output path")
      ->required();
  tune_cmd->add_option("--format", opt.format, "corpus format")
      ->check(format_names);
  tune_cmd->add_option("--brown", opt.brown, "Brown cluster file");
  tune_cmd->add_option("--threads", opt.threads, "worker threads");
  tune_cmd->add_option("--penalty-grid", opt.grid, "offset grid")
      ->check(grid_check);

  CLI::App* stats_cmd =
      app.add_subcommand("stats", "Corpus and overlap statistics");
  stats_cmd->add_option("--input", opt.input_path, "corpus file")->required();
  stats_cmd->add_option("--format", opt.format, "corpus format")
      ->check(format_names);

  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Measure decoding throughput");
  bench_cmd->add_option("--model", opt.model_path, "model file")->required();
  bench_cmd->add_option("--input", opt.input_path, "corpus file")->required();
  bench_cmd->add_option("--format", opt.format, "corpus format")
      ->check(format_names);
  bench_cmd->add_option("--brown", opt.brown, "Brown cluster file");

  CLI::App* spurious_cmd = app.add_subcommand(
      "demo-spurious",
      "Show the inflated hypergraph normalization on the restricted graph");
  spurious_cmd->add_option("--weights", opt.weights,
                           "potentials for edges A..F, comma separated")
      ->check(weights_check);

  CLI::App* uniqueness_cmd = app.add_subcommand(
      "demo-uniqueness", "Exhaustively check the separator encoding");
  uniqueness_cmd->add_option("--tokens", opt.tokens, "sentence length (1-5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) {
      run_train(opt);
    } else if (*predict_cmd) {
      run_predict(opt);
    } else if (*evaluate_cmd) {
      run_evaluate(opt);
    } else if (*tune_cmd) {
      run_tune_penalty(opt);
    } else if (*stats_cmd) {
      run_stats(opt);
    } else if (*bench_cmd) {
      run_bench(opt);
    } else if (*spurious_cmd) {
      run_demo_spurious(opt);
    } else if (*uniqueness_cmd) {
      run_demo_uniqueness(opt);
    }
    return 0;
  } catch (const CapacityError& e) {
    log::error("capacity error: ", e.what());
    return 3;
  } catch (const DataError& e) {
    log::error("data error: ", e.what());
    return 2;
  } catch (const std::exception& e) {
    log::error(e.what());
    return 2;
  }
}
