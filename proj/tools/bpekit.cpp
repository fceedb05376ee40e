// bpekit command line: sample, train, encode, decode, eval, overlap,
// cross-eval, sweep. Results go to --out files or standard output;
// diagnostics go to standard error only.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data or model
// error.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <bpekit/analysis.hpp>
#include <bpekit/codec.hpp>
#include <bpekit/corpus.hpp>
#include <bpekit/errors.hpp>
#include <bpekit/metrics.hpp>
#include <bpekit/model.hpp>
#include <bpekit/trainer.hpp>

namespace fs = std::filesystem;
using namespace bpekit;

namespace {

int g_verbosity = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
  if (g_verbosity >= 1) std::cerr << "bpekit: " << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (g_verbosity >= 2) std::cerr << "bpekit: " << msg << '\n';
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "bpekit: warning: " << w << '\n';
}

void write_result(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw DataError("failed while writing '" + path + "'");
}

Corpus load_corpora(const std::vector<std::string>& paths, bool lenient) {
  Corpus corpus;
  for (const auto& path : paths) {
    std::vector<std::string> line_errors;
    Corpus part = load_jsonl(path, lenient, &line_errors);
    for (const auto& err : line_errors)
      std::cerr << "bpekit: warning: skipped: " << err << '\n';
    log_debug("loaded " + std::to_string(part.size()) + " documents from '" +
              path + "'");
    corpus.insert(corpus.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  return corpus;
}

// "label=path" -> (label, path); bare paths are labeled by their file stem.
std::pair<std::string, std::string> split_labeled_path(const std::string& arg) {
  auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0 && eq + 1 < arg.size())
    return {arg.substr(0, eq), arg.substr(eq + 1)};
  return {fs::path(arg).stem().string(), arg};
}

// (label, path) for every regular `extension` file in `dir`, sorted by
// label so directory enumeration order never leaks into results.
std::vector<std::pair<std::string, std::string>> list_files(
    const std::string& dir, const std::string& extension) {
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec)
    throw DataError("cannot read directory '" + dir + "': " + ec.message());
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() == extension)
      files.emplace_back(entry.path().stem().string(), entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw DataError("no '*" + extension + "' files in '" + dir + "'");
  return files;
}

void add_config_flags(CLI::App* cmd, TrainerConfig& config,
                      bool with_vocab_size) {
  if (with_vocab_size)
    cmd->add_option("--vocab-size", config.vocabulary_size,
                    "Total vocabulary size, all blocks included")
        ->capture_default_str();
  cmd->add_option("--coverage", config.character_coverage,
                  "Fraction of corpus characters the alphabet must cover")
      ->capture_default_str();
  cmd->add_flag("--split-digits,!--no-split-digits", config.split_digits,
                "Keep digits as single-character pieces");
  cmd->add_flag("--byte-fallback,!--no-byte-fallback", config.byte_fallback,
                "Escape uncovered characters as byte pieces");
  cmd->add_flag("--dummy-prefix,!--no-dummy-prefix", config.add_dummy_prefix,
                "Prepend a word marker to every text");
  cmd->add_option("--user-symbol", config.user_defined_symbols,
                  "Protected symbol kept unsplit (repeatable)")
      ->allow_extra_args(false);
  cmd->add_option("--max-ws-run", config.max_ws_run,
                  "Longest whitespace-run piece, in markers")
      ->capture_default_str();
  cmd->add_option("--max-piece-length", config.max_piece_length,
                  "Longest merge result, in code points")
      ->capture_default_str();
}

struct SampleCli {
  std::string spec;
  std::string out;
  double fraction = 0;
  bool fraction_given = false;
};

void run_sample(const SampleCli& cli, bool seed_given, std::uint64_t seed) {
  CorpusSpec spec = load_corpus_spec(cli.spec);
  if (seed_given) spec.seed = seed;
  if (cli.fraction_given) spec.sampling_fraction = cli.fraction;
  Corpus sampled = sample_weighted(spec);
  write_jsonl(sampled, cli.out);
  log_info("sampled " + std::to_string(sampled.size()) + " documents into '" +
           cli.out + "'");
}

struct TrainCli {
  std::vector<std::string> corpora;
  std::string out;
  TrainerConfig config;
  bool lenient = false;
  bool verify = false;
};

void run_train(const TrainCli& cli, int threads, bool seed_given,
               std::uint64_t seed) {
  TrainerConfig config = cli.config;
  if (seed_given) config.seed = seed;
  Corpus corpus = load_corpora(cli.corpora, cli.lenient);
  log_info("training on " + std::to_string(corpus.size()) + " documents");
  TrainOptions options;
  options.threads = threads;
  options.verify_counts = cli.verify;
  std::vector<std::string> warnings;
  options.warnings = &warnings;
  TokenizerModel model = train_bpe(corpus, config, options);
  print_warnings(warnings);
  save_model(model, cli.out);
  log_info("wrote '" + cli.out + "': " + std::to_string(model.vocab.size()) +
           " pieces, " + std::to_string(model.merges.size()) + " merges");
}

struct EncodeCli {
  std::string model;
  std::string in;
  std::string out;
  bool pieces = false;
  bool bos = false;
  bool eos = false;
};

struct DecodeCli {
  std::string model;
  std::string in;
  std::string out;
  bool lenient = false;
};

// Opens --in/--out or falls back to the standard streams; `file` and
// `ofile` own the handles and must outlive the returned pointers.
std::istream* open_input(const std::string& path, std::ifstream& file) {
  if (path.empty()) return &std::cin;
  file.open(path, std::ios::binary);
  if (!file) throw DataError("cannot open '" + path + "'");
  return &file;
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return &std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw DataError("cannot open '" + path + "' for writing");
  return &file;
}

void run_encode(const EncodeCli& cli) {
  TokenizerModel model = load_model(cli.model);
  std::ifstream in_file;
  std::ofstream out_file;
  std::istream* in = open_input(cli.in, in_file);
  std::ostream* out = open_output(cli.out, out_file);
  EncodeOptions options;
  options.add_bos = cli.bos;
  options.add_eos = cli.eos;
  std::string line;
  std::int64_t lines = 0;
  while (std::getline(*in, line)) {
    EncodedSequence seq = encode(model, line, options);
    if (cli.pieces) {
      for (std::size_t i = 0; i < seq.pieces.size(); ++i) {
        if (i) *out << ' ';
        *out << seq.pieces[i];
      }
    } else {
      for (std::size_t i = 0; i < seq.ids.size(); ++i) {
        if (i) *out << ' ';
        *out << seq.ids[i];
      }
    }
    *out << '\n';
    ++lines;
  }
  out->flush();
  if (!*out) throw DataError("failed while writing output");
  log_debug("encoded " + std::to_string(lines) + " lines");
}

void run_decode(const DecodeCli& cli) {
  TokenizerModel model = load_model(cli.model);
  std::ifstream in_file;
  std::ofstream out_file;
  std::istream* in = open_input(cli.in, in_file);
  std::ostream* out = open_output(cli.out, out_file);
  DecodeOptions options;
  options.lenient = cli.lenient;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    std::vector<int> ids;
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      int id = 0;
      auto [ptr, ec] =
          std::from_chars(token.data(), token.data() + token.size(), id);
      if (ec != std::errc() || ptr != token.data() + token.size())
        throw DataError("invalid token id '" + token + "' on line " +
                        std::to_string(line_no));
      ids.push_back(id);
    }
    *out << decode(model, ids, options) << '\n';
  }
  out->flush();
  if (!*out) throw DataError("failed while writing output");
  log_debug("decoded " + std::to_string(line_no) + " lines");
}

struct EvalCli {
  std::string model;
  std::string corpus;
  std::string label;
  std::string out;
  bool per_language = false;
  bool lenient = false;
};

void run_eval(const EvalCli& cli, int threads) {
  TokenizerModel model = load_model(cli.model);
  Corpus corpus = load_corpora({cli.corpus}, cli.lenient);
  std::string content;
  if (cli.per_language) {
    std::string body;
    for (const auto& [lang, docs] : split_by_language(corpus)) {
      EvalReport report = evaluate_corpus(model, docs, lang, threads);
      if (!body.empty()) body += ',';
      body += eval_report_to_json(report);
    }
    content = "[" + body + "]\n";
  } else {
    std::string label =
        cli.label.empty() ? fs::path(cli.corpus).stem().string() : cli.label;
    EvalReport report = evaluate_corpus(model, corpus, label, threads);
    content = eval_report_to_json(report) + "\n";
  }
  write_result(cli.out, content);
}

struct OverlapCli {
  std::string model_a;
  std::string model_b;
};

void run_overlap(const OverlapCli& cli) {
  TokenizerModel a = load_model(cli.model_a);
  TokenizerModel b = load_model(cli.model_b);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g\n", vocab_overlap(a, b));
  std::cout << buf;
  std::cout.flush();
}

struct CrossEvalCli {
  std::string models_dir;
  std::string corpora_dir;
  std::string out;
  bool lenient = false;
};

void run_cross_eval(const CrossEvalCli& cli, int threads) {
  std::vector<TokenizerModel> models;
  std::vector<std::string> model_labels;
  for (const auto& [label, path] : list_files(cli.models_dir, ".json")) {
    models.push_back(load_model(path));
    model_labels.push_back(label);
  }
  std::vector<Corpus> corpora;
  std::vector<std::string> corpus_labels;
  for (const auto& [label, path] : list_files(cli.corpora_dir, ".jsonl")) {
    corpora.push_back(load_corpora({path}, cli.lenient));
    corpus_labels.push_back(label);
  }
  log_info("evaluating " + std::to_string(models.size()) + " models x " +
           std::to_string(corpora.size()) + " corpora");
  CrossEvalMatrix matrix =
      cross_evaluate(models, model_labels, corpora, corpus_labels, threads);
  write_result(cli.out, cross_eval_to_json(matrix) + "\n");
}

struct SweepCli {
  std::string corpus;
  std::vector<int> sizes;
  std::vector<std::string> eval_corpora;      // label=path
  std::vector<std::string> reference_models;  // label=path
  std::string out;
  std::string csv;
  TrainerConfig config;
  bool lenient = false;
};

void run_sweep(const SweepCli& cli, int threads, bool seed_given,
               std::uint64_t seed) {
  TrainerConfig config = cli.config;
  if (seed_given) config.seed = seed;
  Corpus training = load_corpora({cli.corpus}, cli.lenient);
  std::map<std::string, Corpus> eval_corpora;
  if (cli.eval_corpora.empty()) {
    eval_corpora["train"] = training;
  } else {
    for (const auto& arg : cli.eval_corpora) {
      auto [label, path] = split_labeled_path(arg);
      eval_corpora[label] = load_corpora({path}, cli.lenient);
    }
  }
  std::map<std::string, TokenizerModel> references;
  for (const auto& arg : cli.reference_models) {
    auto [label, path] = split_labeled_path(arg);
    references.emplace(label, load_model(path));
  }
  TrainOptions options;
  options.threads = threads;
  SweepReport report = sweep_vocab_sizes(training, eval_corpora, cli.sizes,
                                         config, references, options);
  write_result(cli.out, sweep_to_json(report) + "\n");
  if (!cli.csv.empty()) write_result(cli.csv, sweep_to_csv(report));
  for (const auto& err : report.errors)
    std::cerr << "bpekit: error: " << err << '\n';
  if (!report.complete)
    throw DataError("sweep stopped early; partial results were written");
  log_info("swept " + std::to_string(report.rows.size()) + " sizes");
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);

  CLI::App app{"Lossless multilingual BPE tokenizer toolkit"};
  app.name("bpekit");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("bpekit 0.1.0 (model format ") +
                           std::to_string(kModelFormatVersion) + ")");

  int threads = 1;
  app.add_option("--threads", threads,
                 "Worker threads; results are thread-count invariant")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  std::uint64_t seed = 0;
  auto* seed_opt =
      app.add_option("--seed", seed, "Seed override for sample/train/sweep");
  std::string log_level = "info";
  app.add_option("--log-level", log_level,
                 "Diagnostics verbosity on standard error")
      ->check(CLI::IsMember({"quiet", "info", "debug"}))
      ->capture_default_str();

  std::function<void()> action;

  auto sample_cli = std::make_shared<SampleCli>();
  auto* sample = app.add_subcommand(
      "sample", "Draw a weighted Bernoulli sample from corpus sources");
  sample->add_option("--spec", sample_cli->spec, "Sampling spec JSON file")
      ->required();
  sample->add_option("--out", sample_cli->out, "Output JSONL file")->required();
  auto* fraction_opt = sample->add_option(
      "--fraction", sample_cli->fraction,
      "Sampling fraction in (0,1]; overrides the spec file");
  sample->callback([&action, sample_cli, fraction_opt, seed_opt, &seed] {
    sample_cli->fraction_given = fraction_opt->count() > 0;
    bool seed_given = seed_opt->count() > 0;
    action = [sample_cli, seed_given, &seed] {
      run_sample(*sample_cli, seed_given, seed);
    };
  });

  auto train_cli = std::make_shared<TrainCli>();
  auto* train =
      app.add_subcommand("train", "Train a BPE tokenizer on JSONL corpora");
  train->add_option("--corpus", train_cli->corpora,
                    "Training corpus JSONL file (repeatable)")
      ->required()
      ->allow_extra_args(false);
  train->add_option("--out", train_cli->out, "Output model JSON file")
      ->required();
  add_config_flags(train, train_cli->config, true);
  train->add_flag("--lenient", train_cli->lenient,
                  "Skip malformed corpus lines instead of failing");
  train->add_flag("--verify-counts", train_cli->verify,
                  "Cross-check incremental pair counts every merge (slow)");
  train->callback([&action, train_cli, seed_opt, &seed, &threads] {
    bool seed_given = seed_opt->count() > 0;
    action = [train_cli, seed_given, &seed, &threads] {
      run_train(*train_cli, threads, seed_given, seed);
    };
  });

  auto encode_cli = std::make_shared<EncodeCli>();
  auto* encode_cmd = app.add_subcommand(
      "encode", "Encode text lines into token ids or piece surfaces");
  encode_cmd->add_option("--model", encode_cli->model, "Tokenizer model file")
      ->required();
  bool ids_flag_value = false;
  auto* ids_flag = encode_cmd->add_flag("--ids", ids_flag_value,
                                        "Write token ids (default)");
  auto* pieces_flag = encode_cmd->add_flag(
      "--pieces", encode_cli->pieces, "Write piece surfaces, space separated");
  ids_flag->excludes(pieces_flag);
  pieces_flag->excludes(ids_flag);
  encode_cmd->add_flag("--bos", encode_cli->bos,
                       "Prepend the bos id to every line");
  encode_cmd->add_flag("--eos", encode_cli->eos,
                       "Append the eos id to every line");
  encode_cmd->add_option("--in", encode_cli->in,
                         "Input text file (default: standard input)");
  encode_cmd->add_option("--out", encode_cli->out,
                         "Output file (default: standard output)");
  encode_cmd->callback([&action, encode_cli] {
    action = [encode_cli] { run_encode(*encode_cli); };
  });

  auto decode_cli = std::make_shared<DecodeCli>();
  auto* decode_cmd = app.add_subcommand(
      "decode", "Decode lines of space-separated token ids back into text");
  decode_cmd->add_option("--model", decode_cli->model, "Tokenizer model file")
      ->required();
  decode_cmd->add_flag(
      "--lenient", decode_cli->lenient,
      "Replace invalid byte sequences with U+FFFD instead of failing");
  decode_cmd->add_option("--in", decode_cli->in,
                         "Input id file (default: standard input)");
  decode_cmd->add_option("--out", decode_cli->out,
                         "Output file (default: standard output)");
  decode_cmd->callback([&action, decode_cli] {
    action = [decode_cli] { run_decode(*decode_cli); };
  });

  auto eval_cli = std::make_shared<EvalCli>();
  auto* eval_cmd = app.add_subcommand(
      "eval", "Measure fertility and continued-word proportion on a corpus");
  eval_cmd->add_option("--model", eval_cli->model, "Tokenizer model file")
      ->required();
  eval_cmd->add_option("--corpus", eval_cli->corpus, "Evaluation JSONL file")
      ->required();
  eval_cmd->add_flag("--per-language", eval_cli->per_language,
                     "Emit one report per language tag");
  eval_cmd->add_option("--label", eval_cli->label,
                       "Report label (default: corpus file stem)");
  eval_cmd->add_option("--out", eval_cli->out,
                       "Output JSON file (default: standard output)");
  eval_cmd->add_flag("--lenient", eval_cli->lenient,
                     "Skip malformed corpus lines instead of failing");
  eval_cmd->callback([&action, eval_cli, &threads] {
    action = [eval_cli, &threads] { run_eval(*eval_cli, threads); };
  });

  auto overlap_cli = std::make_shared<OverlapCli>();
  auto* overlap_cmd = app.add_subcommand(
      "overlap", "Print the learned-vocabulary overlap of two models");
  overlap_cmd->add_option("--model-a", overlap_cli->model_a,
                          "Model whose vocabulary is the denominator")
      ->required();
  overlap_cmd->add_option("--model-b", overlap_cli->model_b, "Model to compare")
      ->required();
  overlap_cmd->callback([&action, overlap_cli] {
    action = [overlap_cli] { run_overlap(*overlap_cli); };
  });

  auto cross_cli = std::make_shared<CrossEvalCli>();
  auto* cross_cmd = app.add_subcommand(
      "cross-eval", "Evaluate every model in a directory on every corpus");
  cross_cmd->add_option("--models", cross_cli->models_dir,
                        "Directory of *.json models")
      ->required();
  cross_cmd->add_option("--corpora", cross_cli->corpora_dir,
                        "Directory of *.jsonl corpora")
      ->required();
  cross_cmd->add_option("--out", cross_cli->out,
                        "Output JSON file (default: standard output)");
  cross_cmd->add_flag("--lenient", cross_cli->lenient,
                      "Skip malformed corpus lines instead of failing");
  cross_cmd->callback([&action, cross_cli, &threads] {
    action = [cross_cli, &threads] { run_cross_eval(*cross_cli, threads); };
  });

  auto sweep_cli = std::make_shared<SweepCli>();
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Train at several vocabulary sizes and compare metrics");
  sweep_cmd->add_option("--corpus", sweep_cli->corpus, "Training JSONL file")
      ->required();
  sweep_cmd->add_option("--sizes", sweep_cli->sizes,
                        "Comma-separated vocabulary sizes, increasing")
      ->required()
      ->delimiter(',')
      ->allow_extra_args(false);
  sweep_cmd->add_option("--eval-corpus", sweep_cli->eval_corpora,
                        "label=path eval corpus (repeatable; default: the "
                        "training corpus as 'train')")
      ->allow_extra_args(false);
  sweep_cmd->add_option("--reference-model", sweep_cli->reference_models,
                        "label=path overlap reference model (repeatable)")
      ->allow_extra_args(false);
  sweep_cmd->add_option("--out", sweep_cli->out,
                        "Output JSON file (default: standard output)");
  sweep_cmd->add_option("--csv", sweep_cli->csv, "Also write a CSV table");
  add_config_flags(sweep_cmd, sweep_cli->config, false);
  sweep_cmd->add_flag("--lenient", sweep_cli->lenient,
                      "Skip malformed corpus lines instead of failing");
  sweep_cmd->callback([&action, sweep_cli, seed_opt, &seed, &threads] {
    bool seed_given = seed_opt->count() > 0;
    action = [sweep_cli, seed_given, &seed, &threads] {
      run_sweep(*sweep_cli, threads, seed_given, seed);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  g_verbosity = log_level == "quiet" ? 0 : log_level == "debug" ? 2 : 1;

  try {
    action();
  } catch (const ConfigError& e) {
    std::cerr << "bpekit: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "bpekit: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
