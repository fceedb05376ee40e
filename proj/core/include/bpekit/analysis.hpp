#pragma once

#include <map>
#include <string>
#include <vector>

#include "bpekit/corpus.hpp"
#include "bpekit/metrics.hpp"
#include "bpekit/model.hpp"
#include "bpekit/trainer.hpp"

namespace bpekit {

// |learned(a) ∩ learned(b)| / |learned(a)| where learned = regular +
// single-char pieces; the structural blocks are identical by construction
// and excluded. Asymmetric in general. An empty denominator counts as
// full overlap so overlap(m, m) == 1 always holds.
double vocab_overlap(const TokenizerModel& a, const TokenizerModel& b);

struct CrossEvalMatrix {
  std::vector<std::string> model_labels;
  std::vector<std::string> corpus_labels;
  std::vector<std::vector<EvalReport>> cells;  // cells[model][corpus]
};

CrossEvalMatrix cross_evaluate(const std::vector<TokenizerModel>& models,
                               const std::vector<std::string>& model_labels,
                               const std::vector<Corpus>& corpora,
                               const std::vector<std::string>& corpus_labels,
                               int threads = 1);

struct SweepRow {
  int vocabulary_size = 0;
  std::map<std::string, EvalReport> evals;  // keyed by eval-corpus label
  // vocab_overlap(reference, swept model), keyed by reference label; the
  // reference vocabulary is the fixed denominator.
  std::map<std::string, double> overlaps;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<std::string> errors;  // non-empty when a training failed
  bool complete = true;
};

// Trains one model per size on `training` with the same config and seed,
// evaluates each on every eval corpus, and computes overlaps against the
// reference models. Sizes must be strictly increasing. A failed training
// stops the sweep and flags the partial report instead of discarding it.
SweepReport sweep_vocab_sizes(
    const Corpus& training,
    const std::map<std::string, Corpus>& eval_corpora,
    const std::vector<int>& sizes, const TrainerConfig& base_config,
    const std::map<std::string, TokenizerModel>& reference_models,
    const TrainOptions& options = {});

std::string cross_eval_to_json(const CrossEvalMatrix& matrix);
std::string sweep_to_json(const SweepReport& report);
// One row per (vocabulary_size, label): fertility/continued_proportion
// where the label names an eval corpus, overlap where it names a
// reference model; missing cells stay empty.
std::string sweep_to_csv(const SweepReport& report);

}  // namespace bpekit
