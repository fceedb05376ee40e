#include "bpekit/analysis.hpp"

#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace bpekit {

namespace {

using nlohmann::json;

bool is_learned(PieceKind kind) {
  return kind == PieceKind::Regular || kind == PieceKind::SingleChar;
}

json report_to_json_obj(const EvalReport& report) {
  return json::parse(eval_report_to_json(report));
}

std::string csv_field(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

}  // namespace

double vocab_overlap(const TokenizerModel& a, const TokenizerModel& b) {
  std::unordered_set<std::string_view> in_b;
  for (const Piece& p : b.vocab.pieces()) {
    if (is_learned(p.kind)) in_b.insert(p.surface);
  }
  std::int64_t denom = 0;
  std::int64_t shared = 0;
  for (const Piece& p : a.vocab.pieces()) {
    if (!is_learned(p.kind)) continue;
    ++denom;
    if (in_b.count(p.surface)) ++shared;
  }
  if (denom == 0) return 1.0;
  return static_cast<double>(shared) / static_cast<double>(denom);
}

CrossEvalMatrix cross_evaluate(const std::vector<TokenizerModel>& models,
                               const std::vector<std::string>& model_labels,
                               const std::vector<Corpus>& corpora,
                               const std::vector<std::string>& corpus_labels,
                               int threads) {
  if (models.size() != model_labels.size() ||
      corpora.size() != corpus_labels.size()) {
    throw ConfigError("cross_evaluate labels must match models and corpora");
  }
  CrossEvalMatrix matrix;
  matrix.model_labels = model_labels;
  matrix.corpus_labels = corpus_labels;
  matrix.cells.resize(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t c = 0; c < corpora.size(); ++c) {
      matrix.cells[m].push_back(
          evaluate_corpus(models[m], corpora[c],
                          model_labels[m] + "/" + corpus_labels[c], threads));
    }
  }
  return matrix;
}

SweepReport sweep_vocab_sizes(
    const Corpus& training,
    const std::map<std::string, Corpus>& eval_corpora,
    const std::vector<int>& sizes, const TrainerConfig& base_config,
    const std::map<std::string, TokenizerModel>& reference_models,
    const TrainOptions& options) {
  if (sizes.empty()) throw ConfigError("sweep needs at least one size");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw ConfigError("sweep sizes must be strictly increasing");
    }
  }
  SweepReport report;
  for (const int size : sizes) {
    TrainerConfig config = base_config;
    config.vocabulary_size = size;
    TokenizerModel model;
    try {
      model = train_bpe(training, config, options);
    } catch (const std::exception& e) {
      report.errors.push_back("training at vocabulary size " +
                              std::to_string(size) + " failed: " + e.what());
      report.complete = false;
      break;
    }
    SweepRow row;
    row.vocabulary_size = size;
    for (const auto& [label, corpus] : eval_corpora) {
      row.evals.emplace(
          label, evaluate_corpus(model, corpus, label, options.threads));
    }
    for (const auto& [label, reference] : reference_models) {
      row.overlaps.emplace(label, vocab_overlap(reference, model));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string cross_eval_to_json(const CrossEvalMatrix& matrix) {
  json j;
  j["models"] = matrix.model_labels;
  j["corpora"] = matrix.corpus_labels;
  json cells = json::array();
  for (const auto& row : matrix.cells) {
    json jrow = json::array();
    for (const EvalReport& report : row) {
      jrow.push_back(report_to_json_obj(report));
    }
    cells.push_back(std::move(jrow));
  }
  j["cells"] = std::move(cells);
  return j.dump();
}

std::string sweep_to_json(const SweepReport& report) {
  json j;
  j["complete"] = report.complete;
  j["errors"] = report.errors;
  json rows = json::array();
  for (const SweepRow& row : report.rows) {
    json jrow;
    jrow["vocabulary_size"] = row.vocabulary_size;
    json evals = json::object();
    for (const auto& [label, r] : row.evals) {
      evals[label] = report_to_json_obj(r);
    }
    jrow["evals"] = std::move(evals);
    jrow["overlaps"] = row.overlaps;
    rows.push_back(std::move(jrow));
  }
  j["rows"] = std::move(rows);
  return j.dump();
}

std::string sweep_to_csv(const SweepReport& report) {
  std::ostringstream os;
  os << "vocabulary_size,label,fertility,continued_proportion,overlap\n";
  for (const SweepRow& row : report.rows) {
    std::set<std::string> labels;
    for (const auto& [label, r] : row.evals) labels.insert(label);
    for (const auto& [label, v] : row.overlaps) labels.insert(label);
    for (const std::string& label : labels) {
      os << row.vocabulary_size << ',' << label << ',';
      if (const auto it = row.evals.find(label); it != row.evals.end()) {
        os << csv_field(it->second.fertility) << ','
           << csv_field(it->second.continued_proportion);
      } else {
        os << ',';
      }
      os << ',';
      if (const auto it = row.overlaps.find(label); it != row.overlaps.end()) {
        os << csv_field(std::optional<double>(it->second));
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace bpekit
