#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpekit/corpus.hpp"
#include "bpekit/model.hpp"

namespace bpekit {

// Role of a piece in the word-level metrics. Structural pieces (special,
// code, whitespace-run) and punctuation-only pieces are excluded from both
// fertility and the continued-word proportion.
enum class PieceClass { WordStart, Continuation, PunctuationOnly, Structural };

// Byte pieces are continuations; a surface is punctuation-only when the
// characters left after stripping leading markers are non-empty and all
// Unicode general category P*; a surface starting with the marker (the
// lone marker included) opens a word.
PieceClass classify_piece(const Piece& piece);

struct MetricCounts {
  std::int64_t word_count = 0;        // pieces classified WordStart
  std::int64_t token_count = 0;       // WordStart + Continuation pieces
  std::int64_t split_word_count = 0;  // words covered by >= 2 pieces

  MetricCounts& operator+=(const MetricCounts& other) {
    word_count += other.word_count;
    token_count += other.token_count;
    split_word_count += other.split_word_count;
    return *this;
  }
  bool operator==(const MetricCounts&) const = default;
};

MetricCounts count_pieces(const std::vector<Piece>& pieces);

// f = token_count / word_count; absent when there is no word.
std::optional<double> fertility(const std::vector<Piece>& pieces);
// p = split_word_count / word_count; absent when there is no word.
std::optional<double> continued_proportion(const std::vector<Piece>& pieces);

struct EvalReport {
  std::string label;
  std::int64_t word_count = 0;
  std::int64_t token_count = 0;
  std::int64_t split_word_count = 0;
  std::optional<double> fertility;
  std::optional<double> continued_proportion;
};

// Encodes every document and aggregates counts corpus-wide (sum over
// documents, not an average of per-document ratios).
EvalReport evaluate_corpus(const TokenizerModel& model, const Corpus& corpus,
                           std::string label, int threads = 1);

// One JSON object, canonical form (sorted keys, compact); absent metrics
// serialize as null.
std::string eval_report_to_json(const EvalReport& report);

}  // namespace bpekit
