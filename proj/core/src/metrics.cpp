#include "bpekit/metrics.hpp"

#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpekit/codec.hpp"
#include "bpekit/unicode.hpp"

namespace bpekit {

namespace {

using nlohmann::json;

json optional_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

PieceClass classify_piece(const Piece& piece) {
  switch (piece.kind) {
    case PieceKind::Special:
    case PieceKind::Code:
    case PieceKind::WhitespaceRun:
      return PieceClass::Structural;
    case PieceKind::ByteFallback:
      return PieceClass::Continuation;
    default:
      break;
  }
  std::string_view s = piece.surface;
  const bool marker_initial =
      s.size() >= kMarkerUtf8.size() &&
      s.compare(0, kMarkerUtf8.size(), kMarkerUtf8) == 0;
  std::string_view stripped = s;
  while (stripped.size() >= kMarkerUtf8.size() &&
         stripped.compare(0, kMarkerUtf8.size(), kMarkerUtf8) == 0) {
    stripped.remove_prefix(kMarkerUtf8.size());
  }
  if (!stripped.empty()) {
    bool all_punct = true;
    for (char32_t cp : decode_utf8(stripped)) {
      if (!is_punctuation(cp)) {
        all_punct = false;
        break;
      }
    }
    if (all_punct) return PieceClass::PunctuationOnly;
  }
  return marker_initial ? PieceClass::WordStart : PieceClass::Continuation;
}

MetricCounts count_pieces(const std::vector<Piece>& pieces) {
  MetricCounts counts;
  bool in_word = false;
  std::int64_t run_length = 0;
  auto close_word = [&] {
    if (in_word && run_length >= 2) ++counts.split_word_count;
  };
  for (const Piece& piece : pieces) {
    switch (classify_piece(piece)) {
      case PieceClass::Structural:
      case PieceClass::PunctuationOnly:
        break;  // dropped; an open word run continues across them
      case PieceClass::WordStart:
        close_word();
        in_word = true;
        run_length = 1;
        ++counts.word_count;
        ++counts.token_count;
        break;
      case PieceClass::Continuation:
        ++counts.token_count;
        if (in_word) ++run_length;
        break;
    }
  }
  close_word();
  return counts;
}

std::optional<double> fertility(const std::vector<Piece>& pieces) {
  const MetricCounts c = count_pieces(pieces);
  if (c.word_count == 0) return std::nullopt;
  return static_cast<double>(c.token_count) /
         static_cast<double>(c.word_count);
}

std::optional<double> continued_proportion(const std::vector<Piece>& pieces) {
  const MetricCounts c = count_pieces(pieces);
  if (c.word_count == 0) return std::nullopt;
  return static_cast<double>(c.split_word_count) /
         static_cast<double>(c.word_count);
}

EvalReport evaluate_corpus(const TokenizerModel& model, const Corpus& corpus,
                           std::string label, int threads) {
  const std::size_t n = corpus.size();
  const std::size_t nthreads = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(1, threads)),
      std::max<std::size_t>(n, 1));
  std::vector<MetricCounts> partial(nthreads);
  std::vector<std::exception_ptr> errors(nthreads);
  auto work = [&](std::size_t b, std::size_t e, std::size_t k) {
    try {
      for (std::size_t d = b; d < e; ++d) {
        const EncodedSequence seq = encode(model, corpus[d].text);
        std::vector<Piece> pieces;
        pieces.reserve(seq.ids.size());
        for (const int id : seq.ids) pieces.push_back(model.id_to_piece(id));
        partial[k] += count_pieces(pieces);
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (nthreads <= 1) {
    work(0, n, 0);
  } else {
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < nthreads; ++k) {
      const std::size_t b = k * chunk;
      const std::size_t e = std::min(n, b + chunk);
      if (b >= e) break;
      pool.emplace_back(work, b, e, k);
    }
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  MetricCounts total;
  for (const MetricCounts& c : partial) total += c;
  EvalReport report;
  report.label = std::move(label);
  report.word_count = total.word_count;
  report.token_count = total.token_count;
  report.split_word_count = total.split_word_count;
  if (total.word_count > 0) {
    report.fertility = static_cast<double>(total.token_count) /
                       static_cast<double>(total.word_count);
    report.continued_proportion =
        static_cast<double>(total.split_word_count) /
        static_cast<double>(total.word_count);
  }
  return report;
}

std::string eval_report_to_json(const EvalReport& report) {
  json j;
  j["label"] = report.label;
  j["word_count"] = report.word_count;
  j["token_count"] = report.token_count;
  j["split_word_count"] = report.split_word_count;
  j["fertility"] = optional_to_json(report.fertility);
  j["continued_proportion"] = optional_to_json(report.continued_proportion);
  return j.dump();
}

}  // namespace bpekit
