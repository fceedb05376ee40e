#include <doctest.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <bpekit/metrics.hpp>
#include <bpekit/model.hpp>
#include <bpekit/unicode.hpp>

#include "support/model_builder.hpp"

using namespace bpekit;
using testsupport::build_model;

namespace {

const std::string M(kMarkerUtf8);

Piece special(std::string s) { return {std::move(s), PieceKind::Special}; }
Piece code(std::string s) { return {std::move(s), PieceKind::Code}; }
Piece byte(std::string s) { return {std::move(s), PieceKind::ByteFallback}; }
Piece regular(std::string s) { return {std::move(s), PieceKind::Regular}; }
Piece single(std::string s) { return {std::move(s), PieceKind::SingleChar}; }
Piece ws(std::string s) { return {std::move(s), PieceKind::WhitespaceRun}; }

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("classify_piece partitions the vocabulary kinds") {
  CHECK(classify_piece(special("<pad>")) == PieceClass::Structural);
  CHECK(classify_piece(code("<|python|>")) == PieceClass::Structural);
  CHECK(classify_piece(ws(M + M)) == PieceClass::Structural);
  CHECK(classify_piece(byte("<0x41>")) == PieceClass::Continuation);

  CHECK(classify_piece(regular(M + "ab")) == PieceClass::WordStart);
  CHECK(classify_piece(single(M)) == PieceClass::WordStart);
  CHECK(classify_piece(regular("ab")) == PieceClass::Continuation);
  CHECK(classify_piece(single("a")) == PieceClass::Continuation);

  CHECK(classify_piece(single(".")) == PieceClass::PunctuationOnly);
  CHECK(classify_piece(regular(M + ".")) == PieceClass::PunctuationOnly);
  CHECK(classify_piece(regular(M + "?!")) == PieceClass::PunctuationOnly);
  // Mixed letter and punctuation counts as word material.
  CHECK(classify_piece(regular("a.")) == PieceClass::Continuation);
  CHECK(classify_piece(regular(M + "a.")) == PieceClass::WordStart);
}

TEST_CASE("count_pieces tallies words, tokens and split words") {
  CHECK(count_pieces({regular(M + "ab")}) == MetricCounts{1, 1, 0});
  CHECK(count_pieces({regular(M + "a"), single("b")}) == MetricCounts{1, 2, 1});
  CHECK(count_pieces({regular(M + "a"), single("b"), regular(M + "c")}) ==
        MetricCounts{2, 3, 1});
  CHECK(count_pieces({single(M), byte("<0xC3>"), byte("<0xA9>")}) ==
        MetricCounts{1, 3, 1});
  CHECK(count_pieces({}) == MetricCounts{0, 0, 0});
}

TEST_CASE("dropped pieces keep the surrounding word run open") {
  // ▁a . b : the punctuation contributes nothing, but b still continues ▁a.
  CHECK(count_pieces({regular(M + "a"), single("."), single("b")}) ==
        MetricCounts{1, 2, 1});
  // Structural pieces behave the same way.
  CHECK(count_pieces({special("<s>"), regular(M + "a"), ws(M + M),
                      single("b"), special("<|endoftext|>")}) ==
        MetricCounts{1, 2, 1});
}

TEST_CASE("a leading continuation counts tokens but no word") {
  CHECK(count_pieces({single("b"), regular(M + "a")}) ==
        MetricCounts{1, 2, 0});
}

TEST_CASE("fertility and continued proportion are absent without words") {
  CHECK(!fertility({}).has_value());
  CHECK(!continued_proportion({}).has_value());
  CHECK(!fertility({single("."), special("<pad>")}).has_value());

  const std::vector<Piece> two{regular(M + "a"), single("b")};
  CHECK(fertility(two) == 2.0);
  CHECK(continued_proportion(two) == 1.0);
}

TEST_CASE("evaluate_corpus sums counts over documents") {
  const TokenizerModel model = build_model({M, "a", "b"}, {{M, "a"}});
  Corpus corpus;
  corpus.push_back({"a", "xx", "t"});     // ▁a            -> 1 word, 1 token
  corpus.push_back({"b b", "xx", "t"});   // ▁ b ▁ b       -> 2 words, 4 tokens
  const EvalReport report = evaluate_corpus(model, corpus, "mix");
  CHECK(report.label == "mix");
  CHECK(report.word_count == 3);
  CHECK(report.token_count == 5);
  CHECK(report.split_word_count == 2);
  // Sum over documents, not a mean of per-document ratios (that would be 1.5).
  CHECK(report.fertility == 5.0 / 3.0);
  CHECK(report.continued_proportion == 2.0 / 3.0);
}

TEST_CASE("evaluate_corpus is invariant to the thread count") {
  const TokenizerModel model = build_model({M, "a", "b"}, {{"a", "b"}});
  Corpus corpus;
  for (int i = 0; i < 23; ++i)
    corpus.push_back({i % 2 ? "ab ab a" : "b a  ab", "xx", "t"});
  const EvalReport serial = evaluate_corpus(model, corpus, "x", 1);
  const EvalReport parallel = evaluate_corpus(model, corpus, "x", 4);
  CHECK(serial.word_count == parallel.word_count);
  CHECK(serial.token_count == parallel.token_count);
  CHECK(serial.split_word_count == parallel.split_word_count);
}

TEST_CASE("evaluate_corpus of an empty corpus reports absent metrics") {
  const TokenizerModel model = build_model({M, "a"}, {});
  const EvalReport report = evaluate_corpus(model, {}, "empty");
  CHECK(report.word_count == 0);
  CHECK(!report.fertility.has_value());
  CHECK(!report.continued_proportion.has_value());
}

TEST_CASE("eval reports serialize to canonical JSON with null for absent") {
  EvalReport report;
  report.label = "sv";
  report.word_count = 4;
  report.token_count = 6;
  report.split_word_count = 1;
  report.fertility = 1.5;
  report.continued_proportion = 0.25;
  const auto j = nlohmann::json::parse(eval_report_to_json(report));
  CHECK(j.at("label") == "sv");
  CHECK(j.at("word_count") == 4);
  CHECK(j.at("token_count") == 6);
  CHECK(j.at("split_word_count") == 1);
  CHECK(j.at("fertility") == 1.5);
  CHECK(j.at("continued_proportion") == 0.25);

  const auto empty = nlohmann::json::parse(eval_report_to_json(EvalReport{}));
  CHECK(empty.at("fertility").is_null());
  CHECK(empty.at("continued_proportion").is_null());
}

TEST_SUITE_END();
