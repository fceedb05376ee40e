#include <doctest.h>

#include <string>
#include <vector>

#include <bpekit/codec.hpp>
#include <bpekit/errors.hpp>
#include <bpekit/model.hpp>
#include <bpekit/trainer.hpp>
#include <bpekit/unicode.hpp>

#include "support/corpus_gen.hpp"
#include "support/model_builder.hpp"

using namespace bpekit;
using testsupport::build_model;

namespace {

const std::string M(kMarkerUtf8);

using Pieces = std::vector<std::string>;

}  // namespace

TEST_SUITE_BEGIN("codec");

TEST_CASE("apply_merges follows rank order, leftmost first within a rank") {
  const TokenizerModel ranked =
      build_model({M, "a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  CHECK(apply_merges(ranked, {"a", "b", "c"}) == Pieces{"ab", "c"});
  CHECK(apply_merges(ranked, {"b", "c"}) == Pieces{"bc"});
  CHECK(apply_merges(ranked, {"c", "a"}) == Pieces{"c", "a"});
  CHECK(apply_merges(ranked, {"a"}) == Pieces{"a"});
  CHECK(apply_merges(ranked, {}).empty());

  const TokenizerModel chained =
      build_model({M, "a", "b", "c"}, {{"a", "b"}, {"ab", "c"}});
  CHECK(apply_merges(chained, {"a", "b", "c"}) == Pieces{"abc"});

  const TokenizerModel doubling = build_model({M, "a"}, {{"a", "a"}});
  CHECK(apply_merges(doubling, {"a", "a", "a"}) == Pieces{"aa", "a"});
}

TEST_CASE("encode applies merges per word and never across units") {
  const TokenizerModel model =
      build_model({M, "a", "b", "1", "2", "."},
                  {{M, "a"}, {M + "a", "b"}});
  CHECK(encode_pieces(model, "ab") == Pieces{M + "ab"});
  CHECK(encode_pieces(model, "ab ab") == Pieces{M + "ab", M + "ab"});
  // Digits sit between words; the (▁,a) merge cannot reach across.
  CHECK(encode_pieces(model, "1a") == Pieces{M, "1", "a"});
}

TEST_CASE("encode isolates digits with a standalone prefix marker") {
  const TokenizerModel model =
      build_model({M, "1", "2", "3", "4", "."}, {});
  CHECK(encode_pieces(model, "123.4") ==
        Pieces{M, "1", "2", "3", ".", "4"});

  TrainerConfig bare;
  bare.add_dummy_prefix = false;
  const TokenizerModel no_dummy =
      build_model({M, "1", "2", "3", "4", "."}, {}, bare);
  CHECK(encode_pieces(no_dummy, "123.4") ==
        Pieces{"1", "2", "3", ".", "4"});
}

TEST_CASE("encode routes control characters through byte pieces") {
  const TokenizerModel model = build_model({M, "a"}, {});
  CHECK(encode_pieces(model, "\n") == Pieces{M, "<0x0A>"});
  CHECK(decode(model, encode(model, "\n").ids) == "\n");

  TrainerConfig bare;
  bare.add_dummy_prefix = false;
  const TokenizerModel no_dummy = build_model({M, "a"}, {}, bare);
  CHECK(encode_pieces(no_dummy, "\n") == Pieces{"<0x0A>"});
  CHECK(decode(no_dummy, encode(no_dummy, "\n").ids) == "\n");
}

TEST_CASE("encode emits whitespace-run pieces and byte fallback") {
  const TokenizerModel model = build_model({M, "a"}, {});
  CHECK(encode_pieces(model, "  a") == Pieces{M + M + M, "a"});
  CHECK(encode_pieces(model, "\xC3\xA9") == Pieces{M, "<0xC3>", "<0xA9>"});
  CHECK_THROWS_AS(encode_pieces(model, "a\xC0\xAF"), DataError);
}

TEST_CASE("encode treats user symbols as atomic") {
  TrainerConfig config;
  config.user_defined_symbols = {"<|u|>"};
  const TokenizerModel model = build_model({M, "a"}, {}, config);
  CHECK(encode_pieces(model, "<|u|>a") == Pieces{"<|u|>", "a"});
  CHECK(encode_pieces(model, "a<|u|>") == Pieces{M, "a", "<|u|>"});
  CHECK(decode(model, encode(model, "a<|u|>a").ids) == "a<|u|>a");
}

TEST_CASE("encode ids parallel the pieces and honor bos/eos") {
  const TokenizerModel model = build_model({M, "a", "b"}, {{"a", "b"}});
  EncodeOptions options;
  options.add_bos = true;
  options.add_eos = true;
  const EncodedSequence seq = encode(model, "ab", options);
  REQUIRE(seq.ids.size() == seq.pieces.size());
  CHECK(seq.pieces.front() == "<s>");
  CHECK(seq.pieces.back() == "<|endoftext|>");
  CHECK(seq.ids.front() == kBosId);
  CHECK(seq.ids.back() == kEosId);
  for (std::size_t i = 0; i < seq.ids.size(); ++i) {
    CHECK(seq.ids[i] == model.piece_to_id(seq.pieces[i]));
  }
}

TEST_CASE("empty text encodes to the dummy prefix alone") {
  const TokenizerModel model = build_model({M, "a"}, {});
  CHECK(encode_pieces(model, "") == Pieces{M});
  CHECK(decode(model, encode(model, "").ids).empty());

  TrainerConfig bare;
  bare.add_dummy_prefix = false;
  const TokenizerModel no_dummy = build_model({M, "a"}, {}, bare);
  CHECK(encode_pieces(no_dummy, "").empty());
}

TEST_CASE("decode skips specials and passes code pieces verbatim") {
  TrainerConfig config;
  config.user_defined_symbols = {"<|u|>"};
  const TokenizerModel model =
      build_model({M, "a", "b"}, {{"a", "b"}}, config);
  const int ab = model.piece_to_id("ab");
  REQUIRE(ab >= 0);
  CHECK(decode(model, {kBosId, ab, kEosId}) == "ab");
  CHECK(decode(model, {kPadId, kUnkId}) == "");
  CHECK(decode(model, {model.piece_to_id("<|u|>")}) == "<|u|>");
}

TEST_CASE("decode turns markers into spaces, dropping one dummy prefix") {
  const TokenizerModel model = build_model({M, "a"}, {{M, "a"}});
  const int ma = model.piece_to_id(M + "a");
  const int run3 = model.run_piece_id(3);
  REQUIRE(ma >= 0);
  REQUIRE(run3 >= 0);
  CHECK(decode(model, {ma, ma}) == "a a");
  // Run of three markers, then the bare single: one space stripped.
  CHECK(decode(model, {run3, model.piece_to_id("a")}) == "  a");

  TrainerConfig bare;
  bare.add_dummy_prefix = false;
  const TokenizerModel no_dummy = build_model({M, "a"}, {{M, "a"}}, bare);
  CHECK(decode(no_dummy, {no_dummy.piece_to_id(M + "a")}) == " a");
}

TEST_CASE("decode reassembles byte runs and enforces UTF-8 strictly") {
  const TokenizerModel model = build_model({M, "a"}, {});
  const auto byte_id = [&](std::uint8_t b) { return model.byte_piece_id(b); };
  CHECK(decode(model, {byte_id(0xC3), byte_id(0xA9)}) == "\xC3\xA9");

  CHECK_THROWS_WITH_AS(decode(model, {byte_id(0xC3)}),
                       "byte pieces form an invalid UTF-8 sequence",
                       DataError);
  // An intervening normal piece splits the run: both halves invalid.
  CHECK_THROWS_AS(
      decode(model, {byte_id(0xC3), model.piece_to_id("a"), byte_id(0xA9)}),
      DataError);

  DecodeOptions lenient;
  lenient.lenient = true;
  CHECK(decode(model, {byte_id(0xC3)}, lenient) == "\xEF\xBF\xBD");
  CHECK(decode(model, {byte_id(0xFF), byte_id(0x41)}, lenient) ==
        "\xEF\xBF\xBD\x41");
}

TEST_CASE("decode rejects ids outside the vocabulary") {
  const TokenizerModel model = build_model({M, "a"}, {});
  CHECK_THROWS_AS(decode(model, {model.vocab.size()}), DataError);
  CHECK_THROWS_AS(decode(model, {-1}), DataError);
}

TEST_CASE("encoding a training word reproduces the trainer's segmentation") {
  Corpus corpus;
  corpus.push_back({"ab ab ab", "xx", "test"});
  TrainerConfig config;
  config.vocabulary_size = 290;
  const TokenizerModel model = train_bpe(corpus, config, {});
  // The trainer collapsed every ▁ab occurrence into one symbol.
  CHECK(encode_pieces(model, "ab") == Pieces{M + "ab"});
  CHECK(encode_pieces(model, "ab ab ab") ==
        Pieces{M + "ab", M + "ab", M + "ab"});
}

TEST_CASE("round trip holds on fuzzed strings against a trained model") {
  const Corpus corpus = testsupport::random_small_corpus(11, 900);
  TrainerConfig config;
  config.vocabulary_size = 310;
  config.user_defined_symbols = {"<|sep|>"};
  const TokenizerModel model = train_bpe(corpus, config, {});
  for (const std::string& s : testsupport::fuzz_strings(42, 300)) {
    CAPTURE(s);
    REQUIRE(decode(model, encode(model, s).ids) == s);
  }
}

TEST_CASE("round trip holds with the dummy prefix disabled") {
  const Corpus corpus = testsupport::random_small_corpus(12, 700);
  TrainerConfig config;
  config.vocabulary_size = 310;
  config.add_dummy_prefix = false;
  const TokenizerModel model = train_bpe(corpus, config, {});
  for (const std::string& s : testsupport::fuzz_strings(43, 150)) {
    CAPTURE(s);
    REQUIRE(decode(model, encode(model, s).ids) == s);
  }
}

TEST_SUITE_END();
