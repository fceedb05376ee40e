#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bpekit/model.hpp"

namespace bpekit {

struct EncodedSequence {
  std::vector<int> ids;
  std::vector<std::string> pieces;  // parallel surfaces, |ids| == |pieces|
};

struct EncodeOptions {
  // Wrap the result in bos/eos ids. Plain text can never produce special
  // pieces on its own; this is the only way to add them.
  bool add_bos = false;
  bool add_eos = false;
};

struct DecodeOptions {
  // When a byte-piece run forms invalid UTF-8: strict (default) throws
  // DataError, lenient substitutes U+FFFD per offending byte.
  bool lenient = false;
};

// Applies the model's merge rules to one unit's start symbols, in
// ascending rank with leftmost-first application inside a rank, until no
// rule applies. Exposed separately so tests can check that encoding a
// training word reproduces the trainer's final segmentation.
std::vector<std::string> apply_merges(const TokenizerModel& model,
                                      std::vector<std::string> symbols);

// Text -> piece surfaces: user symbols, marker substitution and dummy
// prefix, whitespace-run pieces, digit isolation, per-word merges, byte
// fallback. Throws DataError on invalid UTF-8.
std::vector<std::string> encode_pieces(const TokenizerModel& model,
                                       std::string_view text);

EncodedSequence encode(const TokenizerModel& model, std::string_view text,
                       const EncodeOptions& options = {});

// Ids -> text: special pieces vanish, code pieces pass through verbatim,
// byte-piece runs are reassembled into raw bytes, markers become spaces,
// and one leading dummy-prefix space is dropped. Throws DataError for ids
// out of range. decode(encode(s)) == s for any valid UTF-8 s when the
// model has byte fallback.
std::string decode(const TokenizerModel& model, const std::vector<int>& ids,
                   const DecodeOptions& options = {});

}  // namespace bpekit
