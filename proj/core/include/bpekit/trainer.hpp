#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bpekit/corpus.hpp"
#include "bpekit/model.hpp"

namespace bpekit {

// Character occurrence counts over a corpus. Space, the literal marker
// character and control characters are excluded from the tally: space is
// rewritten to the marker, the other two always take the byte-fallback
// route and must never enter the alphabet.
std::map<char32_t, std::int64_t> count_characters(const Corpus& corpus);

// Smallest set of most-frequent characters whose cumulative share of all
// counted occurrences reaches `coverage`; characters tied in count with
// the last one included are all included. Empty corpus -> empty set.
std::set<char32_t> compute_coverage_alphabet(const Corpus& corpus,
                                             double coverage);

// One atomic stretch of pretokenized text. Word symbols are single
// characters (the leading marker included) or byte-piece surfaces for
// characters outside the alphabet; Digit and UserSymbol units never take
// part in merges; Run units map to one whitespace-run piece each.
struct PretokenUnit {
  enum class Kind { Word, Digit, UserSymbol, Run };

  Kind kind = Kind::Word;
  std::vector<std::string> symbols;
  int run_length = 0;  // Kind::Run only: number of markers, 2..max_ws_run

  bool operator==(const PretokenUnit&) const = default;
};

// In-alphabet test used to route characters to byte fallback.
using CoverageFn = std::function<bool(char32_t)>;

// Shared trainer/codec pipeline: user-symbol extraction on raw text
// (greedy longest match), space -> marker plus one dummy-prefix marker
// (omitted when the text begins with a user symbol, so that symbol stays
// the first unit), greedy whitespace-run splitting with a single leftover
// marker attaching to the next word, digit isolation, and byte fallback
// for characters rejected by `covered`. A literal marker character in the
// input is always byte-escaped to keep decoding unambiguous. With byte
// fallback disabled, out-of-alphabet characters map to the unk surface
// instead (the one lossy path).
std::vector<PretokenUnit> pretokenize(std::string_view text,
                                      const TrainerConfig& config,
                                      const CoverageFn& covered);

struct TrainOptions {
  int threads = 1;
  // Re-derive the selected pair's count by a full rescan every iteration
  // and fail loudly on a mismatch. Debug aid; quadratic, keep off.
  bool verify_counts = false;
  std::vector<std::string>* warnings = nullptr;
};

// Trains a BPE tokenizer: coverage alphabet, iterative max-count pair
// merging (ties broken by lexicographically smallest (left, right)
// surfaces), then the whitespace-run block. Merges never cross unit
// boundaries, never involve byte pieces or digits, and never exceed
// max_piece_length code points. If the pair supply runs out early the
// achieved vocabulary size is recorded in the returned model's config and
// a warning is emitted. Deterministic for fixed (corpus, config)
// regardless of thread count.
TokenizerModel train_bpe(const Corpus& corpus, const TrainerConfig& config,
                         const TrainOptions& options = {});

// Replaces the last-learned regular pieces with whitespace-run pieces of
// lengths 2..max_ws_run at the vocabulary tail, dropping the corresponding
// merge rules; the total size is unchanged. A model that already carries
// its full run block (any train_bpe output) is returned unchanged, as is a
// model with max_ws_run = 1. Throws ModelError when the regular block is
// too small to donate the needed pieces.
TokenizerModel whitespace_surgery(const TokenizerModel& model);

}  // namespace bpekit
