#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <bpekit/corpus.hpp>
#include <bpekit/model.hpp>

namespace bpekit::testsupport {

// Tiny deterministic generator (splitmix64) so test data never depends on
// a library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Uniform in [lo, hi].
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool chance(double p) {
    return static_cast<double>(next() >> 11) * 0x1.0p-53 < p;
  }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

 private:
  std::uint64_t state_;
};

// Strings for round-trip fuzzing: ASCII words, emoji, CJK, combining
// marks, digits, whitespace runs, control characters, the literal marker,
// invalid-alphabet code points. Always valid UTF-8.
std::vector<std::string> fuzz_strings(std::uint64_t seed, int count);

// A small corpus (at most `max_bytes` of text) over a narrow character
// pool, with occasional digits, punctuation, double spaces and multibyte
// characters; suitable for exhaustive-oracle training.
Corpus random_small_corpus(std::uint64_t seed, int max_bytes);

// A trainer config with small sizes randomized within contract bounds
// (vocab <= 300); pairs with random_small_corpus for oracle equivalence.
TrainerConfig random_small_config(std::uint64_t seed);

struct DeskCorpus {
  Corpus training;                              // all languages, mixed
  std::map<std::string, Corpus> train_by_lang;  // partition of `training`
  std::map<std::string, Corpus> heldout_by_lang;
};

// Synthetic multilingual desk corpus: four "languages" over pairwise
// disjoint letter sets (three Latin ranges and one Greek range), Zipfian
// syllable-built word stock, single-spaced sentences, punctuation only
// trailing a word or between digits, and a slice of indented code-style
// documents. scale 1.0 gives roughly 5 MB of training text.
DeskCorpus make_desk_corpus(std::uint64_t seed, double scale = 1.0);

}  // namespace bpekit::testsupport
