#include "support/corpus_gen.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <bpekit/unicode.hpp>

namespace bpekit::testsupport {

namespace {

void append_ascii_word(Rng& rng, std::string& out) {
  const int len = rng.range(1, 10);
  for (int i = 0; i < len; ++i)
    out.push_back(static_cast<char>('a' + rng.below(26)));
}

// One random Unicode scalar value, surrogates excluded.
char32_t random_scalar(Rng& rng) {
  for (;;) {
    const auto cp = static_cast<char32_t>(rng.below(0x110000));
    if (cp >= 0xD800 && cp <= 0xDFFF) continue;
    return cp;
  }
}

}  // namespace

std::vector<std::string> fuzz_strings(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::string s;
    const int segments = i == 0 ? 0 : rng.range(1, 12);
    for (int k = 0; k < segments; ++k) {
      switch (rng.below(10)) {
        case 0:
          append_ascii_word(rng, s);
          break;
        case 1:
          s.append(static_cast<std::size_t>(rng.range(1, 30)), ' ');
          break;
        case 2: {
          const int len = rng.range(1, 6);
          for (int d = 0; d < len; ++d)
            s.push_back(static_cast<char>('0' + rng.below(10)));
          break;
        }
        case 3:
          append_utf8(s, static_cast<char32_t>(0x1F600 + rng.below(0x50)));
          break;
        case 4:
          for (int c = rng.range(1, 4); c > 0; --c)
            append_utf8(s, static_cast<char32_t>(0x4E00 + rng.below(0x200)));
          break;
        case 5:
          s.push_back(static_cast<char>('a' + rng.below(26)));
          for (int c = rng.range(1, 3); c > 0; --c)
            append_utf8(s, static_cast<char32_t>(0x0300 + rng.below(0x70)));
          break;
        case 6: {
          static const char controls[] = {'\n', '\t', '\r', '\x01', '\x7F'};
          s.push_back(controls[rng.below(5)]);
          break;
        }
        case 7:
          s.append(kMarkerUtf8);
          break;
        case 8:
          s.append(rng.chance(0.5) ? "." : ",");
          break;
        default:
          append_utf8(s, random_scalar(rng));
          break;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

Corpus random_small_corpus(std::uint64_t seed, int max_bytes) {
  Rng rng(seed);
  static const std::vector<std::string> pool = {
      "a", "b", "c", "d", "e", "\xC3\xA9" /* e-acute */, "\xC3\xB6" /* o-uml */};
  Corpus corpus;
  int bytes = 0;
  while (bytes < max_bytes) {
    std::string text;
    const int words = rng.range(1, 12);
    for (int w = 0; w < words; ++w) {
      if (w > 0) text.append(rng.chance(0.08) ? 2 : 1, ' ');
      if (rng.chance(0.08)) {
        for (int d = rng.range(1, 4); d > 0; --d)
          text.push_back(static_cast<char>('0' + rng.below(10)));
      } else {
        for (int c = rng.range(1, 6); c > 0; --c) text += rng.pick(pool);
        if (rng.chance(0.12)) text.append(rng.chance(0.5) ? "." : ",");
      }
      if (rng.chance(0.02)) text.append(kMarkerUtf8);
      if (rng.chance(0.02)) text.push_back('\n');
    }
    bytes += static_cast<int>(text.size());
    corpus.push_back({std::move(text), "xx", "fuzz"});
  }
  return corpus;
}

TrainerConfig random_small_config(std::uint64_t seed) {
  Rng rng(seed);
  TrainerConfig config;
  config.byte_fallback = rng.chance(0.5);
  config.vocabulary_size =
      config.byte_fallback ? rng.range(288, 300) : rng.range(34, 60);
  static const std::vector<double> coverages = {1.0, 0.9995, 0.98};
  config.character_coverage = coverages[rng.below(coverages.size())];
  static const std::vector<int> piece_lengths = {3, 4, 6, 16};
  config.max_piece_length = piece_lengths[rng.below(piece_lengths.size())];
  config.max_ws_run = rng.range(2, 6);
  config.split_digits = rng.chance(0.8);
  config.add_dummy_prefix = rng.chance(0.9);
  if (rng.chance(0.3)) config.user_defined_symbols.push_back("<|x|>");
  if (rng.chance(0.1)) config.user_defined_symbols.push_back("cc");
  config.seed = seed;
  return config;
}

namespace {

struct LangStock {
  std::string name;
  std::vector<std::string> words;         // rank order, most frequent first
  std::vector<std::uint64_t> cumulative;  // cumulative Zipf weights
  std::uint64_t total = 0;
};

LangStock make_stock(const std::string& name,
                     const std::vector<std::string>& letters,
                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> syllables;
  for (int i = 0; i < 48; ++i) {
    std::string syl = rng.pick(letters);
    syl += rng.pick(letters);
    if (rng.chance(0.4)) syl += rng.pick(letters);
    syllables.push_back(std::move(syl));
  }
  LangStock stock;
  stock.name = name;
  for (int i = 0; i < 1400; ++i) {
    std::string word = rng.pick(syllables);
    for (int s = rng.range(0, 3); s > 0; --s) word += rng.pick(syllables);
    stock.words.push_back(std::move(word));
  }
  for (std::size_t i = 0; i < stock.words.size(); ++i) {
    stock.total += 1000000 / (static_cast<std::uint64_t>(i) + 1);
    stock.cumulative.push_back(stock.total);
  }
  return stock;
}

const std::string& zipf_word(const LangStock& stock, Rng& rng) {
  const std::uint64_t u = rng.below(stock.total);
  const auto it =
      std::upper_bound(stock.cumulative.begin(), stock.cumulative.end(), u);
  return stock.words[static_cast<std::size_t>(it - stock.cumulative.begin())];
}

std::string number_token(Rng& rng) {
  std::string tok;
  for (int d = rng.range(1, 4); d > 0; --d)
    tok.push_back(static_cast<char>('0' + rng.below(10)));
  if (rng.chance(0.3)) {
    tok.push_back('.');
    for (int d = rng.range(1, 2); d > 0; --d)
      tok.push_back(static_cast<char>('0' + rng.below(10)));
  }
  return tok;
}

// Prose sentence: single-spaced words, punctuation only as a word suffix
// or inside number tokens (never opening a word), so that piece metrics
// shrink monotonically under additional merges.
std::string prose_doc(const LangStock& stock, Rng& rng) {
  std::string text;
  const int words = rng.range(6, 18);
  for (int w = 0; w < words; ++w) {
    if (w > 0) text.push_back(' ');
    if (rng.chance(0.04)) {
      text += number_token(rng);
    } else {
      text += zipf_word(stock, rng);
      if (rng.chance(0.10))
        text.push_back('.');
      else if (rng.chance(0.08))
        text.push_back(',');
    }
  }
  return text;
}

std::string code_doc(const LangStock& stock, Rng& rng) {
  std::string text = "def " + zipf_word(stock, rng) + "(" +
                     zipf_word(stock, rng) + "):";
  const int lines = rng.range(1, 3);
  for (int l = 0; l < lines; ++l) {
    text.push_back('\n');
    text.append(static_cast<std::size_t>(4 * rng.range(1, 2)), ' ');
    text += zipf_word(stock, rng) + "(" + zipf_word(stock, rng) + "," +
            number_token(rng) + ")";
  }
  text += "\n    return " + zipf_word(stock, rng);
  return text;
}

}  // namespace

DeskCorpus make_desk_corpus(std::uint64_t seed, double scale) {
  const std::vector<std::vector<std::string>> letter_sets = {
      {"a", "b", "c", "d", "e", "f", "g", "h"},
      {"i", "j", "k", "l", "m", "n", "o", "p"},
      {"q", "r", "s", "t", "u", "v", "w", "x"},
      {"\xCE\xB1", "\xCE\xB2", "\xCE\xB3", "\xCE\xB4", "\xCE\xB5", "\xCE\xB6",
       "\xCE\xB7", "\xCE\xB8"},
  };
  const std::vector<std::string> names = {"alpha", "beta", "gamma", "delta"};

  DeskCorpus desk;
  const auto budget = static_cast<std::int64_t>(1250000 * scale);
  for (std::size_t lang = 0; lang < names.size(); ++lang) {
    const std::uint64_t lang_seed = seed + 1000003 * (lang + 1);
    LangStock stock = make_stock(names[lang], letter_sets[lang], lang_seed);
    Rng rng(lang_seed ^ 0xC0FFEE);
    Corpus& bucket = desk.train_by_lang[names[lang]];
    std::int64_t bytes = 0;
    int docs = 0;
    while (bytes < budget) {
      const bool code = ++docs % 25 == 0;
      std::string text = code ? code_doc(stock, rng) : prose_doc(stock, rng);
      bytes += static_cast<std::int64_t>(text.size());
      bucket.push_back({std::move(text), names[lang], code ? "code" : "web"});
    }
    Corpus& heldout = desk.heldout_by_lang[names[lang]];
    const int heldout_docs = std::max(50, static_cast<int>(400 * scale));
    for (int d = 0; d < heldout_docs; ++d) {
      const bool code = d % 25 == 24;
      std::string text = code ? code_doc(stock, rng) : prose_doc(stock, rng);
      heldout.push_back({std::move(text), names[lang], code ? "code" : "web"});
    }
  }
  // Interleave the language buckets so no language is "first" in training.
  std::size_t index = 0;
  for (bool more = true; more;) {
    more = false;
    for (const auto& name : names) {
      const Corpus& bucket = desk.train_by_lang[name];
      if (index < bucket.size()) {
        desk.training.push_back(bucket[index]);
        more = true;
      }
    }
    ++index;
  }
  return desk;
}

}  // namespace bpekit::testsupport
