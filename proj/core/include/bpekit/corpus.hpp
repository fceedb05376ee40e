#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bpekit/errors.hpp"

namespace bpekit {

struct Document {
  std::string text;
  std::string language = "unknown";
  std::string category = "unknown";

  bool operator==(const Document&) const = default;
};

using Corpus = std::vector<Document>;

// One weighted input file. Non-empty language/category tags override the
// per-line tags of the documents read from `path`.
struct CorpusSource {
  std::string path;
  std::string language;
  std::string category;
  double weight = 1.0;
};

struct CorpusSpec {
  std::vector<CorpusSource> sources;
  double sampling_fraction = 1.0;  // in (0, 1]
  std::uint64_t seed = 0;
};

// Reads a JSONL corpus: one JSON object per line, `text` required, `lang`
// and `category` optional (default "unknown"). Empty lines are skipped.
// Malformed lines (bad JSON, missing/non-string text, invalid UTF-8, empty
// lang) throw DataError naming the line; with `lenient` they are skipped
// and reported through `line_errors` instead.
Corpus load_jsonl(const std::string& path, bool lenient = false,
                  std::vector<std::string>* line_errors = nullptr);

void write_jsonl(const Corpus& corpus, const std::string& path);

// Per-document Bernoulli sampling with inclusion probability
// min(1, weight * sampling_fraction). Deterministic: the decision for a
// document depends only on (seed, source index, line number), and output
// order is (source index, line number).
Corpus sample_weighted(const CorpusSpec& spec);

// Partition into per-language corpora; map iteration gives sorted keys.
std::map<std::string, Corpus> split_by_language(const Corpus& corpus);

// Reads a sampling spec JSON file:
// {"sampling_fraction": 0.01, "seed": 7,
//  "sources": [{"path": "a.jsonl", "lang": "sv", "category": "web",
//               "weight": 1.0}, ...]}
// All source fields except `path` are optional.
CorpusSpec load_corpus_spec(const std::string& path);

}  // namespace bpekit
