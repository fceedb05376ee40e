#include "bpekit/corpus.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bpekit/unicode.hpp"

namespace bpekit {

namespace {

using nlohmann::json;

// splitmix64 finalizer; a fixed, platform-independent mixing function.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) derived from (seed, source, line); independent of any
// global RNG state so samples are reproducible across platforms and runs.
double document_uniform(std::uint64_t seed, std::uint64_t source_index,
                        std::uint64_t line_number) {
  const std::uint64_t h =
      mix64(mix64(mix64(seed) ^ source_index) ^ line_number);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Document parse_document_line(const std::string& line) {
  const json j = json::parse(line);
  if (!j.is_object()) throw DataError("not a JSON object");
  if (!j.contains("text")) throw DataError("missing text field");
  if (!j.at("text").is_string()) throw DataError("text field is not a string");
  Document doc;
  doc.text = j.at("text").get<std::string>();
  if (!utf8_valid(doc.text)) throw DataError("text is not valid UTF-8");
  if (j.contains("lang")) {
    doc.language = j.at("lang").get<std::string>();
    if (doc.language.empty()) throw DataError("empty lang field");
  }
  if (j.contains("category")) {
    doc.category = j.at("category").get<std::string>();
    if (doc.category.empty()) throw DataError("empty category field");
  }
  return doc;
}

}  // namespace

Corpus load_jsonl(const std::string& path, bool lenient,
                  std::vector<std::string>* line_errors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file '" + path + "'");
  Corpus corpus;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      corpus.push_back(parse_document_line(line));
    } catch (const std::exception& e) {
      const std::string msg = std::string(e.what()) + ", line " +
                              std::to_string(line_number) + " of '" + path +
                              "'";
      if (!lenient) throw DataError(msg);
      if (line_errors) line_errors->push_back(msg);
    }
  }
  return corpus;
}

void write_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  for (const Document& doc : corpus) {
    json j;
    j["text"] = doc.text;
    j["lang"] = doc.language;
    j["category"] = doc.category;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

Corpus sample_weighted(const CorpusSpec& spec) {
  if (!(spec.sampling_fraction > 0.0) || spec.sampling_fraction > 1.0) {
    throw ConfigError("sampling_fraction must be in (0, 1], got " +
                      std::to_string(spec.sampling_fraction));
  }
  double weight_sum = 0.0;
  for (const CorpusSource& src : spec.sources) {
    if (src.weight < 0.0 || !std::isfinite(src.weight)) {
      throw ConfigError("negative weight " + std::to_string(src.weight) +
                        " for source '" + src.path + "'");
    }
    weight_sum += src.weight;
  }
  if (!(weight_sum > 0.0)) throw ConfigError("source weights sum to zero");

  Corpus sample;
  for (std::size_t si = 0; si < spec.sources.size(); ++si) {
    const CorpusSource& src = spec.sources[si];
    const double p = std::min(1.0, src.weight * spec.sampling_fraction);
    std::ifstream in(src.path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file '" + src.path + "'");
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (document_uniform(spec.seed, si, line_number) >= p) continue;
      Document doc;
      try {
        doc = parse_document_line(line);
      } catch (const std::exception& e) {
        throw DataError(std::string(e.what()) + ", line " +
                        std::to_string(line_number) + " of '" + src.path +
                        "'");
      }
      if (!src.language.empty()) doc.language = src.language;
      if (!src.category.empty()) doc.category = src.category;
      sample.push_back(std::move(doc));
    }
  }
  return sample;
}

std::map<std::string, Corpus> split_by_language(const Corpus& corpus) {
  std::map<std::string, Corpus> buckets;
  for (const Document& doc : corpus) {
    buckets[doc.language].push_back(doc);
  }
  return buckets;
}

CorpusSpec load_corpus_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open spec file '" + path + "'");
  CorpusSpec spec;
  try {
    const json j = json::parse(in);
    if (j.contains("sampling_fraction")) {
      spec.sampling_fraction = j.at("sampling_fraction").get<double>();
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    for (const json& sj : j.at("sources")) {
      CorpusSource src;
      src.path = sj.at("path").get<std::string>();
      if (sj.contains("lang")) src.language = sj.at("lang").get<std::string>();
      if (sj.contains("category")) {
        src.category = sj.at("category").get<std::string>();
      }
      if (sj.contains("weight")) src.weight = sj.at("weight").get<double>();
      spec.sources.push_back(std::move(src));
    }
  } catch (const json::exception& e) {
    throw DataError("malformed sampling spec '" + path + "': " + e.what());
  }
  return spec;
}

}  // namespace bpekit
