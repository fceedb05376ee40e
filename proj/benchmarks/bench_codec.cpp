#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include <bpekit/codec.hpp>
#include <bpekit/trainer.hpp>

using namespace bpekit;

namespace {

Corpus sample_corpus() {
  static const std::vector<std::string> lines = {
      "the quick brown fox jumps over the lazy dog",
      "pack my box with five dozen liquor jugs 123.4",
      "sphinx of black quartz judge my vow",
      "    indented code(line, 42) follows here",
      "numbers 1 22 333 4444 and plain words interleave",
  };
  Corpus corpus;
  for (int i = 0; i < 200; ++i) {
    corpus.push_back({lines[i % lines.size()], "en", "bench"});
  }
  return corpus;
}

const TokenizerModel& bench_model() {
  static const TokenizerModel model = [] {
    TrainerConfig config;
    config.vocabulary_size = 800;
    return train_bpe(sample_corpus(), config, {});
  }();
  return model;
}

std::string bench_text() {
  std::string text;
  for (const Document& doc : sample_corpus()) {
    text += doc.text;
    text += ' ';
  }
  return text;
}

}  // namespace

static void BM_encode(benchmark::State& state) {
  const TokenizerModel& model = bench_model();
  const std::string text = bench_text();
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode(model, text));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_encode);

static void BM_encode_short_lines(benchmark::State& state) {
  const TokenizerModel& model = bench_model();
  const Corpus corpus = sample_corpus();
  std::int64_t bytes = 0;
  for (const Document& doc : corpus) bytes += doc.text.size();
  for (auto _ : state) {
    for (const Document& doc : corpus) {
      benchmark::DoNotOptimize(encode(model, doc.text));
    }
  }
  state.SetBytesProcessed(state.iterations() * bytes);
}
BENCHMARK(BM_encode_short_lines);

static void BM_decode(benchmark::State& state) {
  const TokenizerModel& model = bench_model();
  const std::vector<int> ids = encode(model, bench_text()).ids;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(model, ids));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(ids.size()));
}
BENCHMARK(BM_decode);

static void BM_round_trip(benchmark::State& state) {
  const TokenizerModel& model = bench_model();
  const std::string text = bench_text();
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(model, encode(model, text).ids));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_round_trip);
