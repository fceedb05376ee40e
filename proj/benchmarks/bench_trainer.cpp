#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include <bpekit/trainer.hpp>

using namespace bpekit;

namespace {

// Deterministic letter soup with a Zipf-ish word pool; enough pair
// structure to keep the merge loop busy.
Corpus synthetic_corpus(int documents) {
  std::vector<std::string> pool;
  std::uint64_t x = 0x9E3779B97F4A7C15ULL;
  const auto next = [&x] {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    return x;
  };
  for (int i = 0; i < 600; ++i) {
    std::string word;
    const int len = 2 + static_cast<int>(next() % 7);
    for (int c = 0; c < len; ++c)
      word.push_back(static_cast<char>('a' + next() % 20));
    pool.push_back(std::move(word));
  }
  Corpus corpus;
  for (int d = 0; d < documents; ++d) {
    std::string text;
    const int words = 20 + static_cast<int>(next() % 20);
    for (int w = 0; w < words; ++w) {
      if (w) text.push_back(' ');
      text += pool[next() % (1 + next() % pool.size())];
    }
    corpus.push_back({std::move(text), "xx", "bench"});
  }
  return corpus;
}

}  // namespace

static void BM_pretokenize(benchmark::State& state) {
  const Corpus corpus = synthetic_corpus(500);
  TrainerConfig config;
  std::int64_t bytes = 0;
  for (const Document& doc : corpus) bytes += doc.text.size();
  const auto covered = [](char32_t) { return true; };
  for (auto _ : state) {
    for (const Document& doc : corpus) {
      benchmark::DoNotOptimize(pretokenize(doc.text, config, covered));
    }
  }
  state.SetBytesProcessed(state.iterations() * bytes);
}
BENCHMARK(BM_pretokenize);

static void BM_train(benchmark::State& state) {
  const Corpus corpus = synthetic_corpus(static_cast<int>(state.range(0)));
  TrainerConfig config;
  config.vocabulary_size = static_cast<int>(state.range(1));
  std::int64_t bytes = 0;
  for (const Document& doc : corpus) bytes += doc.text.size();
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_bpe(corpus, config, {}));
  }
  state.SetBytesProcessed(state.iterations() * bytes);
}
BENCHMARK(BM_train)
    ->Args({200, 400})
    ->Args({1000, 800})
    ->Args({4000, 1500})
    ->Unit(benchmark::kMillisecond);

static void BM_train_threads(benchmark::State& state) {
  const Corpus corpus = synthetic_corpus(2000);
  TrainerConfig config;
  config.vocabulary_size = 1000;
  TrainOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_bpe(corpus, config, options));
  }
}
BENCHMARK(BM_train_threads)->Arg(1)->Arg(2)->Arg(4)->Unit(
    benchmark::kMillisecond);

BENCHMARK_MAIN();
