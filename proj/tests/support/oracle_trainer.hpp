#pragma once

#include <string>
#include <vector>

#include <bpekit/corpus.hpp>
#include <bpekit/model.hpp>

namespace bpekit::testsupport {

struct OracleResult {
  std::vector<MergeRule> merges;       // kept rules, rank order
  std::vector<std::string> alphabet;   // single-char block, final order
  bool exhausted = false;              // pair supply ran out early
};

// Brute-force reference trainer: plain strings, a full pair recount and a
// full scan for the best candidate every round, leftmost replacement by
// rewriting each word. Shares only the pretokenizer with the production
// trainer; counting, selection, tie-breaking, eligibility, reservation and
// budget arithmetic are reimplemented from the trainer contract. Loud and
// quadratic on purpose — run it on small corpora only.
OracleResult oracle_train(const Corpus& corpus, const TrainerConfig& config);

}  // namespace bpekit::testsupport
