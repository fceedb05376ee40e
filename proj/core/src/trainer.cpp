#include "bpekit/trainer.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "bpekit/unicode.hpp"

namespace bpekit {

namespace {

using SymbolId = std::int32_t;

constexpr std::int64_t pair_key(SymbolId l, SymbolId r) {
  return (static_cast<std::int64_t>(l) << 32) |
         static_cast<std::uint32_t>(r);
}
constexpr SymbolId pair_left(std::int64_t key) {
  return static_cast<SymbolId>(key >> 32);
}
constexpr SymbolId pair_right(std::int64_t key) {
  return static_cast<SymbolId>(static_cast<std::uint32_t>(key));
}

struct TransparentHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

std::string marker_run(int length) {
  std::string s;
  s.reserve(kMarkerUtf8.size() * static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) s += kMarkerUtf8;
  return s;
}

// Runs fn(begin, end, chunk_index) over [0, n) split into contiguous
// chunks. Chunk boundaries depend on the thread count, but every consumer
// below merges per-chunk results in chunk order with commutative sums, so
// outcomes are thread-count independent.
template <typename F>
void parallel_chunks(std::size_t n, int threads, F&& fn) {
  const std::size_t want = static_cast<std::size_t>(std::max(1, threads));
  const std::size_t t = std::min(want, std::max<std::size_t>(n, 1));
  if (t <= 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  const std::size_t chunk = (n + t - 1) / t;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t b = k * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e, k] {
      try {
        fn(b, e, k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

std::map<char32_t, std::int64_t> to_sorted(
    const std::unordered_map<char32_t, std::int64_t>& counts) {
  return {counts.begin(), counts.end()};
}

std::unordered_map<char32_t, std::int64_t> count_chars_raw(
    const Corpus& corpus) {
  std::unordered_map<char32_t, std::int64_t> counts;
  for (const Document& doc : corpus) {
    if (!utf8_valid(doc.text)) {
      throw DataError("corpus document is not valid UTF-8");
    }
    for (char32_t cp : decode_utf8(doc.text)) {
      if (cp == U' ' || cp == kMarkerChar || is_control(cp)) continue;
      ++counts[cp];
    }
  }
  return counts;
}

// (character, count) sorted by count descending, codepoint ascending.
std::vector<std::pair<char32_t, std::int64_t>> by_frequency(
    const std::unordered_map<char32_t, std::int64_t>& counts) {
  std::vector<std::pair<char32_t, std::int64_t>> order(counts.begin(),
                                                       counts.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return order;
}

std::set<char32_t> coverage_from_counts(
    const std::unordered_map<char32_t, std::int64_t>& counts,
    double coverage) {
  std::set<char32_t> alphabet;
  std::int64_t total = 0;
  for (const auto& [cp, c] : counts) total += c;
  if (total == 0) return alphabet;

  const auto order = by_frequency(counts);
  const double threshold = coverage * static_cast<double>(total);
  std::int64_t cumulative = 0;
  std::size_t i = 0;
  for (; i < order.size(); ++i) {
    cumulative += order[i].second;
    alphabet.insert(order[i].first);
    if (static_cast<double>(cumulative) >= threshold) break;
  }
  // Characters tied with the cutoff count are all included.
  if (i < order.size()) {
    const std::int64_t cutoff = order[i].second;
    for (std::size_t j = i + 1; j < order.size() && order[j].second == cutoff;
         ++j) {
      alphabet.insert(order[j].first);
    }
  }
  return alphabet;
}

std::size_t utf8_char_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  return 4;
}

}  // namespace

std::map<char32_t, std::int64_t> count_characters(const Corpus& corpus) {
  return to_sorted(count_chars_raw(corpus));
}

std::set<char32_t> compute_coverage_alphabet(const Corpus& corpus,
                                             double coverage) {
  if (!(coverage > 0.0) || coverage > 1.0) {
    throw ConfigError("character_coverage must be in (0, 1], got " +
                      std::to_string(coverage));
  }
  return coverage_from_counts(count_chars_raw(corpus), coverage);
}

std::vector<PretokenUnit> pretokenize(std::string_view text,
                                      const TrainerConfig& config,
                                      const CoverageFn& covered) {
  std::vector<PretokenUnit> units;
  const std::string marker(kMarkerUtf8);

  // Longest match first; ties impossible among distinct equal-length
  // symbols at one position.
  std::vector<std::string_view> user_symbols;
  for (const std::string& s : config.user_defined_symbols) {
    if (!s.empty()) user_symbols.push_back(s);
  }
  std::sort(user_symbols.begin(), user_symbols.end(),
            [](std::string_view a, std::string_view b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });

  // Split raw text into user-symbol hits and plain spans between them.
  struct Segment {
    bool is_user = false;
    std::string_view piece;
  };
  std::vector<Segment> segments;
  std::size_t i = 0;
  std::size_t span_start = 0;
  while (i < text.size()) {
    std::string_view hit;
    for (std::string_view s : user_symbols) {
      if (text.size() - i >= s.size() && text.compare(i, s.size(), s) == 0) {
        hit = s;
        break;
      }
    }
    if (!hit.empty()) {
      if (i > span_start) {
        segments.push_back({false, text.substr(span_start, i - span_start)});
      }
      segments.push_back({true, hit});
      i += hit.size();
      span_start = i;
    } else {
      i += utf8_char_length(static_cast<unsigned char>(text[i]));
    }
  }
  if (text.size() > span_start) {
    segments.push_back({false, text.substr(span_start)});
  }

  // Byte fallback (or the unk surface when it is disabled) for one char.
  auto append_escape = [&](char32_t cp, std::vector<std::string>& out) {
    if (!config.byte_fallback) {
      out.push_back(config.special_pieces[1]);
      return;
    }
    for (char b : encode_utf8(cp)) {
      out.push_back(byte_piece_surface(static_cast<std::uint8_t>(b)));
    }
  };
  auto append_char = [&](char32_t cp, std::vector<std::string>& out) {
    // A literal marker character always escapes, else it would be
    // indistinguishable from a space on decode.
    if (cp == kMarkerChar || !covered(cp)) {
      append_escape(cp, out);
    } else {
      out.push_back(encode_utf8(cp));
    }
  };

  // Emits the units of one non-whitespace stretch; `prefixed` carries a
  // single leftover marker from the run before it.
  auto emit_body = [&](const char32_t* body, std::size_t len, bool prefixed) {
    std::size_t b = 0;
    bool prefix = prefixed;
    while (b < len) {
      if (config.split_digits && is_decimal_digit(body[b])) {
        if (prefix) {
          units.push_back({PretokenUnit::Kind::Word, {marker}, 0});
          prefix = false;
        }
        PretokenUnit unit{PretokenUnit::Kind::Digit, {}, 0};
        append_char(body[b], unit.symbols);
        units.push_back(std::move(unit));
        ++b;
      } else {
        PretokenUnit unit{PretokenUnit::Kind::Word, {}, 0};
        if (prefix) {
          unit.symbols.push_back(marker);
          prefix = false;
        }
        while (b < len &&
               !(config.split_digits && is_decimal_digit(body[b]))) {
          append_char(body[b], unit.symbols);
          ++b;
        }
        units.push_back(std::move(unit));
      }
    }
  };

  // The dummy prefix stays off when the text opens with a user symbol, so
  // that symbol remains the first unit and decode needs no leading space.
  const bool starts_with_user = !segments.empty() && segments[0].is_user;
  bool pending_dummy = config.add_dummy_prefix && !starts_with_user;

  for (const Segment& seg : segments) {
    if (seg.is_user) {
      units.push_back(
          {PretokenUnit::Kind::UserSymbol, {std::string(seg.piece)}, 0});
      continue;
    }
    const std::vector<char32_t> cps = decode_utf8(seg.piece);
    // Parallel flags: only space-derived (and dummy) positions count as
    // whitespace. A literal marker character stays body text; append_char
    // escapes it later so it cannot alias a space on decode.
    std::vector<char32_t> stream;
    std::vector<char> is_marker;
    stream.reserve(cps.size() + 1);
    is_marker.reserve(cps.size() + 1);
    if (pending_dummy) {
      stream.push_back(kMarkerChar);
      is_marker.push_back(1);
      pending_dummy = false;
    }
    for (char32_t cp : cps) {
      stream.push_back(cp == U' ' ? kMarkerChar : cp);
      is_marker.push_back(cp == U' ' ? 1 : 0);
    }

    std::size_t p = 0;
    bool prefix = false;
    while (p < stream.size()) {
      if (is_marker[p]) {
        std::size_t q = p;
        while (q < stream.size() && is_marker[q]) ++q;
        int rem = static_cast<int>(q - p);
        while (rem >= 2 && config.max_ws_run >= 2) {
          const int take = std::min(rem, config.max_ws_run);
          units.push_back(
              {PretokenUnit::Kind::Run, {marker_run(take)}, take});
          rem -= take;
        }
        // rem > 1 only when max_ws_run == 1: leftovers become lone-marker
        // words, the last marker still prefixes what follows.
        while (rem > 1) {
          units.push_back({PretokenUnit::Kind::Word, {marker}, 0});
          --rem;
        }
        prefix = rem == 1;
        p = q;
        if (p == stream.size() && prefix) {
          units.push_back({PretokenUnit::Kind::Word, {marker}, 0});
          prefix = false;
        }
      } else {
        std::size_t q = p;
        while (q < stream.size() && !is_marker[q]) ++q;
        emit_body(stream.data() + p, q - p, prefix);
        prefix = false;
        p = q;
      }
    }
  }
  if (pending_dummy) {
    // Empty text (or all segments consumed without a span): the dummy
    // prefix still yields one lone-marker word.
    units.push_back({PretokenUnit::Kind::Word, {marker}, 0});
  }
  return units;
}

namespace {

// Incremental BPE trainer: interned symbols, exact pair counts, an ordered
// candidate set for max-count selection, and per-pair occurrence lists
// (lazily cleaned) to avoid rescanning the corpus each round.
class BpeTrainer {
 public:
  BpeTrainer(const Corpus& corpus, const TrainerConfig& config,
             const TrainOptions& options)
      : corpus_(corpus),
        config_(config),
        options_(options),
        active_(ActiveLess{&surfaces_}) {}

  TokenizerModel run() {
    validate_config();
    build_alphabet();
    check_budget();
    build_words();
    count_initial();
    merge_loop();
    return assemble();
  }

 private:
  struct Word {
    std::vector<SymbolId> syms;
    std::int64_t freq = 0;
  };

  using Entry = std::tuple<std::int64_t, SymbolId, SymbolId>;  // count, l, r

  struct ActiveLess {
    const std::vector<std::string>* surfaces;
    bool operator()(const Entry& a, const Entry& b) const {
      if (std::get<0>(a) != std::get<0>(b)) {
        return std::get<0>(a) > std::get<0>(b);  // highest count first
      }
      const std::string& al = (*surfaces)[std::get<1>(a)];
      const std::string& bl = (*surfaces)[std::get<1>(b)];
      if (al != bl) return al < bl;
      return (*surfaces)[std::get<2>(a)] < (*surfaces)[std::get<2>(b)];
    }
  };

  void warn(std::string msg) {
    if (options_.warnings) options_.warnings->push_back(std::move(msg));
  }

  void validate_config() {
    if (corpus_.empty()) throw DataError("training corpus is empty");
    if (config_.vocabulary_size <= 0) {
      throw ConfigError("vocabulary_size must be positive");
    }
    if (!(config_.character_coverage > 0.0) ||
        config_.character_coverage > 1.0) {
      throw ConfigError("character_coverage must be in (0, 1]");
    }
    if (config_.max_ws_run < 1) {
      throw ConfigError("max_ws_run must be at least 1");
    }
    if (config_.max_piece_length < 2) {
      throw ConfigError("max_piece_length must be at least 2");
    }
    std::unordered_set<std::string> seen;
    for (const std::string& s : config_.special_pieces) {
      if (s.empty() || !seen.insert(s).second) {
        throw ConfigError("special pieces must be non-empty and distinct");
      }
    }
    for (const std::string& s : config_.user_defined_symbols) {
      if (s.empty() || !seen.insert(s).second) {
        throw ConfigError("user symbol '" + s +
                          "' is empty or collides with another protected "
                          "surface");
      }
      if (s == std::string(kMarkerUtf8)) {
        throw ConfigError("user symbol must not equal the marker character");
      }
      if (config_.byte_fallback && parse_byte_piece_surface(s)) {
        throw ConfigError("user symbol '" + s +
                          "' collides with a byte fallback piece");
      }
    }
  }

  void build_alphabet() {
    auto counts = count_chars_raw(corpus_);
    auto covered = coverage_from_counts(counts, config_.character_coverage);

    std::int64_t spaces = 0;
    for (const Document& doc : corpus_) {
      spaces += std::count(doc.text.begin(), doc.text.end(), ' ');
    }
    // The marker behaves like an alphabet character (words carry it as a
    // prefix symbol); its frequency for ordering is the space count.
    counts[kMarkerChar] = spaces;
    covered.insert(kMarkerChar);

    // A single-character user symbol already owns its surface in the code
    // block; keep such characters out of the alphabet entirely.
    std::unordered_set<std::string_view> user(
        config_.user_defined_symbols.begin(),
        config_.user_defined_symbols.end());
    std::unordered_map<char32_t, std::int64_t> kept;
    for (char32_t cp : covered) {
      if (user.count(encode_utf8(cp))) continue;
      kept.emplace(cp, counts.at(cp));
    }
    for (const auto& [cp, cnt] : by_frequency(kept)) {
      alphabet_.push_back(cp);
      alpha_set_.insert(cp);
    }
  }

  void check_budget() {
    const std::int64_t code = config_.user_defined_symbols.size();
    const std::int64_t bytes = config_.byte_fallback ? 256 : 0;
    mandatory_ = 4 + code + bytes + static_cast<std::int64_t>(alphabet_.size());
    run_slots_ = config_.max_ws_run - 1;
    const std::int64_t minimum = mandatory_ + run_slots_ + 1;
    if (config_.vocabulary_size < minimum) {
      throw ConfigError(
          "vocabulary_size " + std::to_string(config_.vocabulary_size) +
          " is too small; the minimum for this corpus and configuration is " +
          std::to_string(minimum));
    }
    // Train through the run-block slots too, then let assemble() replace
    // the tail merges with run pieces — identical to reserving upfront,
    // since the first j merges never depend on the budget.
    train_target_ = config_.vocabulary_size - mandatory_;
    keep_budget_ = train_target_ - run_slots_;
  }

  void build_words() {
    CoverageFn covered = [this](char32_t cp) {
      return alpha_set_.count(cp) > 0;
    };
    std::vector<std::vector<PretokenUnit>> doc_units(corpus_.size());
    parallel_chunks(corpus_.size(), options_.threads,
                    [&](std::size_t b, std::size_t e, std::size_t) {
                      for (std::size_t d = b; d < e; ++d) {
                        doc_units[d] =
                            pretokenize(corpus_[d].text, config_, covered);
                      }
                    });

    std::map<std::vector<SymbolId>, std::int64_t> dedup;
    for (auto& units : doc_units) {
      for (PretokenUnit& unit : units) {
        if (unit.kind != PretokenUnit::Kind::Word || unit.symbols.size() < 2) {
          continue;
        }
        std::vector<SymbolId> ids;
        ids.reserve(unit.symbols.size());
        for (const std::string& s : unit.symbols) ids.push_back(intern(s));
        ++dedup[std::move(ids)];
      }
      units.clear();
    }
    words_.reserve(dedup.size());
    for (auto& [syms, freq] : dedup) {
      words_.push_back({syms, freq});
    }
  }

  SymbolId intern(const std::string& s) {
    if (const auto it = sym_index_.find(s); it != sym_index_.end()) {
      return it->second;
    }
    const SymbolId id = static_cast<SymbolId>(surfaces_.size());
    surfaces_.push_back(s);
    cp_len_.push_back(static_cast<int>(codepoint_count(s)));
    const bool byte_like = parse_byte_piece_surface(s).has_value();
    const bool unk = s == config_.special_pieces[1];
    mergeable_.push_back(!byte_like && !unk);
    sym_index_.emplace(s, id);
    return id;
  }

  bool eligible(SymbolId l, SymbolId r) const {
    return mergeable_[l] && mergeable_[r] &&
           cp_len_[l] + cp_len_[r] <= config_.max_piece_length;
  }

  void count_initial() {
    struct Partial {
      std::unordered_map<std::int64_t, std::int64_t> counts;
      std::unordered_map<std::int64_t, std::vector<std::int32_t>> where;
    };
    const std::size_t n = words_.size();
    const std::size_t nthreads = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(1, options_.threads)),
        std::max<std::size_t>(n, 1));
    std::vector<Partial> partials(nthreads);
    parallel_chunks(n, options_.threads,
                    [&](std::size_t b, std::size_t e, std::size_t k) {
                      Partial& part = partials[k];
                      for (std::size_t w = b; w < e; ++w) {
                        const Word& word = words_[w];
                        for (std::size_t i = 0; i + 1 < word.syms.size();
                             ++i) {
                          const std::int64_t key =
                              pair_key(word.syms[i], word.syms[i + 1]);
                          part.counts[key] += word.freq;
                          auto& list = part.where[key];
                          if (list.empty() ||
                              list.back() != static_cast<std::int32_t>(w)) {
                            list.push_back(static_cast<std::int32_t>(w));
                          }
                        }
                      }
                    });
    for (Partial& part : partials) {
      for (const auto& [key, c] : part.counts) counts_[key] += c;
      for (auto& [key, list] : part.where) {
        auto& global = where_[key];
        global.insert(global.end(), list.begin(), list.end());
      }
    }
    for (const auto& [key, c] : counts_) {
      const SymbolId l = pair_left(key);
      const SymbolId r = pair_right(key);
      if (eligible(l, r)) active_.insert({c, l, r});
    }
  }

  void merge_loop() {
    reserved_.insert(config_.special_pieces.begin(),
                     config_.special_pieces.end());
    reserved_.insert(config_.user_defined_symbols.begin(),
                     config_.user_defined_symbols.end());
    if (config_.byte_fallback) {
      for (int v = 0; v < 256; ++v) {
        reserved_.insert(byte_piece_surface(static_cast<std::uint8_t>(v)));
      }
    }
    for (int len = 2; len <= config_.max_ws_run; ++len) {
      reserved_.insert(marker_run(len));
    }

    while (static_cast<std::int64_t>(merges_.size()) < train_target_) {
      std::string result;
      Entry best;
      bool found = false;
      while (!active_.empty()) {
        const auto it = active_.begin();
        result = surfaces_[std::get<1>(*it)] + surfaces_[std::get<2>(*it)];
        if (reserved_.count(result)) {
          // A different pair produced this surface first (or it is a
          // protected piece); counts stay, the candidate drops.
          active_.erase(it);
          continue;
        }
        best = *it;
        found = true;
        break;
      }
      if (!found) {
        exhausted_ = true;
        break;
      }
      const auto [count, left, right] = best;
      if (count < 1) throw std::logic_error("selected pair has count < 1");
      if (options_.verify_counts && recount(left, right) != count) {
        throw std::logic_error("incremental pair count diverged from rescan");
      }

      const SymbolId merged = intern(result);
      merges_.push_back({surfaces_[left], surfaces_[right]});
      reserved_.insert(result);

      const std::int64_t key = pair_key(left, right);
      std::vector<std::int32_t> candidates;
      if (const auto it = where_.find(key); it != where_.end()) {
        candidates = std::move(it->second);
        where_.erase(it);
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()),
                       candidates.end());
      for (const std::int32_t wid : candidates) {
        apply_to_word(wid, left, right, merged);
      }
      if (counts_.count(key)) {
        throw std::logic_error("selected pair not fully replaced");
      }
    }
  }

  void apply_to_word(std::int32_t wid, SymbolId l, SymbolId r,
                     SymbolId merged) {
    Word& word = words_[wid];
    auto& syms = word.syms;
    bool present = false;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      if (syms[i] == l && syms[i + 1] == r) {
        present = true;
        break;
      }
    }
    if (!present) return;  // stale occurrence entry

    std::map<std::int64_t, std::int64_t> delta;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      --delta[pair_key(syms[i], syms[i + 1])];
    }
    std::vector<SymbolId> out;
    out.reserve(syms.size());
    for (std::size_t i = 0; i < syms.size();) {
      if (i + 1 < syms.size() && syms[i] == l && syms[i + 1] == r) {
        out.push_back(merged);
        i += 2;
      } else {
        out.push_back(syms[i]);
        ++i;
      }
    }
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      ++delta[pair_key(out[i], out[i + 1])];
    }
    syms = std::move(out);
    for (const auto& [key, d] : delta) {
      if (d != 0) apply_delta(key, d * word.freq, wid);
    }
  }

  void apply_delta(std::int64_t key, std::int64_t d, std::int32_t wid) {
    const SymbolId l = pair_left(key);
    const SymbolId r = pair_right(key);
    const auto it = counts_.find(key);
    const std::int64_t old_count = it == counts_.end() ? 0 : it->second;
    const std::int64_t new_count = old_count + d;
    if (new_count < 0) throw std::logic_error("negative pair count");
    const bool elig = eligible(l, r);
    if (elig && old_count > 0) active_.erase({old_count, l, r});
    if (new_count > 0) {
      counts_[key] = new_count;
      if (elig) active_.insert({new_count, l, r});
      if (d > 0) {
        auto& list = where_[key];
        if (list.empty() || list.back() != wid) list.push_back(wid);
      }
    } else {
      if (it != counts_.end()) counts_.erase(it);
      where_.erase(key);
    }
  }

  std::int64_t recount(SymbolId l, SymbolId r) const {
    std::int64_t total = 0;
    for (const Word& word : words_) {
      for (std::size_t i = 0; i + 1 < word.syms.size(); ++i) {
        if (word.syms[i] == l && word.syms[i + 1] == r) total += word.freq;
      }
    }
    return total;
  }

  TokenizerModel assemble() {
    const std::int64_t kept =
        std::min<std::int64_t>(merges_.size(), keep_budget_);
    merges_.resize(static_cast<std::size_t>(kept));

    std::vector<Piece> pieces;
    pieces.reserve(static_cast<std::size_t>(config_.vocabulary_size));
    for (const std::string& s : config_.special_pieces) {
      pieces.push_back({s, PieceKind::Special});
    }
    for (const std::string& s : config_.user_defined_symbols) {
      pieces.push_back({s, PieceKind::Code});
    }
    if (config_.byte_fallback) {
      for (int v = 0; v < 256; ++v) {
        pieces.push_back({byte_piece_surface(static_cast<std::uint8_t>(v)),
                          PieceKind::ByteFallback});
      }
    }
    for (const MergeRule& m : merges_) {
      pieces.push_back({m.result(), PieceKind::Regular});
    }
    for (char32_t cp : alphabet_) {
      pieces.push_back({encode_utf8(cp), PieceKind::SingleChar});
    }
    for (int len = 2; len <= config_.max_ws_run; ++len) {
      pieces.push_back({marker_run(len), PieceKind::WhitespaceRun});
    }

    TokenizerModel model;
    model.config = config_;
    const auto total = static_cast<std::int64_t>(pieces.size());
    if (total < config_.vocabulary_size) {
      warn("pair supply exhausted after " + std::to_string(merges_.size()) +
           " merges; achieved vocabulary size " + std::to_string(total) +
           " of requested " + std::to_string(config_.vocabulary_size) +
           ", recording the achieved size");
      model.config.vocabulary_size = static_cast<int>(total);
    }
    model.vocab = Vocabulary(std::move(pieces));
    model.merges = std::move(merges_);
    const ValidationReport report = model.finalize();
    for (const std::string& w : report.warnings) warn(w);
    return model;
  }

  const Corpus& corpus_;
  const TrainerConfig& config_;
  const TrainOptions& options_;

  std::vector<char32_t> alphabet_;  // count desc, codepoint asc
  std::unordered_set<char32_t> alpha_set_;
  std::int64_t mandatory_ = 0;
  std::int64_t run_slots_ = 0;
  std::int64_t train_target_ = 0;
  std::int64_t keep_budget_ = 0;

  std::vector<std::string> surfaces_;
  std::vector<int> cp_len_;
  std::vector<bool> mergeable_;
  std::unordered_map<std::string, SymbolId, TransparentHash, std::equal_to<>>
      sym_index_;

  std::vector<Word> words_;
  std::unordered_map<std::int64_t, std::int64_t> counts_;
  std::unordered_map<std::int64_t, std::vector<std::int32_t>> where_;
  std::set<Entry, ActiveLess> active_;
  std::unordered_set<std::string> reserved_;
  std::vector<MergeRule> merges_;
  bool exhausted_ = false;
};

}  // namespace

TokenizerModel train_bpe(const Corpus& corpus, const TrainerConfig& config,
                         const TrainOptions& options) {
  return BpeTrainer(corpus, config, options).run();
}

TokenizerModel whitespace_surgery(const TokenizerModel& model) {
  const int target = model.config.max_ws_run;
  const int existing = model.vocab.count_of(PieceKind::WhitespaceRun);
  const int needed = (target - 1) - existing;
  if (needed <= 0) return model;

  const int regular = model.vocab.count_of(PieceKind::Regular);
  if (regular < needed) {
    throw ModelError("whitespace surgery needs " + std::to_string(needed) +
                     " regular pieces to replace, model has only " +
                     std::to_string(regular));
  }

  // The regular block is rank-ordered, so its tail holds the last-learned
  // pieces; drop those and their merge rules, then extend the run block.
  std::vector<Piece> pieces = model.vocab.pieces();
  int regular_end = -1;
  for (int id = 0; id < static_cast<int>(pieces.size()); ++id) {
    if (pieces[id].kind == PieceKind::Regular) regular_end = id;
  }
  pieces.erase(pieces.begin() + (regular_end + 1 - needed),
               pieces.begin() + (regular_end + 1));

  TokenizerModel out;
  out.config = model.config;
  out.merges = model.merges;
  out.merges.resize(out.merges.size() - static_cast<std::size_t>(needed));
  for (int len = existing + 2; len <= target; ++len) {
    pieces.push_back({marker_run(len), PieceKind::WhitespaceRun});
  }
  out.vocab = Vocabulary(std::move(pieces));
  out.finalize();
  return out;
}

}  // namespace bpekit
