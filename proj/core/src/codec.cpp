#include "bpekit/codec.hpp"

#include <queue>
#include <stdexcept>

#include "bpekit/trainer.hpp"
#include "bpekit/unicode.hpp"

namespace bpekit {

namespace {

// Replace every marker with a space, bytewise; UTF-8 self-synchronization
// guarantees the marker's byte sequence never appears inside another
// character.
void append_demarkered(std::string& out, std::string_view surface) {
  std::size_t i = 0;
  while (i < surface.size()) {
    if (surface.size() - i >= kMarkerUtf8.size() &&
        surface.compare(i, kMarkerUtf8.size(), kMarkerUtf8) == 0) {
      out += ' ';
      i += kMarkerUtf8.size();
    } else {
      out += surface[i];
      ++i;
    }
  }
}

void append_byte_run(std::string& out, std::string_view bytes, bool lenient) {
  if (utf8_valid(bytes)) {
    out += bytes;
    return;
  }
  if (!lenient) {
    throw DataError("byte pieces form an invalid UTF-8 sequence");
  }
  std::size_t i = 0;
  char32_t cp;
  while (i < bytes.size()) {
    if (decode_utf8_prefix(bytes, i, cp)) {
      append_utf8(out, cp);
    } else {
      out += "\xEF\xBF\xBD";  // U+FFFD per undecodable byte
      ++i;
    }
  }
}

}  // namespace

std::vector<std::string> apply_merges(const TokenizerModel& model,
                                      std::vector<std::string> symbols) {
  const int n = static_cast<int>(symbols.size());
  if (n < 2) return symbols;

  std::vector<int> next(n), prev(n);
  std::vector<char> alive(n, 1);
  for (int i = 0; i < n; ++i) {
    next[i] = i + 1 < n ? i + 1 : -1;
    prev[i] = i - 1;
  }
  using Cand = std::pair<int, int>;  // (rank, left position)
  std::priority_queue<Cand, std::vector<Cand>, std::greater<>> heap;
  auto push_pair = [&](int pos) {
    const int npos = next[pos];
    if (npos < 0) return;
    const int rank = model.merge_rank(symbols[pos], symbols[npos]);
    if (rank >= 0) heap.push({rank, pos});
  };
  for (int i = 0; i + 1 < n; ++i) push_pair(i);

  while (!heap.empty()) {
    const auto [rank, pos] = heap.top();
    heap.pop();
    if (!alive[pos]) continue;
    const int npos = next[pos];
    if (npos < 0) continue;
    // Stale unless the pair at this position still carries this rank
    // (ranks are unique per rule, so a match means the same rule).
    if (model.merge_rank(symbols[pos], symbols[npos]) != rank) continue;

    symbols[pos] += symbols[npos];
    alive[npos] = 0;
    next[pos] = next[npos];
    if (next[pos] >= 0) prev[next[pos]] = pos;
    if (prev[pos] >= 0) push_pair(prev[pos]);
    push_pair(pos);
  }

  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (int i = 0; i >= 0; i = next[i]) {
    if (alive[i]) out.push_back(std::move(symbols[i]));
  }
  return out;
}

std::vector<std::string> encode_pieces(const TokenizerModel& model,
                                       std::string_view text) {
  if (!utf8_valid(text)) {
    throw DataError("encode input is not valid UTF-8");
  }
  const CoverageFn covered = [&model](char32_t cp) {
    return model.covers_char(encode_utf8(cp));
  };
  std::vector<std::string> pieces;
  for (PretokenUnit& unit : pretokenize(text, model.config, covered)) {
    if (unit.kind == PretokenUnit::Kind::Word && unit.symbols.size() > 1) {
      for (std::string& s : apply_merges(model, std::move(unit.symbols))) {
        pieces.push_back(std::move(s));
      }
    } else {
      for (std::string& s : unit.symbols) {
        pieces.push_back(std::move(s));
      }
    }
  }
  return pieces;
}

EncodedSequence encode(const TokenizerModel& model, std::string_view text,
                       const EncodeOptions& options) {
  EncodedSequence seq;
  seq.pieces = encode_pieces(model, text);
  seq.ids.reserve(seq.pieces.size() + 2);
  if (options.add_bos) {
    seq.pieces.insert(seq.pieces.begin(), model.config.special_pieces[2]);
  }
  if (options.add_eos) {
    seq.pieces.push_back(model.config.special_pieces[3]);
  }
  for (const std::string& piece : seq.pieces) {
    const int id = model.piece_to_id(piece);
    if (id < 0) {
      throw std::logic_error("encoder produced piece '" + piece +
                             "' that is missing from the vocabulary");
    }
    seq.ids.push_back(id);
  }
  return seq;
}

std::string decode(const TokenizerModel& model, const std::vector<int>& ids,
                   const DecodeOptions& options) {
  std::string out;
  std::string byte_run;
  auto flush_bytes = [&] {
    if (byte_run.empty()) return;
    append_byte_run(out, byte_run, options.lenient);
    byte_run.clear();
  };
  for (const int id : ids) {
    const Piece& piece = model.id_to_piece(id);  // throws on bad id
    if (piece.kind == PieceKind::ByteFallback) {
      byte_run +=
          static_cast<char>(*parse_byte_piece_surface(piece.surface));
      continue;
    }
    flush_bytes();
    switch (piece.kind) {
      case PieceKind::Special:
        break;
      case PieceKind::Code:
        out += piece.surface;
        break;
      default:
        append_demarkered(out, piece.surface);
        break;
    }
  }
  flush_bytes();
  if (model.config.add_dummy_prefix && !out.empty() && out.front() == ' ') {
    out.erase(0, 1);
  }
  return out;
}

}  // namespace bpekit
