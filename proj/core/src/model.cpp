#include "bpekit/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "bpekit/unicode.hpp"

namespace bpekit {

namespace {

using nlohmann::json;

constexpr std::string_view kKindNames[] = {"special",     "code",
                                           "byte",        "regular",
                                           "single_char", "ws_run"};

std::string marker_run(int length) {
  std::string s;
  s.reserve(kMarkerUtf8.size() * static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) s += kMarkerUtf8;
  return s;
}

bool contains_digit(std::string_view surface) {
  for (char32_t cp : decode_utf8(surface)) {
    if (is_decimal_digit(cp)) return true;
  }
  return false;
}

// Full model validation: layout plus merge-list consistency.
ValidationReport validate_full(const TokenizerModel& model) {
  ValidationReport report = model.vocab.validate_layout(model.config);

  const auto& merges = model.merges;
  const int regular_count = model.vocab.count_of(PieceKind::Regular);
  if (static_cast<int>(merges.size()) != regular_count) {
    report.errors.push_back(
        "merge list has " + std::to_string(merges.size()) +
        " rules but the regular block has " + std::to_string(regular_count) +
        " pieces");
    return report;
  }
  int regular_begin = -1;
  for (int id = 0; id < model.vocab.size(); ++id) {
    if (model.vocab.id_to_piece(id).kind == PieceKind::Regular) {
      regular_begin = id;
      break;
    }
  }
  for (std::size_t rank = 0; rank < merges.size(); ++rank) {
    const MergeRule& rule = merges[rank];
    const std::string result = rule.result();
    const int result_id = model.vocab.piece_to_id(result);
    if (result_id < 0) {
      report.errors.push_back("merge result '" + result +
                              "' (rank " + std::to_string(rank) +
                              ") is not in the vocabulary");
      continue;
    }
    if (result_id != regular_begin + static_cast<int>(rank)) {
      report.errors.push_back("merge rank " + std::to_string(rank) +
                              " does not align with regular piece id " +
                              std::to_string(result_id));
    }
    for (const std::string* side : {&rule.left, &rule.right}) {
      const int side_id = model.vocab.piece_to_id(*side);
      if (side_id < 0) {
        report.errors.push_back("merge side '" + *side +
                                "' is not in the vocabulary");
        continue;
      }
      const PieceKind kind = model.vocab.id_to_piece(side_id).kind;
      if (kind != PieceKind::Regular && kind != PieceKind::SingleChar) {
        report.errors.push_back("merge side '" + *side +
                                "' is not a mergeable piece");
      } else if (kind == PieceKind::Regular &&
                 side_id >= regular_begin + static_cast<int>(rank)) {
        report.errors.push_back("merge rank " + std::to_string(rank) +
                                " uses result of a later merge: '" + *side +
                                "'");
      }
    }
  }
  return report;
}

json config_to_json(const TrainerConfig& c) {
  json j;
  j["vocabulary_size"] = c.vocabulary_size;
  j["character_coverage"] = c.character_coverage;
  j["split_digits"] = c.split_digits;
  j["add_dummy_prefix"] = c.add_dummy_prefix;
  j["byte_fallback"] = c.byte_fallback;
  j["user_defined_symbols"] = c.user_defined_symbols;
  j["special_pieces"] = c.special_pieces;
  j["max_ws_run"] = c.max_ws_run;
  j["max_piece_length"] = c.max_piece_length;
  j["seed"] = c.seed;
  return j;
}

TrainerConfig config_from_json(const json& j) {
  TrainerConfig c;
  c.vocabulary_size = j.at("vocabulary_size").get<int>();
  c.character_coverage = j.at("character_coverage").get<double>();
  c.split_digits = j.at("split_digits").get<bool>();
  c.add_dummy_prefix = j.at("add_dummy_prefix").get<bool>();
  c.byte_fallback = j.at("byte_fallback").get<bool>();
  c.user_defined_symbols =
      j.at("user_defined_symbols").get<std::vector<std::string>>();
  const auto specials = j.at("special_pieces").get<std::vector<std::string>>();
  if (specials.size() != 4) {
    throw ModelError("special_pieces must hold exactly 4 entries");
  }
  std::copy(specials.begin(), specials.end(), c.special_pieces.begin());
  c.max_ws_run = j.at("max_ws_run").get<int>();
  c.max_piece_length = j.at("max_piece_length").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string_view piece_kind_name(PieceKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::optional<PieceKind> piece_kind_from_name(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (kKindNames[i] == name) return static_cast<PieceKind>(i);
  }
  return std::nullopt;
}

std::string byte_piece_surface(std::uint8_t value) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "<0x%02X>", value);
  return buf;
}

std::optional<std::uint8_t> parse_byte_piece_surface(std::string_view s) {
  if (s.size() != 6 || s.substr(0, 3) != "<0x" || s[5] != '>') {
    return std::nullopt;
  }
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  const int hi = hex(s[3]);
  const int lo = hex(s[4]);
  if (hi < 0 || lo < 0) return std::nullopt;
  return static_cast<std::uint8_t>(hi * 16 + lo);
}

Vocabulary::Vocabulary(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  index_.reserve(pieces_.size());
  for (int id = 0; id < static_cast<int>(pieces_.size()); ++id) {
    index_.emplace(pieces_[id].surface, id);
  }
}

const Piece& Vocabulary::id_to_piece(int id) const {
  if (id < 0 || id >= size()) {
    throw DataError("piece id " + std::to_string(id) + " out of range [0, " +
                    std::to_string(size()) + ")");
  }
  return pieces_[id];
}

int Vocabulary::piece_to_id(std::string_view surface) const {
  const auto it = index_.find(surface);
  return it == index_.end() ? -1 : it->second;
}

int Vocabulary::count_of(PieceKind kind) const {
  int count = 0;
  for (const Piece& p : pieces_) {
    if (p.kind == kind) ++count;
  }
  return count;
}

ValidationReport Vocabulary::validate_layout(const TrainerConfig& config) const {
  ValidationReport report;
  auto fail = [&report](std::string msg) {
    report.errors.push_back(std::move(msg));
  };

  // Surface uniqueness; the index keeps first occurrences only.
  if (index_.size() != pieces_.size()) {
    std::unordered_set<std::string_view> seen;
    for (const Piece& p : pieces_) {
      if (!seen.insert(p.surface).second) {
        fail("duplicate surface '" + p.surface + "'");
      }
    }
  }
  for (const Piece& p : pieces_) {
    if (p.surface.empty()) fail("empty piece surface");
  }

  // Blocks must appear contiguously in kind order.
  int prev = -1;
  for (int id = 0; id < size(); ++id) {
    const int k = static_cast<int>(pieces_[id].kind);
    if (k < prev) {
      fail("piece id " + std::to_string(id) + " ('" + pieces_[id].surface +
           "', " + std::string(piece_kind_name(pieces_[id].kind)) +
           ") breaks the block order");
      break;
    }
    prev = k;
  }

  // Special block: exactly the configured four pieces at ids 0..3.
  if (size() < 4) {
    fail("vocabulary smaller than the special block");
    return report;
  }
  for (int id = 0; id < 4; ++id) {
    const Piece& p = pieces_[id];
    if (p.kind != PieceKind::Special || p.surface != config.special_pieces[id]) {
      fail("special piece order violates the fixed layout: id " +
           std::to_string(id) + " is '" + p.surface + "', expected '" +
           config.special_pieces[id] + "'");
    }
  }
  if (count_of(PieceKind::Special) != 4) {
    fail("special block must hold exactly 4 pieces");
  }

  // Code block mirrors the configured user symbols, in order.
  std::vector<std::string_view> code_surfaces;
  for (const Piece& p : pieces_) {
    if (p.kind == PieceKind::Code) code_surfaces.push_back(p.surface);
  }
  if (code_surfaces.size() != config.user_defined_symbols.size()) {
    fail("code block size " + std::to_string(code_surfaces.size()) +
         " does not match " + std::to_string(config.user_defined_symbols.size()) +
         " configured user symbols");
  } else {
    for (std::size_t i = 0; i < code_surfaces.size(); ++i) {
      if (code_surfaces[i] != config.user_defined_symbols[i]) {
        fail("code piece '" + std::string(code_surfaces[i]) +
             "' does not match configured symbol '" +
             config.user_defined_symbols[i] + "'");
      }
    }
  }

  // Byte block: all 256 values in order, or absent.
  std::vector<int> byte_ids;
  for (int id = 0; id < size(); ++id) {
    if (pieces_[id].kind == PieceKind::ByteFallback) byte_ids.push_back(id);
  }
  if (config.byte_fallback) {
    if (byte_ids.size() != 256) {
      fail("byte fallback block has " + std::to_string(byte_ids.size()) +
           " pieces, expected 256");
    } else {
      for (int v = 0; v < 256; ++v) {
        const std::string expected =
            byte_piece_surface(static_cast<std::uint8_t>(v));
        if (pieces_[byte_ids[v]].surface != expected) {
          fail("byte piece " + expected + " missing or out of order");
          break;
        }
      }
    }
  } else if (!byte_ids.empty()) {
    fail("byte fallback block present but byte_fallback is disabled");
  }

  for (const Piece& p : pieces_) {
    switch (p.kind) {
      case PieceKind::Regular:
        if (config.split_digits && contains_digit(p.surface)) {
          fail("regular piece '" + p.surface +
               "' contains a digit with split_digits enabled");
        }
        if (static_cast<int>(codepoint_count(p.surface)) >
            config.max_piece_length) {
          report.warnings.push_back("regular piece '" + p.surface +
                                    "' exceeds max_piece_length " +
                                    std::to_string(config.max_piece_length));
        }
        break;
      case PieceKind::SingleChar:
        if (codepoint_count(p.surface) != 1) {
          fail("single-char piece '" + p.surface + "' is not one character");
        }
        break;
      default:
        break;
    }
  }

  // Whitespace-run block: lengths 2..max_ws_run ascending, at the tail.
  std::vector<int> run_ids;
  for (int id = 0; id < size(); ++id) {
    if (pieces_[id].kind == PieceKind::WhitespaceRun) run_ids.push_back(id);
  }
  const int expected_runs = std::max(0, config.max_ws_run - 1);
  if (static_cast<int>(run_ids.size()) != expected_runs) {
    fail("whitespace-run block has " + std::to_string(run_ids.size()) +
         " pieces, expected " + std::to_string(expected_runs));
  } else {
    for (int i = 0; i < expected_runs; ++i) {
      if (pieces_[run_ids[i]].surface != marker_run(i + 2)) {
        fail("whitespace-run piece of length " + std::to_string(i + 2) +
             " missing or out of order");
        break;
      }
    }
    if (expected_runs > 0 && run_ids.back() != size() - 1) {
      fail("whitespace-run block is not at the vocabulary tail");
    }
  }

  if (size() != config.vocabulary_size) {
    fail("vocabulary holds " + std::to_string(size()) +
         " pieces but the config records " +
         std::to_string(config.vocabulary_size));
  }
  if (size() % 128 != 0) {
    report.warnings.push_back("vocabulary size " + std::to_string(size()) +
                              " is not divisible by 128");
  }
  return report;
}

ValidationReport TokenizerModel::finalize() {
  ValidationReport report = validate_full(*this);
  if (!report.ok()) {
    throw ModelError("invalid model: " + report.errors.front() +
                     (report.errors.size() > 1
                          ? " (+" + std::to_string(report.errors.size() - 1) +
                                " more)"
                          : ""));
  }

  merge_rank_.clear();
  merge_rank_.reserve(merges.size());
  for (std::size_t rank = 0; rank < merges.size(); ++rank) {
    merge_rank_.emplace(std::make_pair(merges[rank].left, merges[rank].right),
                        static_cast<int>(rank));
  }
  byte_ids_.fill(-1);
  if (config.byte_fallback) {
    for (int v = 0; v < 256; ++v) {
      byte_ids_[v] =
          vocab.piece_to_id(byte_piece_surface(static_cast<std::uint8_t>(v)));
    }
  }
  run_ids_.assign(static_cast<std::size_t>(std::max(2, config.max_ws_run + 1)),
                  -1);
  for (int len = 2; len <= config.max_ws_run; ++len) {
    run_ids_[len] = vocab.piece_to_id(marker_run(len));
  }
  return report;
}

int TokenizerModel::merge_rank(std::string_view left,
                               std::string_view right) const {
  const auto it =
      merge_rank_.find(std::make_pair(std::string(left), std::string(right)));
  return it == merge_rank_.end() ? -1 : it->second;
}

int TokenizerModel::run_piece_id(int length) const {
  if (length < 2 || length >= static_cast<int>(run_ids_.size())) return -1;
  return run_ids_[length];
}

bool TokenizerModel::covers_char(std::string_view utf8_char) const {
  const int id = vocab.piece_to_id(utf8_char);
  return id >= 0 && vocab.id_to_piece(id).kind == PieceKind::SingleChar;
}

std::string serialize_model(const TokenizerModel& model) {
  json j;
  j["version"] = kModelFormatVersion;
  j["config"] = config_to_json(model.config);
  json pieces = json::array();
  for (const Piece& p : model.vocab.pieces()) {
    pieces.push_back({{"s", p.surface}, {"k", piece_kind_name(p.kind)}});
  }
  j["pieces"] = std::move(pieces);
  json merges = json::array();
  for (const MergeRule& m : model.merges) {
    merges.push_back({m.left, m.right});
  }
  j["merges"] = std::move(merges);
  return j.dump() + "\n";
}

TokenizerModel deserialize_model(std::string_view json_text) {
  TokenizerModel model;
  try {
    const json j = json::parse(json_text);
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelError("unsupported model format version " +
                       std::to_string(version));
    }
    model.config = config_from_json(j.at("config"));
    std::vector<Piece> pieces;
    for (const json& pj : j.at("pieces")) {
      Piece p;
      p.surface = pj.at("s").get<std::string>();
      const auto kind = piece_kind_from_name(pj.at("k").get<std::string>());
      if (!kind) {
        throw ModelError("unknown piece kind '" +
                         pj.at("k").get<std::string>() + "'");
      }
      p.kind = *kind;
      pieces.push_back(std::move(p));
    }
    model.vocab = Vocabulary(std::move(pieces));
    for (const json& mj : j.at("merges")) {
      if (!mj.is_array() || mj.size() != 2) {
        throw ModelError("merge entries must be [left, right] pairs");
      }
      model.merges.push_back(
          {mj[0].get<std::string>(), mj[1].get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw ModelError(std::string("model schema mismatch: ") + e.what());
  }
  model.finalize();
  return model;
}

void save_model(const TokenizerModel& model, const std::string& path) {
  const ValidationReport report = validate_full(model);
  if (!report.ok()) {
    throw ModelError("refusing to save invalid model: " +
                     report.errors.front());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << serialize_model(model);
  if (!out) throw DataError("write failed for '" + path + "'");
}

TokenizerModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace bpekit
