#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bpekit/errors.hpp"

namespace bpekit {

// Vocabulary entries are partitioned into six kinds. The vocabulary stores
// them as contiguous blocks in exactly this order.
enum class PieceKind {
  Special,        // <pad>, <unk>, <s>, <|endoftext|>
  Code,           // protected user-defined symbols, e.g. <|python|>
  ByteFallback,   // <0x00> .. <0xFF>
  Regular,        // merge results, in training rank order
  SingleChar,     // alphabet characters retained under character coverage
  WhitespaceRun,  // 2..max_ws_run consecutive markers
};

std::string_view piece_kind_name(PieceKind kind);
std::optional<PieceKind> piece_kind_from_name(std::string_view name);

struct Piece {
  std::string surface;
  PieceKind kind = PieceKind::Regular;

  bool operator==(const Piece&) const = default;
};

// (left, right) -> left+right, ranked by training order (rank = list index).
struct MergeRule {
  std::string left;
  std::string right;

  std::string result() const { return left + right; }
  bool operator==(const MergeRule&) const = default;
};

struct TrainerConfig {
  int vocabulary_size = 64000;
  double character_coverage = 0.9999;
  bool split_digits = true;
  bool add_dummy_prefix = true;
  bool byte_fallback = true;
  std::vector<std::string> user_defined_symbols;
  // pad, unk, bos, eos; pinned to ids 0..3.
  std::array<std::string, 4> special_pieces = {"<pad>", "<unk>", "<s>",
                                               "<|endoftext|>"};
  int max_ws_run = 24;       // longest whitespace-run piece, in markers
  int max_piece_length = 16; // longest merge result, in code points
  std::uint64_t seed = 0;

  bool operator==(const TrainerConfig&) const = default;
};

// Ids reserved by the special block.
inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kBosId = 2;
inline constexpr int kEosId = 3;

// Surface of the byte fallback piece for a byte value, e.g. "<0x0A>".
std::string byte_piece_surface(std::uint8_t value);
// Parses "<0xNN>" (uppercase hex); empty when the surface is not of that form.
std::optional<std::uint8_t> parse_byte_piece_surface(std::string_view surface);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

// Ordered list of pieces; the id of a piece is its 0-based position.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<Piece> pieces);

  int size() const { return static_cast<int>(pieces_.size()); }
  const Piece& id_to_piece(int id) const;
  // -1 when absent.
  int piece_to_id(std::string_view surface) const;
  bool contains(std::string_view surface) const {
    return piece_to_id(surface) >= 0;
  }

  const std::vector<Piece>& pieces() const { return pieces_; }
  int count_of(PieceKind kind) const;

  // Checks the block layout against a config: block order and contiguity,
  // special ids 0..3, complete byte block, whitespace-run lengths
  // 2..max_ws_run at the tail, surface uniqueness, digit-free regular
  // pieces under split_digits. Divisibility of the total by 128 is a
  // warning only.
  ValidationReport validate_layout(const TrainerConfig& config) const;

  bool operator==(const Vocabulary& other) const {
    return pieces_ == other.pieces_;
  }

 private:
  struct TransparentStringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<Piece> pieces_;
  std::unordered_map<std::string, int, TransparentStringHash, std::equal_to<>>
      index_;
};

// The serializable tokenizer artifact: config, vocabulary, ranked merges.
// Immutable once finalized; safe to share across threads.
struct TokenizerModel {
  TrainerConfig config;
  Vocabulary vocab;
  std::vector<MergeRule> merges;

  // Builds lookup tables and validates all invariants (layout plus merge
  // consistency). Throws ModelError when an error is found; returns the
  // report so callers can surface warnings.
  ValidationReport finalize();

  int piece_to_id(std::string_view surface) const {
    return vocab.piece_to_id(surface);
  }
  const Piece& id_to_piece(int id) const { return vocab.id_to_piece(id); }

  // -1 when (left, right) is not a merge rule.
  int merge_rank(std::string_view left, std::string_view right) const;
  int byte_piece_id(std::uint8_t value) const { return byte_ids_[value]; }
  // Id of the run piece of `length` markers; -1 when absent.
  int run_piece_id(int length) const;
  // True when the single-character piece for this UTF-8 character exists.
  bool covers_char(std::string_view utf8_char) const;

  bool operator==(const TokenizerModel& other) const {
    return config == other.config && vocab == other.vocab &&
           merges == other.merges;
  }

 private:
  struct StringPairHash {
    std::size_t operator()(const std::pair<std::string, std::string>& p) const {
      const std::size_t h1 = std::hash<std::string>{}(p.first);
      const std::size_t h2 = std::hash<std::string>{}(p.second);
      return h1 ^ (h2 * 0x9E3779B97F4A7C15ULL + (h1 << 6) + (h1 >> 2));
    }
  };
  std::unordered_map<std::pair<std::string, std::string>, int, StringPairHash>
      merge_rank_;
  std::array<int, 256> byte_ids_{};
  std::vector<int> run_ids_;  // run_ids_[k] = id of the k-marker piece
};

inline constexpr int kModelFormatVersion = 1;

// Canonical JSON serialization: UTF-8, sorted keys, no insignificant
// whitespace. save -> load -> save is byte-identical.
std::string serialize_model(const TokenizerModel& model);
TokenizerModel deserialize_model(std::string_view json_text);

// Refuses to write a model whose layout validation reports errors.
void save_model(const TokenizerModel& model, const std::string& path);
TokenizerModel load_model(const std::string& path);

}  // namespace bpekit
