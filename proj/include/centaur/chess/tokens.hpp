#pragma once

#include <array>
#include <cstdint>

#include "centaur/chess/position.hpp"
#include "centaur/util/random.hpp"

namespace centaur::chess {

/// Everything the token encoding sees. Shuffled boards are snapshots, not
/// Positions: they may be illegal and never reach move generation.
struct BoardSnapshot {
  Board board;
  Color side_to_move = Color::White;
  CastlingRights castling;
  bool in_check = false;

  static BoardSnapshot of(const Position& p) {
    return {p.board(), p.side_to_move(), p.castling(), p.in_check()};
  }
  friend bool operator==(const BoardSnapshot&, const BoardSnapshot&) = default;
};

/// Fixed 68-token layout:
///   0..63  squares a1..h8, ids 0..12 (Piece::code)
///   64     side to move, ids 0..1 (white, black)
///   65     castling rights, ids 0..15 (CastlingRights::bits)
///   66     side to move in check, ids 0..1
///   67     CLS, id 0
/// Ids are slot-local; global_id() maps them into one shared embedding table.
/// En passant and the move clocks are not encoded.
struct TokenSequence {
  static constexpr int kLength = 68;
  static constexpr int kSideSlot = 64;
  static constexpr int kCastlingSlot = 65;
  static constexpr int kCheckSlot = 66;
  static constexpr int kClsSlot = 67;

  static constexpr int kSquareVocab = 13;
  static constexpr int kSideVocab = 2;
  static constexpr int kCastlingVocab = 16;
  static constexpr int kCheckVocab = 2;
  static constexpr int kClsVocab = 1;
  static constexpr int kGlobalVocab = kSquareVocab + kSideVocab + kCastlingVocab + kCheckVocab + kClsVocab;

  std::array<std::uint8_t, kLength> ids{};

  static constexpr int slot_vocab(int slot) noexcept {
    if (slot < 64) return kSquareVocab;
    switch (slot) {
      case kSideSlot: return kSideVocab;
      case kCastlingSlot: return kCastlingVocab;
      case kCheckSlot: return kCheckVocab;
      default: return kClsVocab;
    }
  }
  static constexpr int slot_offset(int slot) noexcept {
    if (slot < 64) return 0;
    switch (slot) {
      case kSideSlot: return kSquareVocab;
      case kCastlingSlot: return kSquareVocab + kSideVocab;
      case kCheckSlot: return kSquareVocab + kSideVocab + kCastlingVocab;
      default: return kSquareVocab + kSideVocab + kCastlingVocab + kCheckVocab;
    }
  }
  int global_id(int slot) const noexcept { return slot_offset(slot) + ids[slot]; }

  bool valid() const noexcept {
    for (int s = 0; s < kLength; ++s)
      if (ids[s] >= slot_vocab(s)) return false;
    return true;
  }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

inline TokenSequence tokenize(const BoardSnapshot& s) {
  TokenSequence t;
  for (int i = 0; i < 64; ++i) t.ids[i] = s.board[Square(i)].code();
  t.ids[TokenSequence::kSideSlot] = static_cast<std::uint8_t>(index_of(s.side_to_move));
  t.ids[TokenSequence::kCastlingSlot] = static_cast<std::uint8_t>(s.castling.bits());
  t.ids[TokenSequence::kCheckSlot] = s.in_check ? 1 : 0;
  t.ids[TokenSequence::kClsSlot] = 0;
  return t;
}

inline TokenSequence tokenize(const Position& p) { return tokenize(BoardSnapshot::of(p)); }

inline BoardSnapshot decode(const TokenSequence& t) {
  BoardSnapshot s;
  for (int i = 0; i < 64; ++i) s.board[Square(i)] = Piece::from_code(t.ids[i]);
  s.side_to_move = t.ids[TokenSequence::kSideSlot] ? Color::Black : Color::White;
  s.castling = CastlingRights::from_bits(t.ids[TokenSequence::kCastlingSlot]);
  s.in_check = t.ids[TokenSequence::kCheckSlot] != 0;
  return s;
}

/// Uniform random permutation of the 64 square contents; metadata copied.
inline BoardSnapshot shuffle_position(const Position& p, std::uint64_t seed) {
  BoardSnapshot s = BoardSnapshot::of(p);
  std::array<Piece, 64> cells;
  for (int i = 0; i < 64; ++i) cells[i] = s.board[Square(i)];
  Rng rng(seed);
  shuffle_in_place(cells, rng);
  for (int i = 0; i < 64; ++i) s.board[Square(i)] = cells[i];
  return s;
}

}  // namespace centaur::chess
