#pragma once

#include <array>
#include <cstdlib>
#include <span>

#include "centaur/chess/types.hpp"

namespace centaur::chess {

/// Bare placement of the 64 squares. Attack queries live here rather than on
/// Position because they must also work on shuffled (possibly illegal) boards.
class Board {
 public:
  constexpr Piece operator[](Square s) const noexcept { return squares_[s.index()]; }
  constexpr Piece& operator[](Square s) noexcept { return squares_[s.index()]; }

  constexpr std::span<const Piece, 64> squares() const noexcept { return squares_; }

  friend constexpr bool operator==(const Board&, const Board&) = default;

 private:
  std::array<Piece, 64> squares_{};
};

namespace detail {

struct Offset {
  int df;
  int dr;
};

inline constexpr std::array<Offset, 8> kKnightOffsets = {
    {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
inline constexpr std::array<Offset, 8> kKingOffsets = {
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
inline constexpr std::array<Offset, 4> kRookDirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
inline constexpr std::array<Offset, 4> kBishopDirs = {{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

constexpr bool on_board(int f, int r) noexcept { return f >= 0 && f < 8 && r >= 0 && r < 8; }

}  // namespace detail

/// True iff a piece of colour `by` pseudo-legally attacks `target` (pins are
/// ignored, pawns attack diagonally only, the occupant of `target` is irrelevant).
inline bool is_attacked(const Board& b, Square target, Color by) noexcept {
  using namespace detail;
  const int f = target.file();
  const int r = target.rank();

  const int pawn_rank = by == Color::White ? r - 1 : r + 1;
  for (int df : {-1, 1}) {
    if (on_board(f + df, pawn_rank) &&
        b[Square::at(f + df, pawn_rank)].is(by, PieceKind::Pawn))
      return true;
  }
  for (auto [df, dr] : kKnightOffsets) {
    if (on_board(f + df, r + dr) && b[Square::at(f + df, r + dr)].is(by, PieceKind::Knight))
      return true;
  }
  for (auto [df, dr] : kKingOffsets) {
    if (on_board(f + df, r + dr) && b[Square::at(f + df, r + dr)].is(by, PieceKind::King))
      return true;
  }
  auto slide = [&](auto const& dirs, PieceKind slider) {
    for (auto [df, dr] : dirs) {
      int cf = f + df, cr = r + dr;
      while (on_board(cf, cr)) {
        Piece p = b[Square::at(cf, cr)];
        if (p) {
          if (p.color() == by && (p.kind() == slider || p.kind() == PieceKind::Queen))
            return true;
          break;
        }
        cf += df;
        cr += dr;
      }
    }
    return false;
  };
  return slide(kRookDirs, PieceKind::Rook) || slide(kBishopDirs, PieceKind::Bishop);
}

/// Vertical flip with colours swapped.
inline Board mirrored(const Board& b) noexcept {
  Board out;
  for (int i = 0; i < 64; ++i) {
    Piece p = b[Square(i)];
    if (p) out[Square(i).flipped()] = Piece(~p.color(), p.kind());
  }
  return out;
}

}  // namespace centaur::chess
