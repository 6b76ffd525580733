#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include "centaur/chess/movegen.hpp"

namespace centaur::chess {

/// Human-readable board descriptors, "self" = side to move.
struct BoardFeatures {
  double ply = 0;
  double material_points = 0;
  double adversary_material_points = 0;
  double pawn_islands = 0;
  double adversary_pawn_islands = 0;
  double defended_pieces = 0;
  double adversary_defended_pieces = 0;
  double concentration = 0;
  double adversary_concentration = 0;
  double legal_moves = 0;
  double adversary_legal_moves = 0;
  double attacks = 0;
  double adversary_attacks = 0;
  double king_freedom = 0;
  double adversary_king_freedom = 0;

  static constexpr std::size_t kCount = 15;

  static constexpr std::array<std::string_view, kCount> names() {
    return {"ply",
            "material_points",
            "adversary_material_points",
            "pawn_islands",
            "adversary_pawn_islands",
            "defended_pieces",
            "adversary_defended_pieces",
            "concentration",
            "adversary_concentration",
            "legal_moves",
            "adversary_legal_moves",
            "attacks",
            "adversary_attacks",
            "king_freedom",
            "adversary_king_freedom"};
  }

  std::array<double, kCount> values() const {
    return {ply,           material_points,       adversary_material_points,
            pawn_islands,  adversary_pawn_islands, defended_pieces,
            adversary_defended_pieces, concentration, adversary_concentration,
            legal_moves,   adversary_legal_moves, attacks,
            adversary_attacks, king_freedom,     adversary_king_freedom};
  }

  friend bool operator==(const BoardFeatures&, const BoardFeatures&) = default;
};

enum class DistanceMetric { Euclidean, Chebyshev, Manhattan };

struct FeatureOptions {
  DistanceMetric concentration_metric = DistanceMetric::Euclidean;
};

constexpr int material_value(PieceKind k) noexcept {
  switch (k) {
    case PieceKind::Pawn: return 1;
    case PieceKind::Knight:
    case PieceKind::Bishop: return 3;
    case PieceKind::Rook: return 5;
    case PieceKind::Queen: return 9;
    case PieceKind::King: return 0;
  }
  return 0;
}

namespace detail {

inline int material(const Board& b, Color c) {
  int sum = 0;
  for (Piece p : b.squares())
    if (p && p.color() == c) sum += material_value(p.kind());
  return sum;
}

inline int pawn_islands(const Board& b, Color c) {
  int islands = 0;
  bool in_run = false;
  for (int f = 0; f < 8; ++f) {
    bool has = false;
    for (int r = 0; r < 8; ++r) has |= b[Square::at(f, r)].is(c, PieceKind::Pawn);
    if (has && !in_run) ++islands;
    in_run = has;
  }
  return islands;
}

inline double defended_proportion(const Board& b, Color c) {
  int total = 0, defended = 0;
  for (int i = 0; i < 64; ++i) {
    Piece p = b[Square(i)];
    if (!p || p.color() != c || p.kind() == PieceKind::King) continue;
    ++total;
    if (is_attacked(b, Square(i), c)) ++defended;
  }
  return total == 0 ? 0.0 : static_cast<double>(defended) / total;
}

// Pair distances are binned by (|df|, |dr|) first so the result does not
// depend on square scan order (mirror images give bit-identical values).
inline double concentration(const Board& b, Color c, DistanceMetric metric) {
  std::array<Square, 64> own{};
  std::size_t n = 0;
  for (int i = 0; i < 64; ++i)
    if (b[Square(i)] && b[Square(i)].color() == c) own[n++] = Square(i);
  if (n < 2) return 0.0;
  std::array<std::array<long, 8>, 8> pairs{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      ++pairs[std::abs(own[i].file() - own[j].file())][std::abs(own[i].rank() - own[j].rank())];
  double sum = 0;
  for (int df = 0; df < 8; ++df) {
    for (int dr = 0; dr < 8; ++dr) {
      if (!pairs[df][dr]) continue;
      double d = 0;
      switch (metric) {
        case DistanceMetric::Euclidean: d = std::sqrt(static_cast<double>(df * df + dr * dr)); break;
        case DistanceMetric::Chebyshev: d = std::max(df, dr); break;
        case DistanceMetric::Manhattan: d = df + dr; break;
      }
      sum += d * static_cast<double>(pairs[df][dr]);
    }
  }
  return sum / static_cast<double>(n * (n - 1) / 2);
}

struct MobilityCounts {
  int legal = 0;
  int attacks = 0;
  int king_moves = 0;
};

inline MobilityCounts mobility(const Position& p) {
  MoveList moves;
  generate_legal(p, moves, false);
  MobilityCounts c;
  c.legal = static_cast<int>(moves.size());
  for (const Move& m : moves) {
    if (m.flags.capture) ++c.attacks;
    if (!m.flags.castle && p.at(m.from).kind() == PieceKind::King) ++c.king_moves;
  }
  return c;
}

}  // namespace detail

/// Self = side to move. The adversary's move-dependent values come from the
/// same position with a null move played (en passant cleared); if self is in
/// check that position is not a legal chess position and the adversary's
/// moves are only filtered for not leaving its own king capturable.
inline BoardFeatures board_features(const Position& p, const FeatureOptions& opt = {}) {
  const Board& b = p.board();
  const Color us = p.side_to_move();
  const Color them = ~us;
  BoardFeatures f;
  f.ply = p.ply();
  f.material_points = detail::material(b, us);
  f.adversary_material_points = detail::material(b, them);
  f.pawn_islands = detail::pawn_islands(b, us);
  f.adversary_pawn_islands = detail::pawn_islands(b, them);
  f.defended_pieces = detail::defended_proportion(b, us);
  f.adversary_defended_pieces = detail::defended_proportion(b, them);
  f.concentration = detail::concentration(b, us, opt.concentration_metric);
  f.adversary_concentration = detail::concentration(b, them, opt.concentration_metric);
  const auto self = detail::mobility(p);
  const auto adv = detail::mobility(p.with_null_move());
  f.legal_moves = self.legal;
  f.adversary_legal_moves = adv.legal;
  f.attacks = self.attacks;
  f.adversary_attacks = adv.attacks;
  f.king_freedom = self.king_moves;
  f.adversary_king_freedom = adv.king_moves;
  return f;
}

struct MoveFeatures {
  bool is_backward = false;
  bool is_flank = false;
  bool piece_is_pawn = false;
  bool piece_is_knight = false;
  bool piece_is_bishop = false;
  bool piece_is_rook = false;
  bool piece_is_queen = false;
  bool piece_is_king = false;
  bool gives_check = false;
  bool is_capture = false;
  bool is_castle = false;

  static constexpr std::size_t kCount = 11;

  static constexpr std::array<std::string_view, kCount> names() {
    return {"backward", "flank", "pawn",        "knight",  "bishop", "rook",
            "queen",    "king",  "gives_check", "capture", "castle"};
  }
  std::array<bool, kCount> values() const {
    return {is_backward,     is_flank,       piece_is_pawn, piece_is_knight,
            piece_is_bishop, piece_is_rook,  piece_is_queen, piece_is_king,
            gives_check,     is_capture,     is_castle};
  }
};

/// Backward is relative to the mover; flank means both endpoints lie in files
/// a-c, or both in files f-h. Flags are re-derived from the legal move list.
inline MoveFeatures move_features(const Position& p, const Move& move) {
  const Move* found = nullptr;
  const auto legal = legal_moves(p);
  for (const Move& l : legal)
    if (l == move) found = &l;
  if (!found) throw IllegalMoveError("illegal move " + move.uci() + " in " + p.fen());
  const Move& m = *found;
  MoveFeatures f;
  const Piece pc = p.at(m.from);
  const Color us = pc.color();
  f.is_backward = us == Color::White ? m.to.rank() < m.from.rank() : m.to.rank() > m.from.rank();
  const auto flank_set = [](int file) { return file <= 2 ? 0 : file >= 5 ? 1 : -1; };
  f.is_flank = flank_set(m.from.file()) >= 0 && flank_set(m.from.file()) == flank_set(m.to.file());
  switch (pc.kind()) {
    case PieceKind::Pawn: f.piece_is_pawn = true; break;
    case PieceKind::Knight: f.piece_is_knight = true; break;
    case PieceKind::Bishop: f.piece_is_bishop = true; break;
    case PieceKind::Rook: f.piece_is_rook = true; break;
    case PieceKind::Queen: f.piece_is_queen = true; break;
    case PieceKind::King: f.piece_is_king = true; break;
  }
  f.gives_check = m.flags.check;
  f.is_capture = m.flags.capture;
  f.is_castle = m.flags.castle;
  return f;
}

}  // namespace centaur::chess
