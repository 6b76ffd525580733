#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "centaur/chess/movegen.hpp"

namespace centaur::chess {

enum class Result { Win, Draw, Loss };

enum class Termination {
  Checkmate,
  Stalemate,
  FiftyMove,
  ThreefoldRepetition,
  InsufficientMaterial,
  Adjudicated,
};

inline std::string_view to_string(Result r) {
  switch (r) {
    case Result::Win: return "win";
    case Result::Draw: return "draw";
    case Result::Loss: return "loss";
  }
  return "?";
}

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Checkmate: return "checkmate";
    case Termination::Stalemate: return "stalemate";
    case Termination::FiftyMove: return "fifty-move";
    case Termination::ThreefoldRepetition: return "threefold-repetition";
    case Termination::InsufficientMaterial: return "insufficient-material";
    case Termination::Adjudicated: return "adjudicated";
  }
  return "?";
}

/// Win/draw/loss from one designated side's point of view.
struct GameOutcome {
  Result result;
  Termination termination;

  double reward() const noexcept {
    return result == Result::Win ? 1.0 : result == Result::Draw ? 0.5 : 0.0;
  }
  friend bool operator==(const GameOutcome&, const GameOutcome&) = default;
};

/// How a game ended, colour-neutral.
struct GameEnd {
  std::optional<Color> winner;
  Termination termination;

  GameOutcome for_side(Color side) const noexcept {
    if (!winner) return {Result::Draw, termination};
    return {*winner == side ? Result::Win : Result::Loss, termination};
  }
  friend bool operator==(const GameEnd&, const GameEnd&) = default;
};

inline bool insufficient_material(const Board& b) noexcept {
  int minors = 0;
  int bishops_on[2] = {0, 0};
  bool knights = false;
  for (int i = 0; i < 64; ++i) {
    Piece p = b[Square(i)];
    if (!p) continue;
    switch (p.kind()) {
      case PieceKind::King: break;
      case PieceKind::Knight:
        ++minors;
        knights = true;
        break;
      case PieceKind::Bishop:
        ++minors;
        ++bishops_on[(Square(i).file() + Square(i).rank()) & 1];
        break;
      default: return false;
    }
  }
  if (minors <= 1) return true;
  // Any number of bishops confined to one square colour cannot mate.
  return !knights && (bishops_on[0] == 0 || bishops_on[1] == 0);
}

/// Terminal check. `history` holds earlier positions since the last
/// irreversible move (it may hold more; only matching positions count).
/// Fifty-move and threefold draws are claimed automatically.
inline std::optional<GameEnd> game_result(const Position& p, std::span<const Position> history) {
  MoveList moves;
  detail::generate_legal(p, moves, false);
  if (moves.empty()) {
    if (p.in_check()) return GameEnd{~p.side_to_move(), Termination::Checkmate};
    return GameEnd{std::nullopt, Termination::Stalemate};
  }
  if (insufficient_material(p.board())) return GameEnd{std::nullopt, Termination::InsufficientMaterial};
  if (p.halfmove_clock() >= 100) return GameEnd{std::nullopt, Termination::FiftyMove};
  int seen = 1;
  for (const Position& h : history)
    if (h.same_position(p)) ++seen;
  if (seen >= 3) return GameEnd{std::nullopt, Termination::ThreefoldRepetition};
  return std::nullopt;
}

}  // namespace centaur::chess
