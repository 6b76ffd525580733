#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "centaur/chess/position.hpp"

namespace centaur::chess {

/// Fixed-capacity move buffer (no legal position has more than 218 moves).
class MoveList {
 public:
  void push(const Move& m) noexcept { moves_[size_++] = m; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  const Move& operator[](std::size_t i) const noexcept { return moves_[i]; }
  Move& operator[](std::size_t i) noexcept { return moves_[i]; }
  const Move* begin() const noexcept { return moves_.data(); }
  const Move* end() const noexcept { return moves_.data() + size_; }
  Move* begin() noexcept { return moves_.data(); }
  Move* end() noexcept { return moves_.data() + size_; }
  void truncate(std::size_t n) noexcept { size_ = n; }

 private:
  std::array<Move, 256> moves_;
  std::size_t size_ = 0;
};

/// Successor without any legality check. Public for the few callers that
/// already hold a legal move (perft, replay of validated records).
inline Position make_successor(const Position& p, const Move& m) {
  Position n = p;
  const Color us = p.side_;
  const Piece mover = p.board_[m.from];
  const Piece captured = p.board_[m.to];
  bool irreversible = captured || mover.kind() == PieceKind::Pawn;

  n.board_[m.from] = kNoPiece;
  if (mover.kind() == PieceKind::Pawn && p.ep_ && m.to == *p.ep_ && m.from.file() != m.to.file() &&
      !captured) {
    n.board_[Square::at(m.to.file(), m.from.rank())] = kNoPiece;
  }
  n.board_[m.to] = m.promotion ? Piece(us, *m.promotion) : mover;

  if (mover.kind() == PieceKind::King) {
    n.kings_[index_of(us)] = m.to;
    const int df = m.to.file() - m.from.file();
    if (df == 2 || df == -2) {
      const int r = m.from.rank();
      const Square rook_from = Square::at(df > 0 ? 7 : 0, r);
      const Square rook_to = Square::at(df > 0 ? 5 : 3, r);
      n.board_[rook_to] = n.board_[rook_from];
      n.board_[rook_from] = kNoPiece;
    }
    if (us == Color::White) n.castling_.white_king = n.castling_.white_queen = false;
    else n.castling_.black_king = n.castling_.black_queen = false;
  }
  auto clear_rook_right = [&](Square s) {
    if (s == sq("a1")) n.castling_.white_queen = false;
    else if (s == sq("h1")) n.castling_.white_king = false;
    else if (s == sq("a8")) n.castling_.black_queen = false;
    else if (s == sq("h8")) n.castling_.black_king = false;
  };
  clear_rook_right(m.from);
  clear_rook_right(m.to);

  n.ep_.reset();
  if (mover.kind() == PieceKind::Pawn && (m.to.rank() - m.from.rank() == 2 || m.from.rank() - m.to.rank() == 2))
    n.ep_ = Square::at(m.from.file(), (m.from.rank() + m.to.rank()) / 2);

  n.halfmove_ = irreversible ? 0 : p.halfmove_ + 1;
  if (us == Color::Black) ++n.fullmove_;
  n.side_ = ~us;
  return n;
}

namespace detail {

inline void push_pawn_move(MoveList& out, Square from, Square to, bool capture, bool ep) {
  Move m{from, to, std::nullopt, {capture, false, false, ep}};
  if (to.rank() == 0 || to.rank() == 7) {
    for (PieceKind k : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight}) {
      m.promotion = k;
      out.push(m);
    }
  } else {
    out.push(m);
  }
}

inline void pseudo_legal_moves(const Position& p, MoveList& out) {
  const Board& b = p.board();
  const Color us = p.side_to_move();
  const Color them = ~us;
  const int forward = us == Color::White ? 1 : -1;
  const int start_rank = us == Color::White ? 1 : 6;

  for (int i = 0; i < 64; ++i) {
    const Square from(i);
    const Piece pc = b[from];
    if (!pc || pc.color() != us) continue;
    const int f = from.file(), r = from.rank();

    switch (pc.kind()) {
      case PieceKind::Pawn: {
        const int r1 = r + forward;
        if (on_board(f, r1) && !b[Square::at(f, r1)]) {
          push_pawn_move(out, from, Square::at(f, r1), false, false);
          const int r2 = r1 + forward;
          if (r == start_rank && !b[Square::at(f, r2)])
            push_pawn_move(out, from, Square::at(f, r2), false, false);
        }
        for (int df : {-1, 1}) {
          if (!on_board(f + df, r1)) continue;
          const Square to = Square::at(f + df, r1);
          if (b[to] && b[to].color() == them) push_pawn_move(out, from, to, true, false);
          else if (!b[to] && p.en_passant() && *p.en_passant() == to)
            push_pawn_move(out, from, to, true, true);
        }
        break;
      }
      case PieceKind::Knight:
      case PieceKind::King: {
        const auto& offs = pc.kind() == PieceKind::Knight ? kKnightOffsets : kKingOffsets;
        for (auto [df, dr] : offs) {
          if (!on_board(f + df, r + dr)) continue;
          const Square to = Square::at(f + df, r + dr);
          if (b[to] && b[to].color() == us) continue;
          out.push(Move{from, to, std::nullopt, {static_cast<bool>(b[to]), false, false, false}});
        }
        break;
      }
      default: {
        auto slide = [&](const auto& dirs) {
          for (auto [df, dr] : dirs) {
            int cf = f + df, cr = r + dr;
            while (on_board(cf, cr)) {
              const Square to = Square::at(cf, cr);
              if (b[to]) {
                if (b[to].color() == them) out.push(Move{from, to, std::nullopt, {true, false, false, false}});
                break;
              }
              out.push(Move{from, to, std::nullopt, {}});
              cf += df;
              cr += dr;
            }
          }
        };
        if (pc.kind() != PieceKind::Bishop) slide(kRookDirs);
        if (pc.kind() != PieceKind::Rook) slide(kBishopDirs);
      }
    }
  }

  // Castling: king and rook on their home squares, path empty, king not
  // passing through or landing on an attacked square.
  const CastlingRights cr = p.castling();
  const int home = us == Color::White ? 0 : 7;
  const Square king_home = Square::at(4, home);
  if (!b[king_home].is(us, PieceKind::King)) return;
  const bool king_side = us == Color::White ? cr.white_king : cr.black_king;
  const bool queen_side = us == Color::White ? cr.white_queen : cr.black_queen;
  if (!king_side && !queen_side) return;
  if (is_attacked(b, king_home, them)) return;
  if (king_side && b[Square::at(7, home)].is(us, PieceKind::Rook) && !b[Square::at(5, home)] &&
      !b[Square::at(6, home)] && !is_attacked(b, Square::at(5, home), them) &&
      !is_attacked(b, Square::at(6, home), them)) {
    out.push(Move{king_home, Square::at(6, home), std::nullopt, {false, false, true, false}});
  }
  if (queen_side && b[Square::at(0, home)].is(us, PieceKind::Rook) && !b[Square::at(1, home)] &&
      !b[Square::at(2, home)] && !b[Square::at(3, home)] && !is_attacked(b, Square::at(3, home), them) &&
      !is_attacked(b, Square::at(2, home), them)) {
    out.push(Move{king_home, Square::at(2, home), std::nullopt, {false, false, true, false}});
  }
}

/// Legal moves; `with_check_flags` additionally fills MoveFlags::check.
inline void generate_legal(const Position& p, MoveList& out, bool with_check_flags) {
  MoveList pseudo;
  pseudo_legal_moves(p, pseudo);
  const Color us = p.side_to_move();
  for (Move m : pseudo) {
    const Position n = make_successor(p, m);
    if (is_attacked(n.board(), n.king_square(us), ~us)) continue;
    if (with_check_flags && n.has_king(~us)) m.flags.check = n.in_check();
    out.push(m);
  }
}

}  // namespace detail

/// Every legal move for the side to move, with derived flags filled.
inline std::vector<Move> legal_moves(const Position& p) {
  MoveList list;
  detail::generate_legal(p, list, true);
  return {list.begin(), list.end()};
}

inline bool is_legal(const Position& p, const Move& m) {
  MoveList list;
  detail::generate_legal(p, list, false);
  for (const Move& l : list)
    if (l == m) return true;
  return false;
}

/// Successor position. Throws IllegalMoveError naming the move if it is not
/// legal in `p`; `p` itself is never modified.
inline Position apply_move(const Position& p, const Move& m) {
  MoveList list;
  detail::generate_legal(p, list, false);
  for (const Move& l : list)
    if (l == m) return make_successor(p, l);
  throw IllegalMoveError("illegal move " + m.uci() + " in " + p.fen());
}

inline std::uint64_t perft(const Position& p, int depth) {
  if (depth <= 0) return 1;
  MoveList list;
  detail::generate_legal(p, list, false);
  if (depth == 1) return list.size();
  std::uint64_t nodes = 0;
  for (const Move& m : list) nodes += perft(make_successor(p, m), depth - 1);
  return nodes;
}

}  // namespace centaur::chess
