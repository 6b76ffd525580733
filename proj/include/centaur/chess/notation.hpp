#pragma once

#include <string>
#include <string_view>

#include "centaur/chess/movegen.hpp"

namespace centaur::chess {

/// Resolves a UCI long-algebraic move (e2e4, e7e8q) against the legal moves
/// of `p`, returning the flagged legal move. Throws ParseError for malformed
/// text, IllegalMoveError for a well-formed but illegal move.
inline Move parse_uci(const Position& p, std::string_view text) {
  if (text.size() != 4 && text.size() != 5) throw ParseError("UCI move: bad length '" + std::string(text) + "'");
  auto from = Square::parse(text.substr(0, 2));
  auto to = Square::parse(text.substr(2, 2));
  if (!from || !to) throw ParseError("UCI move: bad square in '" + std::string(text) + "'");
  std::optional<PieceKind> promo;
  if (text.size() == 5) {
    promo = kind_from_letter(text[4]);
    if (!promo || *promo == PieceKind::Pawn || *promo == PieceKind::King)
      throw ParseError("UCI move: bad promotion in '" + std::string(text) + "'");
  }
  const Move want{*from, *to, promo, {}};
  for (const Move& m : legal_moves(p))
    if (m == want) return m;
  throw IllegalMoveError("illegal move " + std::string(text) + " in " + p.fen());
}

namespace detail {

inline std::string san_body(const Position& p, const Move& m, const std::vector<Move>& legal) {
  if (m.flags.castle) return m.to.file() == 6 ? "O-O" : "O-O-O";
  const Piece pc = p.at(m.from);
  std::string s;
  if (pc.kind() == PieceKind::Pawn) {
    if (m.flags.capture) {
      s += static_cast<char>('a' + m.from.file());
      s += 'x';
    }
    s += m.to.name();
    if (m.promotion) {
      s += '=';
      s += static_cast<char>(kind_letter(*m.promotion) - 32);
    }
    return s;
  }
  s += static_cast<char>(kind_letter(pc.kind()) - 32);
  bool ambiguous = false, same_file = false, same_rank = false;
  for (const Move& o : legal) {
    if (o.to != m.to || o.from == m.from || p.at(o.from) != pc) continue;
    ambiguous = true;
    same_file |= o.from.file() == m.from.file();
    same_rank |= o.from.rank() == m.from.rank();
  }
  if (ambiguous) {
    if (!same_file) s += static_cast<char>('a' + m.from.file());
    else if (!same_rank) s += static_cast<char>('1' + m.from.rank());
    else s += m.from.name();
  }
  if (m.flags.capture) s += 'x';
  s += m.to.name();
  return s;
}

}  // namespace detail

/// Standard algebraic notation including check (+) and mate (#) suffixes.
inline std::string to_san(const Position& p, const Move& move) {
  const auto legal = legal_moves(p);
  const Move* found = nullptr;
  for (const Move& l : legal)
    if (l == move) found = &l;
  if (!found) throw IllegalMoveError("illegal move " + move.uci() + " in " + p.fen());
  std::string s = detail::san_body(p, *found, legal);
  if (found->flags.check) {
    const Position n = make_successor(p, *found);
    MoveList replies;
    detail::generate_legal(n, replies, false);
    s += replies.empty() ? '#' : '+';
  }
  return s;
}

inline Move parse_san(const Position& p, std::string_view text) {
  std::string t(text);
  while (!t.empty() && (t.back() == '+' || t.back() == '#' || t.back() == '!' || t.back() == '?')) t.pop_back();
  for (char& c : t)
    if (c == '0') c = 'O';
  if (t.empty()) throw ParseError("SAN move: empty");
  const auto legal = legal_moves(p);
  for (const Move& m : legal)
    if (detail::san_body(p, m, legal) == t) return m;
  throw IllegalMoveError("no legal move matches SAN '" + std::string(text) + "' in " + p.fen());
}

}  // namespace centaur::chess
