#pragma once

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "centaur/chess/board.hpp"
#include "centaur/chess/types.hpp"
#include "centaur/error.hpp"

namespace centaur::chess {

inline constexpr std::string_view kStartFen =
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

/// Immutable chess state. Construct via from_fen()/start(); successors come
/// from apply_move() in movegen.hpp.
class Position {
 public:
  static Position start() { return from_fen(kStartFen); }

  /// Accepts the six FEN fields, or the first four (EPD style; clocks default
  /// to "0 1"). Throws ParseError naming the offending field.
  static Position from_fen(std::string_view text);

  std::string fen() const;

  const Board& board() const noexcept { return board_; }
  Piece at(Square s) const noexcept { return board_[s]; }
  Color side_to_move() const noexcept { return side_; }
  CastlingRights castling() const noexcept { return castling_; }
  std::optional<Square> en_passant() const noexcept { return ep_; }
  int halfmove_clock() const noexcept { return halfmove_; }
  int fullmove_number() const noexcept { return fullmove_; }
  Square king_square(Color c) const noexcept { return kings_[index_of(c)]; }
  bool has_king(Color c) const noexcept { return board_[kings_[index_of(c)]].is(c, PieceKind::King); }

  /// Half-moves since the initial position implied by the fullmove counter.
  int ply() const noexcept { return (fullmove_ - 1) * 2 + (side_ == Color::Black ? 1 : 0); }

  bool in_check() const noexcept { return is_attacked(board_, king_square(side_), ~side_); }

  /// Placement, side, castling and (capturable) en passant: the identity used
  /// for repetition detection.
  bool same_position(const Position& o) const noexcept {
    return board_ == o.board_ && side_ == o.side_ && castling_ == o.castling_ &&
           effective_ep() == o.effective_ep();
  }

  /// En passant square only if a pawn of the side to move stands ready to take.
  std::optional<Square> effective_ep() const noexcept {
    if (!ep_) return std::nullopt;
    const int r = side_ == Color::White ? ep_->rank() - 1 : ep_->rank() + 1;
    for (int df : {-1, 1}) {
      const int f = ep_->file() + df;
      if (f >= 0 && f < 8 && board_[Square::at(f, r)].is(side_, PieceKind::Pawn)) return ep_;
    }
    return std::nullopt;
  }

  /// Side to move passes; en passant is cleared. The result may have the
  /// new non-mover in check and is only meant for feature extraction.
  Position with_null_move() const {
    Position p = *this;
    p.side_ = ~side_;
    p.ep_.reset();
    if (side_ == Color::Black) ++p.fullmove_;
    return p;
  }

  /// Colours swapped and board flipped vertically; side to move is kept as
  /// given by `side`.
  Position mirrored(Color side) const {
    Position p;
    p.board_ = chess::mirrored(board_);
    p.side_ = side;
    p.castling_ = {castling_.black_king, castling_.black_queen, castling_.white_king,
                   castling_.white_queen};
    if (ep_) p.ep_ = ep_->flipped();
    p.halfmove_ = halfmove_;
    p.fullmove_ = fullmove_;
    p.locate_kings();
    return p;
  }

  friend bool operator==(const Position&, const Position&) = default;

 private:
  friend Position make_successor(const Position&, const Move&);

  void locate_kings() noexcept {
    for (int i = 0; i < 64; ++i) {
      Piece p = board_[Square(i)];
      if (p && p.kind() == PieceKind::King) kings_[index_of(p.color())] = Square(i);
    }
  }

  Board board_;
  Color side_ = Color::White;
  CastlingRights castling_;
  std::optional<Square> ep_;
  int halfmove_ = 0;
  int fullmove_ = 1;
  std::array<Square, 2> kings_{};
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r' && s[j] != '\n') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline int parse_int_field(std::string_view s, const char* field) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(std::string("FEN ") + field + ": not an integer '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline Position Position::from_fen(std::string_view text) {
  const auto fields = detail::split_ws(text);
  if (fields.size() != 6 && fields.size() != 4)
    throw ParseError("FEN field count: expected 6 (or 4), got " + std::to_string(fields.size()));

  Position p;
  int rank = 7, file = 0;
  int kings[2] = {0, 0};
  for (char c : fields[0]) {
    if (c == '/') {
      if (file != 8) throw ParseError("FEN placement: rank " + std::to_string(rank + 1) + " does not have 8 files");
      --rank;
      file = 0;
      if (rank < 0) throw ParseError("FEN placement: more than 8 ranks");
    } else if (c >= '1' && c <= '8') {
      file += c - '0';
      if (file > 8) throw ParseError("FEN placement: rank " + std::to_string(rank + 1) + " overflows");
    } else {
      auto kind = kind_from_letter(c);
      if (!kind) throw ParseError(std::string("FEN placement: unknown piece '") + c + "'");
      if (file > 7) throw ParseError("FEN placement: rank " + std::to_string(rank + 1) + " overflows");
      Color color = (c >= 'A' && c <= 'Z') ? Color::White : Color::Black;
      if (*kind == PieceKind::Pawn && (rank == 0 || rank == 7))
        throw ParseError("FEN placement: pawn on back rank at " + Square::at(file, rank).name());
      if (*kind == PieceKind::King) ++kings[index_of(color)];
      p.board_[Square::at(file, rank)] = Piece(color, *kind);
      ++file;
    }
  }
  if (rank != 0 || file != 8) throw ParseError("FEN placement: expected 8 complete ranks");
  if (kings[0] != 1)
    throw ParseError(kings[0] == 0 ? "FEN placement: no white king" : "FEN placement: two white kings");
  if (kings[1] != 1)
    throw ParseError(kings[1] == 0 ? "FEN placement: no black king" : "FEN placement: two black kings");
  p.locate_kings();

  if (fields[1] == "w") p.side_ = Color::White;
  else if (fields[1] == "b") p.side_ = Color::Black;
  else throw ParseError("FEN side to move: expected 'w' or 'b', got '" + std::string(fields[1]) + "'");

  if (fields[2] != "-") {
    for (char c : fields[2]) {
      switch (c) {
        case 'K': p.castling_.white_king = true; break;
        case 'Q': p.castling_.white_queen = true; break;
        case 'k': p.castling_.black_king = true; break;
        case 'q': p.castling_.black_queen = true; break;
        default: throw ParseError(std::string("FEN castling: unexpected '") + c + "'");
      }
    }
  }

  if (fields[3] != "-") {
    auto ep = Square::parse(fields[3]);
    if (!ep) throw ParseError("FEN en passant: bad square '" + std::string(fields[3]) + "'");
    const int want = p.side_ == Color::White ? 5 : 2;
    if (ep->rank() != want) throw ParseError("FEN en passant: square " + ep->name() + " not on the capture rank");
    p.ep_ = ep;
  }

  if (fields.size() == 6) {
    p.halfmove_ = detail::parse_int_field(fields[4], "halfmove clock");
    p.fullmove_ = detail::parse_int_field(fields[5], "fullmove number");
    if (p.halfmove_ < 0) throw ParseError("FEN halfmove clock: negative");
    if (p.fullmove_ < 1) throw ParseError("FEN fullmove number: must be >= 1");
  }

  if (is_attacked(p.board_, p.king_square(~p.side_), p.side_))
    throw ParseError("FEN side to move: side not to move is in check");
  return p;
}

inline std::string Position::fen() const {
  std::string s;
  for (int r = 7; r >= 0; --r) {
    int empty = 0;
    for (int f = 0; f < 8; ++f) {
      Piece p = board_[Square::at(f, r)];
      if (!p) {
        ++empty;
        continue;
      }
      if (empty) s += static_cast<char>('0' + empty);
      empty = 0;
      s += p.fen_char();
    }
    if (empty) s += static_cast<char>('0' + empty);
    if (r) s += '/';
  }
  s += side_ == Color::White ? " w " : " b ";
  std::string c;
  if (castling_.white_king) c += 'K';
  if (castling_.white_queen) c += 'Q';
  if (castling_.black_king) c += 'k';
  if (castling_.black_queen) c += 'q';
  s += c.empty() ? "-" : c;
  s += ' ';
  s += ep_ ? ep_->name() : "-";
  s += ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_);
  return s;
}

}  // namespace centaur::chess
