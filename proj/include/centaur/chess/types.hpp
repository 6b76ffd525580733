#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace centaur::chess {

enum class Color : std::uint8_t { White = 0, Black = 1 };

constexpr Color operator~(Color c) noexcept {
  return c == Color::White ? Color::Black : Color::White;
}

constexpr int index_of(Color c) noexcept { return static_cast<int>(c); }

inline std::string_view to_string(Color c) { return c == Color::White ? "white" : "black"; }

enum class PieceKind : std::uint8_t { Pawn = 1, Knight, Bishop, Rook, Queen, King };

inline constexpr std::array<PieceKind, 6> kAllKinds = {PieceKind::Pawn,  PieceKind::Knight,
                                                       PieceKind::Bishop, PieceKind::Rook,
                                                       PieceKind::Queen, PieceKind::King};

constexpr char kind_letter(PieceKind k) noexcept {
  constexpr char letters[] = " pnbrqk";
  return letters[static_cast<int>(k)];
}

constexpr std::optional<PieceKind> kind_from_letter(char c) noexcept {
  switch (c | 0x20) {
    case 'p': return PieceKind::Pawn;
    case 'n': return PieceKind::Knight;
    case 'b': return PieceKind::Bishop;
    case 'r': return PieceKind::Rook;
    case 'q': return PieceKind::Queen;
    case 'k': return PieceKind::King;
    default: return std::nullopt;
  }
}

/// Square contents. The code doubles as the square-token id:
/// 0 empty, 1..6 white P N B R Q K, 7..12 black P N B R Q K.
class Piece {
 public:
  constexpr Piece() = default;
  constexpr Piece(Color c, PieceKind k) noexcept
      : code_(static_cast<std::uint8_t>(static_cast<int>(k) + (c == Color::Black ? 6 : 0))) {}

  static constexpr Piece from_code(std::uint8_t code) noexcept {
    Piece p;
    p.code_ = code;
    return p;
  }

  constexpr bool empty() const noexcept { return code_ == 0; }
  constexpr explicit operator bool() const noexcept { return code_ != 0; }
  constexpr std::uint8_t code() const noexcept { return code_; }
  constexpr Color color() const noexcept { return code_ > 6 ? Color::Black : Color::White; }
  constexpr PieceKind kind() const noexcept {
    return static_cast<PieceKind>(code_ > 6 ? code_ - 6 : code_);
  }
  constexpr bool is(Color c, PieceKind k) const noexcept { return *this == Piece(c, k); }

  constexpr char fen_char() const noexcept {
    if (empty()) return '.';
    char c = kind_letter(kind());
    return color() == Color::White ? static_cast<char>(c - 32) : c;
  }

  friend constexpr bool operator==(Piece, Piece) = default;

 private:
  std::uint8_t code_ = 0;
};

inline constexpr Piece kNoPiece{};

/// index = rank * 8 + file; a1 = 0, h1 = 7, a8 = 56, h8 = 63.
class Square {
 public:
  constexpr Square() = default;
  constexpr explicit Square(int index) noexcept : index_(static_cast<std::uint8_t>(index)) {}
  static constexpr Square at(int file, int rank) noexcept { return Square(rank * 8 + file); }

  static std::optional<Square> parse(std::string_view s) noexcept {
    if (s.size() != 2 || s[0] < 'a' || s[0] > 'h' || s[1] < '1' || s[1] > '8') return std::nullopt;
    return at(s[0] - 'a', s[1] - '1');
  }

  constexpr int index() const noexcept { return index_; }
  constexpr int file() const noexcept { return index_ & 7; }
  constexpr int rank() const noexcept { return index_ >> 3; }
  constexpr Square flipped() const noexcept { return Square(index_ ^ 56); }

  std::string name() const {
    return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
  }

  friend constexpr auto operator<=>(Square, Square) = default;

 private:
  std::uint8_t index_ = 0;
};

/// Square from algebraic name at compile time, e.g. sq("e4").
constexpr Square sq(const char* name) { return Square::at(name[0] - 'a', name[1] - '1'); }

struct CastlingRights {
  bool white_king = false;
  bool white_queen = false;
  bool black_king = false;
  bool black_queen = false;

  static constexpr CastlingRights all() noexcept { return {true, true, true, true}; }
  static constexpr CastlingRights none() noexcept { return {}; }

  /// Packed 4-bit value: bit0 WK, bit1 WQ, bit2 BK, bit3 BQ.
  constexpr int bits() const noexcept {
    return (white_king ? 1 : 0) | (white_queen ? 2 : 0) | (black_king ? 4 : 0) |
           (black_queen ? 8 : 0);
  }
  static constexpr CastlingRights from_bits(int b) noexcept {
    return {(b & 1) != 0, (b & 2) != 0, (b & 4) != 0, (b & 8) != 0};
  }
  constexpr bool any(Color c) const noexcept {
    return c == Color::White ? (white_king || white_queen) : (black_king || black_queen);
  }

  friend constexpr bool operator==(CastlingRights, CastlingRights) = default;
};

struct MoveFlags {
  bool capture = false;
  bool check = false;
  bool castle = false;
  bool en_passant = false;
};

/// A move in origin/destination form. Equality ignores the derived flags.
struct Move {
  Square from;
  Square to;
  std::optional<PieceKind> promotion;
  MoveFlags flags;

  static constexpr Move null() noexcept { return Move{}; }
  constexpr bool is_null() const noexcept { return from == to; }

  /// UCI long algebraic: e2e4, e7e8q; null move is "0000".
  std::string uci() const {
    if (is_null()) return "0000";
    std::string s = from.name() + to.name();
    if (promotion) s += kind_letter(*promotion);
    return s;
  }

  friend constexpr bool operator==(const Move& a, const Move& b) noexcept {
    return a.from == b.from && a.to == b.to && a.promotion == b.promotion;
  }
};

}  // namespace centaur::chess
