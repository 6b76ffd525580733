#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "centaur/chess.hpp"
#include "test_support.hpp"

using namespace centaur;
using namespace centaur::chess;

namespace {

std::vector<std::string> sorted_uci(const std::vector<Move>& moves) {
  std::vector<std::string> out;
  for (const Move& m : moves) out.push_back(m.uci());
  std::sort(out.begin(), out.end());
  return out;
}

// Positions from seeded random playouts; used by the property tests.
std::vector<Position> random_positions(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<Position> out;
  while (static_cast<int>(out.size()) < count) {
    Position p = Position::start();
    const int plies = 1 + static_cast<int>(uniform_index(rng, 90));
    for (int i = 0; i < plies; ++i) {
      auto moves = legal_moves(p);
      if (moves.empty()) break;
      p = apply_move(p, moves[uniform_index(rng, moves.size())]);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST(Fen, ParsesStartPosition) {
  const Position p = Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
  EXPECT_EQ(p, Position::start());
  EXPECT_EQ(p.side_to_move(), Color::White);
  EXPECT_EQ(p.castling(), CastlingRights::all());
  EXPECT_EQ(p.at(sq("e1")), Piece(Color::White, PieceKind::King));
  EXPECT_EQ(p.at(sq("d8")), Piece(Color::Black, PieceKind::Queen));
  EXPECT_FALSE(p.en_passant());
}

TEST(Fen, MinimalBoard) {
  const Position p = Position::from_fen("8/8/8/8/8/8/8/K6k w - - 0 1");
  EXPECT_EQ(p.king_square(Color::White), sq("a1"));
  EXPECT_EQ(p.king_square(Color::Black), sq("h1"));
  EXPECT_EQ(p.side_to_move(), Color::White);
}

TEST(Fen, RejectsInvariantViolations) {
  auto message = [](std::string_view fen) {
    try {
      (void)Position::from_fen(fen);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("8/8/8/8/8/8/8/KK5k w - - 0 1").find("two white kings"), std::string::npos);
  EXPECT_NE(message("8/8/8/8/8/8/8/K6k w -").find("field count"), std::string::npos);
  EXPECT_NE(message("8/8/8/8/8/8/8/K6k w - - 0").find("field count"), std::string::npos);
  EXPECT_NE(message("P7/8/8/8/8/8/8/K6k w - - 0 1").find("placement"), std::string::npos);
  EXPECT_NE(message("8/8/8/8/8/8/8/K6k x - - 0 1").find("side to move"), std::string::npos);
  EXPECT_NE(message("8/8/8/8/8/8/8/K6k w Kx - 0 1").find("castling"), std::string::npos);
  EXPECT_NE(message("8/8/8/8/8/8/8/K6k w - e3 0 1").find("en passant"), std::string::npos);
  EXPECT_NE(message("8/8/8/8/8/8/8/K6k w - - a 1").find("halfmove"), std::string::npos);
  // Black (not to move) in check from the rook.
  EXPECT_NE(message("7k/8/8/8/8/8/8/K6R w - - 0 1").find("in check"), std::string::npos);
  EXPECT_NE(message("8/8/8/8/8/8/8/K6 w - - 0 1").find("placement"), std::string::npos);
}

TEST(Fen, RoundTripsOnOracleCorpus) {
  for (const auto& row : test_support::read_rows("movegen_oracle.txt")) {
    EXPECT_EQ(Position::from_fen(row[0]).fen(), row[0]);
  }
  for (const Position& p : random_positions(7, 200)) EXPECT_EQ(Position::from_fen(p.fen()), p);
}

TEST(LegalMoves, StartPositionHasTwenty) { EXPECT_EQ(legal_moves(Position::start()).size(), 20u); }

TEST(LegalMoves, PawnShieldPosition) {
  // Reference list from python-chess; g1 is empty so Kg1 is legal.
  const auto moves = legal_moves(Position::from_fen("k7/8/8/8/8/8/5PPP/7K w - - 0 1"));
  EXPECT_EQ(sorted_uci(moves),
            (std::vector<std::string>{"f2f3", "f2f4", "g2g3", "g2g4", "h1g1", "h2h3", "h2h4"}));
}

TEST(LegalMoves, StalemateIsEmpty) {
  EXPECT_TRUE(legal_moves(Position::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")).empty());
}

TEST(LegalMoves, MatchesReferenceGeneratorOnRandomPositions) {
  int rows = 0;
  for (const auto& row : test_support::read_rows("movegen_oracle.txt")) {
    ++rows;
    const Position p = Position::from_fen(row[0]);
    std::istringstream expected(row[2]);
    std::map<std::string, std::string> want;
    std::string item;
    while (expected >> item) {
      auto colon = item.find(':');
      want[item.substr(0, colon)] = item.substr(colon + 1);
    }
    std::map<std::string, std::string> got;
    for (const Move& m : legal_moves(p)) got[m.uci()] = to_san(p, m);
    EXPECT_EQ(got, want) << row[0];
    EXPECT_EQ(perft(p, 2), std::stoull(row[1])) << row[0];
  }
  EXPECT_EQ(rows, 60);
}

TEST(LegalMoves, FlagsAreDerived) {
  const Position p = Position::from_fen("r3k2r/8/8/3pP3/8/8/8/R3K2R w KQkq d6 0 1");
  for (const Move& m : legal_moves(p)) {
    if (m.uci() == "e5d6") {
      EXPECT_TRUE(m.flags.en_passant);
      EXPECT_TRUE(m.flags.capture);
    }
    if (m.uci() == "e1g1" || m.uci() == "e1c1") {
      EXPECT_TRUE(m.flags.castle);
    }
    if (m.uci() == "a1a8") {
      EXPECT_TRUE(m.flags.capture);
      EXPECT_TRUE(m.flags.check);
    }
  }
}

TEST(ApplyMove, DoublePawnPushBookkeeping) {
  const Position p = apply_move(Position::start(), parse_uci(Position::start(), "e2e4"));
  EXPECT_EQ(p.fen(), "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
}

TEST(ApplyMove, CastlingRelocatesRookAndClearsRights) {
  const Position p = Position::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 3 10");
  const Position n = apply_move(p, parse_uci(p, "e1g1"));
  EXPECT_EQ(n.at(sq("g1")), Piece(Color::White, PieceKind::King));
  EXPECT_EQ(n.at(sq("f1")), Piece(Color::White, PieceKind::Rook));
  EXPECT_FALSE(n.at(sq("h1")));
  EXPECT_FALSE(n.castling().white_king);
  EXPECT_FALSE(n.castling().white_queen);
  EXPECT_TRUE(n.castling().black_king);
  EXPECT_EQ(n.halfmove_clock(), 4);

  const Position q = apply_move(n, parse_uci(n, "e8c8"));
  EXPECT_EQ(q.at(sq("d8")), Piece(Color::Black, PieceKind::Rook));
  EXPECT_EQ(q.fen(), "2kr3r/8/8/8/8/8/8/R4RK1 w - - 5 11");
}

TEST(ApplyMove, EnPassantRemovesPassedPawn) {
  const Position p = Position::from_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 1");
  const Position n = apply_move(p, parse_uci(p, "e5d6"));
  EXPECT_FALSE(n.at(sq("d5")));
  EXPECT_EQ(n.at(sq("d6")), Piece(Color::White, PieceKind::Pawn));
  EXPECT_EQ(n.halfmove_clock(), 0);
}

TEST(ApplyMove, RejectsIllegalMoveNamingIt) {
  const Position p = Position::start();
  try {
    (void)apply_move(p, Move{sq("e2"), sq("e5"), std::nullopt, {}});
    FAIL();
  } catch (const IllegalMoveError& e) {
    EXPECT_NE(std::string(e.what()).find("e2e5"), std::string::npos);
  }
  EXPECT_THROW((void)parse_uci(p, "e2e5"), IllegalMoveError);
  EXPECT_THROW((void)parse_uci(p, "z2e5"), ParseError);
}

TEST(ApplyMove, PromotionAndCapturedRookRights) {
  const Position p = Position::from_fen("r3k2r/1P6/8/8/8/8/8/4K3 w kq - 0 1");
  const Position n = apply_move(p, parse_uci(p, "b7a8n"));
  EXPECT_EQ(n.at(sq("a8")), Piece(Color::White, PieceKind::Knight));
  EXPECT_FALSE(n.castling().black_queen);
  EXPECT_TRUE(n.castling().black_king);
}

TEST(Perft, StartPositionShallowDepths) {
  const Position p = Position::start();
  EXPECT_EQ(perft(p, 0), 1u);
  EXPECT_EQ(perft(p, 1), 20u);
  EXPECT_EQ(perft(p, 2), 400u);
  EXPECT_EQ(perft(p, 3), 8902u);
}

TEST(Perft, DepthZeroIsOneAnywhere) {
  for (const Position& p : random_positions(3, 20)) EXPECT_EQ(perft(p, 0), 1u);
}

TEST(Attacks, Examples) {
  const Position p = Position::start();
  EXPECT_FALSE(is_attacked(p.board(), sq("e4"), Color::White));
  EXPECT_TRUE(is_attacked(p.board(), sq("f3"), Color::White));
  const Position kk = Position::from_fen("7k/8/8/8/8/8/8/K7 w - - 0 1");
  EXPECT_FALSE(is_attacked(kk.board(), sq("h8"), Color::White));
}

TEST(Attacks, AgreesWithBruteForceAttackerEnumeration) {
  // Oracle: a square is attacked iff some piece of that colour, re-placed as
  // the side to move on a board where the target holds an enemy piece, has a
  // pseudo-legal capture onto it (pawn pushes never capture).
  for (const Position& p : random_positions(11, 40)) {
    for (Color by : {Color::White, Color::Black}) {
      for (int t = 0; t < 64; ++t) {
        bool brute = false;
        const Square target(t);
        for (int s = 0; s < 64 && !brute; ++s) {
          const Piece pc = p.at(Square(s));
          if (!pc || pc.color() != by || s == t) continue;
          const int df = target.file() - Square(s).file();
          const int dr = target.rank() - Square(s).rank();
          const int adf = std::abs(df), adr = std::abs(dr);
          auto clear_path = [&] {
            const int sf = (df > 0) - (df < 0), sr = (dr > 0) - (dr < 0);
            int f = Square(s).file() + sf, r = Square(s).rank() + sr;
            while (Square::at(f, r) != target) {
              if (p.at(Square::at(f, r))) return false;
              f += sf;
              r += sr;
            }
            return true;
          };
          switch (pc.kind()) {
            case PieceKind::Pawn: brute = adf == 1 && dr == (by == Color::White ? 1 : -1); break;
            case PieceKind::Knight: brute = (adf == 1 && adr == 2) || (adf == 2 && adr == 1); break;
            case PieceKind::King: brute = std::max(adf, adr) == 1; break;
            case PieceKind::Bishop: brute = adf == adr && clear_path(); break;
            case PieceKind::Rook: brute = (adf == 0 || adr == 0) && clear_path(); break;
            case PieceKind::Queen: brute = (adf == adr || adf == 0 || adr == 0) && clear_path(); break;
          }
        }
        ASSERT_EQ(is_attacked(p.board(), target, by), brute) << p.fen() << " " << target.name();
      }
    }
  }
}

TEST(GameResult, Examples) {
  const Position mate = Position::from_fen("3R2k1/5ppp/8/8/8/8/8/6K1 b - - 1 1");
  auto end = game_result(mate, {});
  ASSERT_TRUE(end);
  EXPECT_EQ(end->termination, Termination::Checkmate);
  EXPECT_EQ(end->for_side(Color::White).result, Result::Win);
  EXPECT_EQ(end->for_side(Color::Black).result, Result::Loss);
  EXPECT_DOUBLE_EQ(end->for_side(Color::White).reward(), 1.0);

  auto stale = game_result(Position::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1"), {});
  ASSERT_TRUE(stale);
  EXPECT_EQ(stale->termination, Termination::Stalemate);
  EXPECT_DOUBLE_EQ(stale->for_side(Color::Black).reward(), 0.5);

  auto kk = game_result(Position::from_fen("7k/8/8/8/8/8/8/K7 w - - 0 1"), {});
  ASSERT_TRUE(kk);
  EXPECT_EQ(kk->termination, Termination::InsufficientMaterial);
  EXPECT_FALSE(kk->winner);

  EXPECT_FALSE(game_result(Position::start(), {}));
}

TEST(GameResult, FiftyMoveAndRepetition) {
  auto fifty = game_result(Position::from_fen("7k/8/8/8/8/8/8/KR6 w - - 100 80"), {});
  ASSERT_TRUE(fifty);
  EXPECT_EQ(fifty->termination, Termination::FiftyMove);

  std::vector<Position> history;
  Position p = Position::start();
  for (std::string m : {"g1f3", "g8f6", "f3g1", "f6g8", "g1f3", "g8f6", "f3g1", "f6g8"}) {
    EXPECT_FALSE(game_result(p, history)) << m;
    history.push_back(p);
    p = apply_move(p, parse_uci(p, m));
  }
  auto rep = game_result(p, history);
  ASSERT_TRUE(rep);
  EXPECT_EQ(rep->termination, Termination::ThreefoldRepetition);
}

TEST(GameResult, InsufficientMaterialCases) {
  EXPECT_TRUE(insufficient_material(Position::from_fen("7k/8/8/8/8/8/8/KN6 w - - 0 1").board()));
  EXPECT_TRUE(insufficient_material(Position::from_fen("7k/8/8/8/8/8/8/KB3b2 w - - 0 1").board()));
  EXPECT_FALSE(insufficient_material(Position::from_fen("7k/8/8/8/8/8/8/KB2b3 w - - 0 1").board()));
  EXPECT_FALSE(insufficient_material(Position::from_fen("7k/8/8/8/8/8/8/KNN5 w - - 0 1").board()));
  EXPECT_FALSE(insufficient_material(Position::from_fen("7k/8/8/8/8/8/1P6/K7 w - - 0 1").board()));
}

TEST(BoardFeatures, StartPosition) {
  const BoardFeatures f = board_features(Position::start());
  EXPECT_EQ(f.ply, 0);
  EXPECT_EQ(f.material_points, 39);
  EXPECT_EQ(f.adversary_material_points, 39);
  EXPECT_EQ(f.pawn_islands, 1);
  EXPECT_EQ(f.adversary_pawn_islands, 1);
  EXPECT_EQ(f.king_freedom, 0);
  EXPECT_EQ(f.adversary_king_freedom, 0);
  EXPECT_EQ(f.legal_moves, 20);
  EXPECT_EQ(f.adversary_legal_moves, 20);
  EXPECT_EQ(f.attacks, 0);
}

TEST(BoardFeatures, LoneKings) {
  const BoardFeatures f = board_features(Position::from_fen("7k/8/8/8/8/8/8/K7 w - - 0 1"));
  EXPECT_EQ(f.material_points, 0);
  EXPECT_EQ(f.pawn_islands, 0);
  EXPECT_EQ(f.defended_pieces, 0);
  EXPECT_EQ(f.concentration, 0);
  EXPECT_EQ(f.king_freedom, 3);
}

TEST(BoardFeatures, PlyAfterOneMove) {
  const Position p = apply_move(Position::start(), parse_uci(Position::start(), "e2e4"));
  EXPECT_EQ(board_features(p).ply, 1);
}

TEST(BoardFeatures, MatchesReferenceImplementation) {
  int rows = 0;
  for (const auto& row : test_support::read_rows("features_oracle.txt")) {
    ++rows;
    std::istringstream in(row[1]);
    const auto got = board_features(Position::from_fen(row[0])).values();
    for (std::size_t i = 0; i < BoardFeatures::kCount; ++i) {
      double want;
      in >> want;
      EXPECT_NEAR(got[i], want, 1e-12) << row[0] << " " << BoardFeatures::names()[i];
    }
  }
  EXPECT_EQ(rows, 25);
}

TEST(BoardFeatures, MirrorSwapsSelfAndAdversary) {
  for (Position p : random_positions(5, 150)) {
    if (p.en_passant()) continue;
    const auto a = board_features(p).values();
    // Same side-to-move colour on the colour-swapped, flipped board: the
    // former adversary army is now to move.
    const auto b = board_features(p.mirrored(p.side_to_move())).values();
    for (std::size_t i = 1; i < BoardFeatures::kCount; i += 2) {
      EXPECT_DOUBLE_EQ(a[i], b[i + 1]) << p.fen() << " " << BoardFeatures::names()[i];
      EXPECT_DOUBLE_EQ(a[i + 1], b[i]) << p.fen() << " " << BoardFeatures::names()[i];
    }
    // The fully mirrored position (mover's army kept) is the same game.
    const auto c = board_features(p.mirrored(~p.side_to_move())).values();
    for (std::size_t i = 1; i < BoardFeatures::kCount; ++i) EXPECT_DOUBLE_EQ(a[i], c[i]);
  }
}

TEST(BoardFeatures, RangeInvariants) {
  for (const Position& p : random_positions(9, 200)) {
    const BoardFeatures f = board_features(p);
    EXPECT_GE(f.pawn_islands, 0);
    EXPECT_LE(f.pawn_islands, 4);
    EXPECT_GE(f.defended_pieces, 0);
    EXPECT_LE(f.defended_pieces, 1);
    EXPECT_LE(f.material_points, 103);
    EXPECT_LE(f.king_freedom, 8);
    EXPECT_LE(f.adversary_king_freedom, 8);
  }
}

TEST(MoveFeatures, Examples) {
  const Position start = Position::start();
  auto nf3 = move_features(start, parse_uci(start, "g1f3"));
  EXPECT_TRUE(nf3.piece_is_knight);
  EXPECT_FALSE(nf3.is_backward);
  EXPECT_TRUE(nf3.is_flank);  // g and f are both in f-h

  const Position rook = Position::from_fen("7k/8/8/8/R7/8/8/7K w - - 0 1");
  auto ra1 = move_features(rook, parse_uci(rook, "a4a1"));
  EXPECT_TRUE(ra1.is_backward);
  EXPECT_TRUE(ra1.is_flank);
  EXPECT_TRUE(ra1.piece_is_rook);

  const Position castle = Position::from_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1");
  auto oo = move_features(castle, parse_san(castle, "O-O"));
  EXPECT_TRUE(oo.is_castle);
  EXPECT_TRUE(oo.piece_is_king);
  EXPECT_FALSE(oo.is_flank);  // e -> g starts in the centre

  const Position black = Position::from_fen("4k3/8/8/8/8/8/8/4K3 b - - 0 1");
  EXPECT_FALSE(move_features(black, parse_uci(black, "e8e7")).is_backward);
  const Position black2 = Position::from_fen("8/8/4k3/8/8/8/8/4K3 b - - 0 1");
  EXPECT_TRUE(move_features(black2, parse_uci(black2, "e6e7")).is_backward);
}

TEST(MoveFeatures, ExactlyOnePieceIndicator) {
  // Independent classifier: flank sets by file arithmetic on UCI text.
  auto file_set = [](char f) { return f <= 'c' ? 0 : f >= 'f' ? 1 : -1; };
  for (const Position& p : random_positions(13, 60)) {
    for (const Move& m : legal_moves(p)) {
      const auto f = move_features(p, m);
      const auto v = f.values();
      EXPECT_EQ(std::count(v.begin() + 2, v.begin() + 8, true), 1);
      if (f.is_castle) {
        EXPECT_TRUE(f.piece_is_king);
      }
      const std::string u = m.uci();
      EXPECT_EQ(f.is_flank, file_set(u[0]) >= 0 && file_set(u[0]) == file_set(u[2])) << u;
    }
  }
}

TEST(Tokens, StartPositionLayout) {
  const TokenSequence t = tokenize(Position::start());
  const std::array<int, 8> back = {4, 2, 3, 5, 6, 3, 2, 4};
  for (int f = 0; f < 8; ++f) EXPECT_EQ(t.ids[f], back[f]);
  for (int i = 8; i < 16; ++i) EXPECT_EQ(t.ids[i], 1);
  for (int i = 16; i < 48; ++i) EXPECT_EQ(t.ids[i], 0);
  for (int i = 48; i < 56; ++i) EXPECT_EQ(t.ids[i], 7);
  EXPECT_EQ(t.ids[56], 10);
  EXPECT_EQ(t.ids[60], 12);
  EXPECT_EQ(t.ids[TokenSequence::kSideSlot], 0);
  EXPECT_EQ(t.ids[TokenSequence::kCastlingSlot], 15);
  EXPECT_EQ(t.ids[TokenSequence::kCheckSlot], 0);
  EXPECT_EQ(t.ids[TokenSequence::kClsSlot], 0);
  EXPECT_EQ(t.global_id(TokenSequence::kClsSlot), TokenSequence::kGlobalVocab - 1);
}

TEST(Tokens, LoneKings) {
  const TokenSequence t = tokenize(Position::from_fen("7k/8/8/8/8/8/8/K7 w - - 0 1"));
  EXPECT_EQ(std::count(t.ids.begin(), t.ids.begin() + 64, 0), 62);
  EXPECT_EQ(t.ids[sq("a1").index()], 6);
  EXPECT_EQ(t.ids[sq("h8").index()], 12);
}

TEST(Tokens, DecodeRecoversEncodedFields) {
  for (const Position& p : random_positions(17, 200)) {
    const TokenSequence t = tokenize(p);
    ASSERT_TRUE(t.valid());
    EXPECT_EQ(decode(t), BoardSnapshot::of(p));
    EXPECT_EQ(tokenize(decode(t)), t);
  }
}

TEST(Tokens, ShufflePreservesMultisetAndIsSeeded) {
  const Position kk = Position::from_fen("7k/8/8/8/8/8/8/K7 w - - 0 1");
  const BoardSnapshot s = shuffle_position(kk, 42);
  int kings = 0, empties = 0;
  for (Piece p : s.board.squares()) (p ? kings : empties)++;
  EXPECT_EQ(kings, 2);
  EXPECT_EQ(empties, 62);
  EXPECT_EQ(shuffle_position(kk, 42), s);

  for (const Position& p : random_positions(19, 50)) {
    const TokenSequence a = tokenize(p);
    const TokenSequence b = tokenize(shuffle_position(p, 7));
    std::multiset<int> ma(a.ids.begin(), a.ids.begin() + 64), mb(b.ids.begin(), b.ids.begin() + 64);
    EXPECT_EQ(ma, mb);
    EXPECT_TRUE(std::equal(a.ids.begin() + 64, a.ids.end(), b.ids.begin() + 64));
  }
  EXPECT_NE(shuffle_position(Position::start(), 1).board, Position::start().board());
}

TEST(Properties, ApplyMoveKeepsMoverSafeAndAlternatesSide) {
  for (const Position& p : random_positions(23, 100)) {
    for (const Move& m : legal_moves(p)) {
      const Position n = apply_move(p, m);
      EXPECT_EQ(n.side_to_move(), ~p.side_to_move());
      EXPECT_FALSE(is_attacked(n.board(), n.king_square(p.side_to_move()), n.side_to_move()));
      EXPECT_EQ(m.flags.check, n.in_check());
    }
  }
}

TEST(Notation, SanRoundTrip) {
  for (const Position& p : random_positions(29, 60)) {
    for (const Move& m : legal_moves(p)) EXPECT_EQ(parse_san(p, to_san(p, m)), m);
  }
  const Position p = Position::from_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
  EXPECT_EQ(to_san(p, parse_uci(p, "a1a8")), "Ra8#");
}
