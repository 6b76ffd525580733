#pragma once

#include <chrono>
#include <climits>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "centaur/chess/movegen.hpp"
#include "centaur/chess/outcome.hpp"
#include "centaur/error.hpp"

namespace centaur::uci {

class EngineError : public Error {
 public:
  using Error::Error;
};

/// The engine said something that violates the protocol or the rules.
class ProtocolError : public EngineError {
 public:
  using EngineError::EngineError;
};

enum class EngineRole { TeamMemberM, TeamMemberL, Adversary, Expert, ThirdParty };

inline std::string_view to_string(EngineRole r) {
  switch (r) {
    case EngineRole::TeamMemberM: return "team-member-m";
    case EngineRole::TeamMemberL: return "team-member-l";
    case EngineRole::Adversary: return "adversary";
    case EngineRole::Expert: return "expert";
    case EngineRole::ThirdParty: return "third-party";
  }
  return "?";
}

struct SearchLimit {
  enum class Kind { Depth, Nodes };
  Kind kind = Kind::Depth;
  long value = 1;

  static SearchLimit depth(long d) { return {Kind::Depth, d}; }
  static SearchLimit nodes(long n) { return {Kind::Nodes, n}; }

  std::string go_command() const {
    return (kind == Kind::Depth ? "go depth " : "go nodes ") + std::to_string(value);
  }
  friend bool operator==(const SearchLimit&, const SearchLimit&) = default;
};

struct EngineConfig {
  std::string name;
  std::string executable;
  std::vector<std::string> args;
  /// setoption name/value pairs, sent in order after uciok.
  std::vector<std::pair<std::string, std::string>> options;
  SearchLimit limit;
  EngineRole role = EngineRole::Adversary;
  std::chrono::milliseconds handshake_timeout{10'000};
  std::chrono::milliseconds search_timeout{120'000};
  /// When non-empty the full UCI transcript is appended to this file.
  std::string transcript_path;

  void validate() const {
    if (limit.value < 1)
      throw PreconditionError("engine '" + name + "': search limit must be >= 1");
    if (executable.empty()) throw PreconditionError("engine '" + name + "': no executable");
  }
};

/// Engine evaluation, always from the side to move. Mate scores outrank every
/// centipawn score; a shorter mate outranks a longer one.
struct Score {
  enum class Kind { Centipawns, Mate };
  Kind kind = Kind::Centipawns;
  int value = 0;  // centipawns, or signed moves-to-mate (negative: being mated)

  static constexpr Score cp(int v) { return {Kind::Centipawns, v}; }
  static constexpr Score mate(int n) { return {Kind::Mate, n}; }

  /// Total order key.
  constexpr long long key() const noexcept {
    constexpr long long kMateBase = 1'000'000'000LL;
    if (kind == Kind::Centipawns) return value;
    if (value > 0) return kMateBase - value;
    return -kMateBase - value;  // mate 0 / -N: being mated, sooner is worse
  }

  std::string uci() const {
    return (kind == Kind::Centipawns ? "cp " : "mate ") + std::to_string(value);
  }

  friend constexpr bool operator==(const Score&, const Score&) = default;
  friend constexpr auto operator<=>(const Score& a, const Score& b) noexcept {
    return a.key() <=> b.key();
  }
};

struct MoveScore {
  chess::Move move;
  Score score;
};

/// A source of moves and move evaluations: a live UCI process or an
/// in-process scripted engine. Calls on one engine are serialized by the
/// implementation; an engine must not be used from two workers at once.
class Engine {
 public:
  virtual ~Engine() = default;

  virtual const EngineConfig& config() const = 0;

  /// The engine's move under its configured limit, validated against the
  /// legal moves of `p`. Throws PreconditionError on terminal positions and
  /// ProtocolError on an illegal reply.
  chess::Move best_move(const chess::Position& p, std::optional<std::uint64_t> seed = std::nullopt) {
    const auto legal = chess::legal_moves(p);
    if (legal.empty())
      throw PreconditionError("best_move on terminal position " + p.fen());
    const chess::Move m = search_best(p, seed);
    for (const chess::Move& l : legal)
      if (l == m) return l;
    throw ProtocolError("engine '" + config().name + "' returned illegal bestmove " + m.uci() + " in " +
                        p.fen());
  }

  /// One score per requested move, in request order, each from a search
  /// restricted to that move.
  std::vector<MoveScore> score_moves(const chess::Position& p, std::span<const chess::Move> moves) {
    for (const chess::Move& m : moves)
      if (!chess::is_legal(p, m))
        throw PreconditionError("score_moves: illegal move " + m.uci() + " in " + p.fen());
    std::vector<MoveScore> out;
    out.reserve(moves.size());
    for (const chess::Move& m : moves) out.push_back({m, search_score(p, m)});
    return out;
  }

  /// Signals a new game (ucinewgame).
  virtual void new_game() {}

  /// Idempotent; the engine is unusable afterwards.
  virtual void shutdown() {}

 protected:
  virtual chess::Move search_best(const chess::Position& p, std::optional<std::uint64_t> seed) = 0;
  virtual Score search_score(const chess::Position& p, const chess::Move& m) = 0;
};

}  // namespace centaur::uci
