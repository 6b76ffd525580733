#pragma once

#include <optional>
#include <vector>

#include "centaur/team/manager.hpp"
#include "centaur/uci/engine.hpp"

namespace centaur::team {

class ManagerError : public Error {
 public:
  using Error::Error;
};

struct PlayOptions {
  /// A game still running after this many plies from the opening is
  /// adjudicated a draw. Applies to simulated continuations as well.
  int max_plies = 512;
};

struct TeamMove {
  chess::Move move;
  std::optional<DecisionRecord> decision;
};

/// One step of the team protocol. Both members are asked with the same
/// engine seed; if they agree that move is played and the manager is not
/// consulted. Otherwise the manager decides with an rng seeded from
/// `seed`, and Indifferent is settled by a fair coin from the same rng.
inline TeamMove team_move(const chess::Position& p, std::span<const chess::Position> history, uci::Engine& m,
                          uci::Engine& l, Manager& mgr, std::uint64_t seed, int game_plies = 0) {
  const std::uint64_t engine_seed = derive_seed(seed, 0);
  const chess::Move rec_m = m.best_move(p, engine_seed);
  const chess::Move rec_l = l.best_move(p, engine_seed);
  if (rec_m == rec_l) return {rec_m, std::nullopt};

  DecisionRecord d;
  d.fen = p.fen();
  d.rec_m = rec_m;
  d.rec_l = rec_l;
  d.chooser = mgr.id();
  d.ply = p.ply();
  d.seed = derive_seed(seed, 1);
  Rng rng(d.seed);
  const DecisionContext ctx{p, history, rec_m, rec_l, game_plies, rng};
  try {
    d.choice = mgr.decide(ctx);
  } catch (const uci::EngineError& e) {
    throw uci::EngineError(std::string(e.what()) + " [manager " + d.chooser + " at " + d.fen + "]");
  } catch (const std::exception& e) {
    throw ManagerError("manager " + d.chooser + " failed at " + d.fen + ": " + e.what());
  }
  if (d.choice == Choice::Indifferent) d.resolved = fair_coin(rng) ? Member::M : Member::L;
  else d.resolved = d.choice == Choice::First ? Member::M : Member::L;
  return {d.resolved_move(), std::move(d)};
}

/// Whoever moves for the team: a single engine or a managed pair.
class Side {
 public:
  virtual ~Side() = default;
  virtual TeamMove play(const chess::Position& p, std::span<const chess::Position> history, std::uint64_t seed,
                        int game_plies) = 0;
  virtual std::string label() const = 0;
  virtual nlohmann::json describe() const = 0;
};

inline nlohmann::json describe_engine(const uci::Engine& e) {
  const auto& c = e.config();
  nlohmann::json opts = nlohmann::json::object();
  for (const auto& [k, v] : c.options) opts[k] = v;
  return {{"name", c.name},
          {"role", uci::to_string(c.role)},
          {"limit", c.limit.go_command().substr(3)},
          {"options", opts}};
}

class SoloSide final : public Side {
 public:
  explicit SoloSide(uci::Engine& e) : e_(e) {}
  TeamMove play(const chess::Position& p, std::span<const chess::Position>, std::uint64_t seed, int) override {
    return {e_.best_move(p, derive_seed(seed, 0)), std::nullopt};
  }
  std::string label() const override { return e_.config().name; }
  nlohmann::json describe() const override { return {{"solo", describe_engine(e_)}}; }

 private:
  uci::Engine& e_;
};

class TeamSide final : public Side {
 public:
  TeamSide(uci::Engine& m, uci::Engine& l, Manager& mgr) : m_(m), l_(l), mgr_(mgr) {}
  TeamMove play(const chess::Position& p, std::span<const chess::Position> history, std::uint64_t seed,
                int game_plies) override {
    return team_move(p, history, m_, l_, mgr_, seed, game_plies);
  }
  std::string label() const override { return m_.config().name + "+" + l_.config().name + " [" + mgr_.id() + "]"; }
  nlohmann::json describe() const override {
    return {{"M", describe_engine(m_)}, {"L", describe_engine(l_)}, {"manager", mgr_.id()}};
  }

 private:
  uci::Engine& m_;
  uci::Engine& l_;
  Manager& mgr_;
};

struct Playout {
  std::vector<chess::Move> moves;
  std::vector<DecisionRecord> decisions;
  chess::GameOutcome outcome{chess::Result::Draw, chess::Termination::Adjudicated};
  chess::Position final_position;
};

/// Plays from `start` (with earlier positions `history`) to the end. The
/// move at local ply i uses seed derive_seed(seed, i). `plies_before` counts
/// plies already played since the opening, for the adjudication cap.
inline Playout play_out(const chess::Position& start, std::vector<chess::Position> history, Side& team,
                        uci::Engine& adversary, chess::Color team_color, std::uint64_t seed,
                        const PlayOptions& opt = {}, int plies_before = 0) {
  Playout out;
  chess::Position p = start;
  for (int i = 0;; ++i) {
    if (auto end = chess::game_result(p, history)) {
      out.outcome = end->for_side(team_color);
      break;
    }
    if (plies_before + i >= opt.max_plies) {
      out.outcome = {chess::Result::Draw, chess::Termination::Adjudicated};
      break;
    }
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
    chess::Move m;
    if (p.side_to_move() == team_color) {
      TeamMove tm = team.play(p, history, s, plies_before + i);
      m = tm.move;
      if (tm.decision) out.decisions.push_back(std::move(*tm.decision));
    } else {
      m = adversary.best_move(p, s);
    }
    history.push_back(p);
    p = chess::apply_move(p, m);
    out.moves.push_back(m);
  }
  out.final_position = p;
  return out;
}

/// A full game from an opening. Engine failures abort the game instead of
/// propagating; the record says why.
inline GameRecord play_game(const chess::Position& opening, Side& team, uci::Engine& adversary,
                            chess::Color team_color, std::uint64_t seed, const PlayOptions& opt = {},
                            std::string game_id = "game-0", std::string opening_id = "") {
  GameRecord g;
  g.game_id = std::move(game_id);
  g.opening_id = std::move(opening_id);
  g.opening_fen = opening.fen();
  g.team_color = team_color;
  g.seed = seed;
  g.team_label = team.label();
  g.adversary_label = adversary.config().name;
  g.engines = team.describe();
  g.engines["adversary"] = describe_engine(adversary);
  try {
    Playout po = play_out(opening, {}, team, adversary, team_color, seed, opt, 0);
    g.moves = std::move(po.moves);
    g.decisions = std::move(po.decisions);
    g.outcome = po.outcome;
  } catch (const uci::EngineError& e) {
    g.aborted = true;
    g.abort_reason = e.what();
  }
  for (auto& d : g.decisions) d.game_id = g.game_id;
  return g;
}

/// Replays a record's moves from its opening and recomputes the outcome;
/// throws if a move is illegal or the recorded outcome disagrees.
inline chess::GameOutcome replay(const GameRecord& g, const PlayOptions& opt = {}) {
  chess::Position p = chess::Position::from_fen(g.opening_fen);
  std::vector<chess::Position> history;
  for (const auto& m : g.moves) {
    if (chess::game_result(p, history)) throw PreconditionError(g.game_id + ": move after game end");
    history.push_back(p);
    p = chess::apply_move(p, m);
  }
  chess::GameOutcome o{chess::Result::Draw, chess::Termination::Adjudicated};
  if (auto end = chess::game_result(p, history)) o = end->for_side(g.team_color);
  else if (static_cast<int>(g.moves.size()) < opt.max_plies)
    throw PreconditionError(g.game_id + ": game ends without a terminal position");
  if (!g.aborted && !(o == g.outcome)) throw PreconditionError(g.game_id + ": recorded outcome does not replay");
  return o;
}

}  // namespace centaur::team
