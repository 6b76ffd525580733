#pragma once

#include "centaur/team/game.hpp"
#include "centaur/util/hash.hpp"

namespace centaur::team {

struct OracleBranch {
  double reward = 0.0;  // mean over trajectories, team perspective
  std::vector<Playout> trajectories;
};

/// Reward of playing `rec` now and continuing with `superior` alone against
/// `adversary`, who replies first. Trajectory seeds depend on the move, not
/// on its branch slot, so swapping the inputs swaps the result exactly.
inline OracleBranch simulate_branch(const chess::Position& p, std::span<const chess::Position> history,
                                    const chess::Move& rec, uci::Engine& superior, uci::Engine& adversary,
                                    std::uint64_t seed, int rollouts, const PlayOptions& opt, int game_plies,
                                    bool keep_trajectories = false) {
  if (rollouts < 1) throw PreconditionError("oracle: rollouts must be >= 1");
  const chess::Position next = chess::apply_move(p, rec);
  std::vector<chess::Position> hist(history.begin(), history.end());
  hist.push_back(p);
  SoloSide side(superior);
  OracleBranch b;
  double total = 0.0;
  const std::uint64_t base = seed ^ fnv1a(rec.uci());
  for (int k = 0; k < rollouts; ++k) {
    Playout po = play_out(next, hist, side, adversary, p.side_to_move(), derive_seed(base, k), opt, game_plies + 1);
    total += po.outcome.reward();
    if (keep_trajectories) b.trajectories.push_back(std::move(po));
  }
  b.reward = total / rollouts;
  return b;
}

/// Approximate oracle: the recommendation whose simulated continuation
/// scores higher wins; equal rewards are Indifferent.
inline Choice oracle_decide(const chess::Position& p, std::span<const chess::Position> history,
                            const chess::Move& rec_m, const chess::Move& rec_l, uci::Engine& superior,
                            uci::Engine& adversary, std::uint64_t seed, int rollouts = 1,
                            const PlayOptions& opt = {}, int game_plies = 0) {
  const double qm = simulate_branch(p, history, rec_m, superior, adversary, seed, rollouts, opt, game_plies).reward;
  const double ql = simulate_branch(p, history, rec_l, superior, adversary, seed, rollouts, opt, game_plies).reward;
  if (qm > ql) return Choice::First;
  if (ql > qm) return Choice::Second;
  return Choice::Indifferent;
}

class OracleManager final : public Manager {
 public:
  OracleManager(uci::Engine& superior, uci::Engine& adversary, Member superior_tag, int rollouts = 1,
                PlayOptions opt = {})
      : superior_(superior), adversary_(adversary), tag_(superior_tag), rollouts_(rollouts), opt_(opt) {
    ManagerSpec::oracle(superior_tag, rollouts);
  }
  Choice decide(const DecisionContext& ctx) override {
    return oracle_decide(ctx.position, ctx.history, ctx.rec_m, ctx.rec_l, superior_, adversary_, ctx.rng(),
                         rollouts_, opt_, ctx.game_plies);
  }
  std::string id() const override { return ManagerSpec::oracle(tag_, rollouts_).id(); }
  InputMode input_mode() const override { return InputMode::StateAndMoves; }

 private:
  uci::Engine& superior_;
  uci::Engine& adversary_;
  Member tag_;
  int rollouts_;
  PlayOptions opt_;
};

}  // namespace centaur::team
