#pragma once

#include <functional>
#include <span>

#include "centaur/team/types.hpp"
#include "centaur/uci/engine.hpp"
#include "centaur/util/random.hpp"

namespace centaur::team {

/// Everything a manager may look at when the members disagree.
/// StateOnly managers must ignore rec_m and rec_l.
struct DecisionContext {
  const chess::Position& position;
  std::span<const chess::Position> history;  // earlier positions of this game, oldest first
  const chess::Move& rec_m;
  const chess::Move& rec_l;
  int game_plies;  // plies played since the opening
  Rng& rng;
};

class Manager {
 public:
  virtual ~Manager() = default;
  virtual Choice decide(const DecisionContext& ctx) = 0;
  virtual std::string id() const = 0;
  virtual InputMode input_mode() const = 0;
};

class RandomManager final : public Manager {
 public:
  explicit RandomManager(double p = 0.5) : p_(p) { ManagerSpec::random(p); }
  Choice decide(const DecisionContext& ctx) override {
    return bernoulli(ctx.rng, p_) ? Choice::First : Choice::Second;
  }
  std::string id() const override { return ManagerSpec::random(p_).id(); }
  InputMode input_mode() const override { return InputMode::StateOnly; }

 private:
  double p_;
};

class FixedManager final : public Manager {
 public:
  explicit FixedManager(Member m) : m_(m) {}
  Choice decide(const DecisionContext&) override { return choose(m_); }
  std::string id() const override { return ManagerSpec::fixed(m_).id(); }
  InputMode input_mode() const override { return InputMode::StateOnly; }

 private:
  Member m_;
};

/// Scores both recommendations with one engine; the strictly better score
/// wins, an exact tie is Indifferent. Mate scores outrank centipawns.
inline Choice expert_decide(uci::Engine& sme, const chess::Position& p, const chess::Move& rec_m,
                            const chess::Move& rec_l) {
  const chess::Move both[2] = {rec_m, rec_l};
  const auto scores = sme.score_moves(p, both);
  if (scores[0].score > scores[1].score) return Choice::First;
  if (scores[1].score > scores[0].score) return Choice::Second;
  return Choice::Indifferent;
}

class ExpertManager final : public Manager {
 public:
  explicit ExpertManager(uci::Engine& sme) : sme_(sme) {}
  Choice decide(const DecisionContext& ctx) override {
    return expert_decide(sme_, ctx.position, ctx.rec_m, ctx.rec_l);
  }
  std::string id() const override { return "expert:" + sme_.config().name; }
  InputMode input_mode() const override { return InputMode::StateAndMoves; }

 private:
  uci::Engine& sme_;
};

/// Delegates to a callback; used for interactive (human) managers.
class CallbackManager final : public Manager {
 public:
  using Fn = std::function<Choice(const DecisionContext&)>;
  CallbackManager(std::string id, Fn fn, InputMode mode = InputMode::StateAndMoves)
      : id_(std::move(id)), fn_(std::move(fn)), mode_(mode) {}
  Choice decide(const DecisionContext& ctx) override { return fn_(ctx); }
  std::string id() const override { return id_; }
  InputMode input_mode() const override { return mode_; }

 private:
  std::string id_;
  Fn fn_;
  InputMode mode_;
};

}  // namespace centaur::team
