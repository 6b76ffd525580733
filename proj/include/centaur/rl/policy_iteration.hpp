#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "centaur/rl/manager.hpp"
#include "centaur/rl/train.hpp"
#include "centaur/team/game.hpp"

namespace centaur::rl {

struct RolloutResult {
  double mean = 0.0;
  std::vector<double> rewards;
  std::vector<std::uint64_t> seeds;
  int failures = 0;
};

/// Empirical value of playing `rec` in `p` for the side to move: apply it,
/// then finish the game with `team` against `adversary`, K times. A rollout
/// that hits an engine failure is discarded and redrawn with a fresh seed,
/// at most `max_retries` times in total.
inline RolloutResult rollout_label(const chess::Position& p, std::span<const chess::Position> history,
                                   const chess::Move& rec, team::Side& team, uci::Engine& adversary, int K,
                                   std::uint64_t seed, const team::PlayOptions& opt = {}, int game_plies = 0,
                                   int max_retries = 3) {
  if (K < 1) throw PreconditionError("rollout_label: K must be >= 1");
  if (!chess::is_legal(p, rec)) throw PreconditionError("rollout_label: illegal move " + rec.uci() + " in " + p.fen());
  const chess::Position next = chess::apply_move(p, rec);
  std::vector<chess::Position> hist(history.begin(), history.end());
  hist.push_back(p);
  RolloutResult r;
  std::uint64_t draw = 0;
  double total = 0;
  while (static_cast<int>(r.rewards.size()) < K) {
    const std::uint64_t s = derive_seed(seed, draw++);
    try {
      const auto po = team::play_out(next, hist, team, adversary, p.side_to_move(), s, opt, game_plies + 1);
      r.rewards.push_back(po.outcome.reward());
      r.seeds.push_back(s);
      total += po.outcome.reward();
    } catch (const uci::EngineError&) {
      if (++r.failures > max_retries) throw;
    }
  }
  r.mean = total / K;
  return r;
}

struct PolicyIterationConfig {
  enum class TeamColor { Alternate, SideToMove };

  int iterations = 1;             // N
  int games_per_iteration = 100;  // G
  int rollouts = 1;               // K
  TrainOptions train;
  ManagerModel::Hyper model;
  bool cumulative = true;
  bool with_replacement = false;
  TeamColor team_color = TeamColor::Alternate;
  double tau = 0.0;
  std::uint64_t seed = 0;
  team::PlayOptions play;
  std::string out_dir;  // artifacts written here when non-empty

  void validate() const {
    if (iterations < 0 || games_per_iteration < 1 || rollouts < 1)
      throw PreconditionError("policy iteration: N >= 0, G >= 1 and K >= 1 required");
    train.validate();
    model.validate();
  }

  nlohmann::json to_json() const {
    return {{"iterations", iterations},
            {"games_per_iteration", games_per_iteration},
            {"rollouts", rollouts},
            {"train", train.to_json()},
            {"model", model.to_json()},
            {"cumulative", cumulative},
            {"with_replacement", with_replacement},
            {"team_color", team_color == TeamColor::Alternate ? "alternate" : "side-to-move"},
            {"tau", tau},
            {"seed", seed},
            {"max_plies", play.max_plies},
            {"out_dir", out_dir}};
  }

  static PolicyIterationConfig from_json(const nlohmann::json& j) {
    PolicyIterationConfig c;
    c.iterations = j.value("iterations", c.iterations);
    c.games_per_iteration = j.value("games_per_iteration", c.games_per_iteration);
    c.rollouts = j.value("rollouts", c.rollouts);
    if (j.contains("train")) c.train = TrainOptions::from_json(j["train"]);
    if (j.contains("model")) c.model = ManagerModel::Hyper::from_json(j["model"]);
    c.cumulative = j.value("cumulative", c.cumulative);
    c.with_replacement = j.value("with_replacement", c.with_replacement);
    const std::string tc = j.value("team_color", std::string("alternate"));
    if (tc == "alternate") c.team_color = TeamColor::Alternate;
    else if (tc == "side-to-move") c.team_color = TeamColor::SideToMove;
    else throw ParseError("team_color must be 'alternate' or 'side-to-move'");
    c.tau = j.value("tau", c.tau);
    c.seed = j.value("seed", c.seed);
    c.play.max_plies = j.value("max_plies", c.play.max_plies);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.validate();
    return c;
  }
};

struct IterationMetrics {
  int iteration = 0;
  std::string manager;  // the manager that played this iteration's games
  std::size_t games = 0;
  std::size_t aborted = 0;
  std::size_t disagreements = 0;
  std::size_t labeled = 0;  // rows with qM != qL
  std::size_t ties = 0;
  std::size_t training_rows = 0;
  bool skipped = false;  // no labeled rows: previous model carried forward
  TrainReport train;

  nlohmann::json to_json() const {
    return {{"iteration", iteration},     {"manager", manager}, {"games", games},
            {"aborted", aborted},         {"disagreements", disagreements}, {"labeled", labeled},
            {"ties", ties},               {"training_rows", training_rows}, {"skipped", skipped},
            {"best_epoch", train.best_epoch}};
  }
};

struct PolicyIterationResult {
  /// managers[0] is the Random(0.5) baseline; managers[i] for i > 0 is the
  /// model trained after iteration i - 1 (nullptr for the baseline).
  std::vector<std::shared_ptr<const ManagerModel>> models;
  std::vector<std::vector<LabeledDecision>> datasets;
  std::vector<IterationMetrics> metrics;
};

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream o(p, std::ios::binary | std::ios::trunc);
  if (!o) throw Error("cannot write " + p.string());
  o << s;
}

/// Openings for one iteration: a fresh permutation per pass through the
/// set, or independent draws when sampling with replacement.
inline std::vector<std::size_t> pick_openings(std::size_t n, std::size_t games, bool with_replacement, Rng& rng) {
  std::vector<std::size_t> out;
  if (with_replacement) {
    for (std::size_t g = 0; g < games; ++g) out.push_back(uniform_index(rng, n));
    return out;
  }
  std::vector<std::size_t> perm(n);
  while (out.size() < games) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    shuffle_in_place(perm, rng);
    for (std::size_t i = 0; i < n && out.size() < games; ++i) out.push_back(perm[i]);
  }
  return out;
}

}  // namespace detail

/// Policy iteration for the board-only manager. Iteration i plays G games
/// with the current manager (Random(0.5) first), labels every disagreement
/// by rolling out both recommendations under that same manager, and trains
/// the next model on the labeled rows (all iterations so far, or only this
/// one).
inline PolicyIterationResult policy_iteration(const PolicyIterationConfig& cfg, uci::Engine& m, uci::Engine& l,
                                              uci::Engine& adversary, std::span<const chess::Position> openings,
                                              std::ostream* log = nullptr) {
  cfg.validate();
  if (openings.empty()) throw PreconditionError("policy iteration: no openings");
  namespace fs = std::filesystem;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    detail::write_text(fs::path(cfg.out_dir) / "config.json", cfg.to_json().dump(2) + "\n");
  }

  PolicyIterationResult res;
  res.models.push_back(nullptr);
  std::vector<LabeledDecision> pool;

  for (int it = 0; it < cfg.iterations; ++it) {
    std::unique_ptr<team::Manager> mgr;
    if (res.models.back()) mgr = std::make_unique<ModelManager>(res.models.back(), cfg.tau, "model:iter" + std::to_string(it));
    else mgr = std::make_unique<team::RandomManager>(0.5);
    team::TeamSide side(m, l, *mgr);

    IterationMetrics met;
    met.iteration = it;
    met.manager = mgr->id();
    const std::uint64_t it_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(it));
    Rng pick_rng(derive_seed(it_seed, 1));
    const auto picks = detail::pick_openings(openings.size(), static_cast<std::size_t>(cfg.games_per_iteration),
                                             cfg.with_replacement, pick_rng);

    std::vector<LabeledDecision> rows;
    std::string decisions_log;
    for (std::size_t g = 0; g < picks.size(); ++g) {
      const chess::Position& opening = openings[picks[g]];
      const chess::Color color = cfg.team_color == PolicyIterationConfig::TeamColor::SideToMove
                                     ? opening.side_to_move()
                                     : (g % 2 == 0 ? chess::Color::White : chess::Color::Black);
      const std::uint64_t game_seed = derive_seed(it_seed, 1000 + g);
      const team::GameRecord rec = team::play_game(opening, side, adversary, color, game_seed, cfg.play,
                                                   "iter" + std::to_string(it) + "-game" + std::to_string(g));
      ++met.games;
      if (rec.aborted) {
        ++met.aborted;
        continue;
      }
      met.disagreements += rec.decisions.size();

      // Walk the game to recover each decision's history.
      chess::Position p = opening;
      std::vector<chess::Position> hist;
      std::size_t next = 0;
      for (std::size_t ply = 0; ply < rec.moves.size() && next < rec.decisions.size(); ++ply) {
        const team::DecisionRecord& d = rec.decisions[next];
        if (p.side_to_move() == color && d.fen == p.fen()) {
          LabeledDecision row;
          row.fen = d.fen;
          row.tokens = chess::tokenize(p);
          row.rec_m = d.rec_m;
          row.rec_l = d.rec_l;
          row.iteration = it;
          const std::uint64_t ds = derive_seed(game_seed, 0xd0000 + next);
          try {
            const auto qm = rollout_label(p, hist, d.rec_m, side, adversary, cfg.rollouts, derive_seed(ds, 0),
                                          cfg.play, static_cast<int>(ply));
            const auto ql = rollout_label(p, hist, d.rec_l, side, adversary, cfg.rollouts, derive_seed(ds, 1),
                                          cfg.play, static_cast<int>(ply));
            row.q_m = qm.mean;
            row.q_l = ql.mean;
            row.seeds_m = qm.seeds;
            row.seeds_l = ql.seeds;
            if (row.label()) ++met.labeled;
            else ++met.ties;
            rows.push_back(std::move(row));
          } catch (const uci::EngineError& e) {
            if (log) *log << "iteration " << it << ": dropped decision at " << d.fen << ": " << e.what() << "\n";
          }
          decisions_log += d.to_json().dump() + "\n";
          ++next;
        }
        hist.push_back(p);
        p = chess::apply_move(p, rec.moves[ply]);
      }
    }

    if (!cfg.cumulative) pool.clear();
    pool.insert(pool.end(), rows.begin(), rows.end());
    std::size_t trainable = 0;
    for (const auto& r : pool)
      if (r.label()) ++trainable;
    met.training_rows = trainable;

    std::shared_ptr<const ManagerModel> next_model = res.models.back();
    if (trainable == 0) {
      met.skipped = true;
      if (log) *log << "iteration " << it << ": no labeled rows, carrying the current manager forward\n";
    } else {
      ManagerModel::Hyper h = cfg.model;
      h.seed = derive_seed(it_seed, 2);
      auto model = std::make_shared<ManagerModel>(h);
      TrainOptions topt = cfg.train;
      topt.seed = derive_seed(it_seed, 3);
      met.train = train_supervised(*model, std::span<const LabeledDecision>(pool), topt);
      next_model = model;
    }

    if (!cfg.out_dir.empty()) {
      const fs::path dir = fs::path(cfg.out_dir) / ("iter" + std::to_string(it));
      fs::create_directories(dir);
      std::string ds;
      for (const auto& r : rows) ds += r.to_json().dump() + "\n";
      detail::write_text(dir / "dataset.jsonl", ds);
      detail::write_text(dir / "decisions.jsonl", decisions_log);
      detail::write_text(dir / "metrics.json", met.to_json().dump(2) + "\n");
      if (!met.skipped) {
        detail::write_text(dir / "loss.csv", met.train.csv());
        next_model->save((dir / "model.ckpt").string());
      }
    }
    if (log)
      *log << "iteration " << it << ": " << met.games << " games, " << met.disagreements << " disagreements, "
           << met.labeled << " labeled, " << met.ties << " ties\n";

    res.datasets.push_back(std::move(rows));
    res.metrics.push_back(std::move(met));
    res.models.push_back(next_model);
  }
  return res;
}

}  // namespace centaur::rl
