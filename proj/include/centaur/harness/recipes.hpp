#pragma once

#include <vector>

#include "centaur/harness/config.hpp"

namespace centaur::harness {

struct Recipe {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

namespace detail {

// Engine binaries and network files are placeholders resolved through
// $CENTAUR_ENGINE_DIR; edit them to match the local installation.
inline EngineSpec lc0(std::string name, const std::string& weights, uci::EngineRole role) {
  EngineSpec s;
  s.config.name = std::move(name);
  s.config.executable = "lc0";
  s.config.args = {"--weights=" + weights};
  s.config.limit = uci::SearchLimit::nodes(1);  // policy head only, no search
  s.config.role = role;
  return s;
}

inline EngineSpec stockfish(std::string version, long depth, uci::EngineRole role) {
  EngineSpec s;
  s.config.name = "stockfish" + version + "-d" + std::to_string(depth);
  s.config.executable = "stockfish" + version;
  s.config.limit = uci::SearchLimit::depth(depth);
  s.config.options = {{"Threads", "1"}, {"Hash", "16"}};
  s.config.role = role;
  return s;
}

struct Team {
  std::string tag;      // "symmetric", "asym1", ...
  std::string leela;    // network file
  EngineSpec adversary;
  team::Member superior;
};

inline std::vector<Team> teams() {
  return {{"symmetric", "leela-symmetric.pb.gz", stockfish("11", 1, uci::EngineRole::Adversary), team::Member::M},
          {"asym1", "leela-asym1.pb.gz", stockfish("14", 4, uci::EngineRole::Adversary), team::Member::L},
          {"asym2", "leela-asym2.pb.gz", stockfish("14", 7, uci::EngineRole::Adversary), team::Member::L},
          {"asym3", "leela-asym3.pb.gz", stockfish("14", 10, uci::EngineRole::Adversary), team::Member::L}};
}

/// 500 held-out openings, each played with the team as White and as Black.
inline ExperimentConfig base(const Team& t, std::string name) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.m = lc0("maia1900", "maia-1900.pb.gz", uci::EngineRole::TeamMemberM);
  c.l = lc0("leela-" + t.tag, t.leela, uci::EngineRole::TeamMemberL);
  c.adversary = t.adversary;
  c.third_party = stockfish("14", 5, uci::EngineRole::ThirdParty);
  c.openings.path = "openings/train.epd";
  c.openings.test_path = "openings/test.epd";
  c.openings.use = OpeningsConfig::Use::Test;
  c.openings.count = 500;
  c.both_colors = true;
  return c;
}

}  // namespace detail

/// Named, complete experiment configurations.
inline std::vector<Recipe> experiment_recipes() {
  using team::ManagerSpec;
  std::vector<Recipe> out;
  for (const auto& t : detail::teams()) {
    const bool sym = t.tag == "symmetric";
    auto add = [&](std::string name, std::string what, ExperimentConfig c) {
      c.name = name;
      out.push_back({std::move(name), std::move(what), std::move(c)});
    };

    ExperimentConfig random = detail::base(t, "");
    random.manager = ManagerSpec::random(0.5);
    if (sym) add("symmetric-random", "symmetric team, Random(0.5) manager", random);

    const std::vector<long> depths = sym ? std::vector<long>{1, 3, 5, 15} : std::vector<long>{15};
    for (long d : depths) {
      ExperimentConfig c = detail::base(t, "");
      c.expert = detail::stockfish("14", d, uci::EngineRole::Expert);
      c.manager = ManagerSpec::expert(c.expert->config.name);
      add(sym ? "symmetric-expert-d" + std::to_string(d) : t.tag + "-expert",
          t.tag + " team, expert manager scoring with depth " + std::to_string(d), c);
    }

    ExperimentConfig rl = detail::base(t, "");
    rl.manager = ManagerSpec::model_at("models/" + t.tag + "-rl.ckpt");
    rl::PolicyIterationConfig pi;
    pi.iterations = 5;
    pi.games_per_iteration = 200;
    pi.out_dir = "models/" + t.tag + "-rl";
    rl.policy_iteration = pi;
    add(t.tag + "-rl", t.tag + " team, transformer manager trained by policy iteration", rl);

    ExperimentConfig oracle = detail::base(t, "");
    oracle.manager = ManagerSpec::oracle(t.superior, 1);
    add(t.tag + "-oracle", t.tag + " team, oracle with the solo-stronger member as simulator", oracle);

    for (auto who : {team::Member::M, team::Member::L}) {
      ExperimentConfig solo = detail::base(t, "");
      solo.solo = who;
      solo.manager = ManagerSpec::fixed(who);
      add("solo-" + std::string(who == team::Member::M ? "m" : "l") + "-" + t.tag,
          t.tag + " adversary against " + std::string(who == team::Member::M ? "Maia" : "Leela") + " alone", solo);
    }
  }
  ExperimentConfig eval = detail::base(detail::teams().front(), "eval-1000");
  eval.manager = ManagerSpec::random(0.5);
  out.push_back({"eval-1000", "evaluation protocol: 500 held-out openings, both colours (1000 games)", eval});
  return out;
}

inline const Recipe& recipe(std::string_view name) {
  static const std::vector<Recipe> all = experiment_recipes();
  for (const auto& r : all)
    if (r.name == name) return r;
  throw PreconditionError("unknown recipe '" + std::string(name) + "'");
}

}  // namespace centaur::harness
