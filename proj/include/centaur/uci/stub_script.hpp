#pragma once

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "centaur/chess/features.hpp"
#include "centaur/chess/notation.hpp"
#include "centaur/chess/outcome.hpp"
#include "centaur/uci/engine.hpp"
#include "centaur/util/hash.hpp"
#include "centaur/util/random.hpp"
#include "json.hpp"

namespace centaur::uci {

/// First four FEN fields: the lookup key for scripted replies.
inline std::string fen_key(const chess::Position& p) {
  const std::string f = p.fen();
  std::size_t cut = f.size();
  int spaces = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] == ' ' && ++spaces == 4) {
      cut = i;
      break;
    }
  return f.substr(0, cut);
}

/// Deterministic, scriptable move policy used by test and demo engines.
///
/// JSON schema (all keys optional):
///   name           display name reported in "id name"
///   moves          { "<fen4>": "e2e4" | ["e2e4", "d2d4"] }  first legal entry wins
///   raw_moves      { "<fen4>": "e2e5" }  replied verbatim, legal or not
///   policy         rule chain tried after the table: "mate", "stalemate",
///                  "check", "capture", "best", "worst", "first", "last", "random"
///   scores         { "<fen4>" | "*": { "<uci>": 30 | "mate 2" } }
///   score_policy   "material" (default) or "zero"; used when no table score
///   options        option names advertised in the uci reply (e.g. "Seed")
///   crash_on       fen4 at which the engine exits without replying
///   hang_on        fen4 at which the engine never replies
struct StubScript {
  std::string name = "stub";
  std::map<std::string, std::vector<std::string>> moves;
  std::map<std::string, std::string> raw_moves;
  std::vector<std::string> policy = {"first"};
  std::map<std::string, std::map<std::string, Score>> scores;
  std::string score_policy = "material";
  std::vector<std::string> options;
  std::string crash_on;
  std::string hang_on;

  static Score parse_score(const nlohmann::json& j) {
    if (j.is_number_integer()) return Score::cp(j.get<int>());
    const std::string s = j.get<std::string>();
    if (s.rfind("mate ", 0) == 0) return Score::mate(std::stoi(s.substr(5)));
    if (s.rfind("cp ", 0) == 0) return Score::cp(std::stoi(s.substr(3)));
    throw ParseError("stub script: bad score '" + s + "'");
  }

  static StubScript from_json(const nlohmann::json& j) {
    StubScript s;
    s.name = j.value("name", s.name);
    if (j.contains("moves")) {
      for (auto& [k, v] : j["moves"].items()) {
        if (v.is_string()) s.moves[k] = {v.get<std::string>()};
        else s.moves[k] = v.get<std::vector<std::string>>();
      }
    }
    s.raw_moves = j.value("raw_moves", s.raw_moves);
    if (j.contains("policy")) {
      s.policy = j["policy"].is_string() ? std::vector<std::string>{j["policy"].get<std::string>()}
                                         : j["policy"].get<std::vector<std::string>>();
    }
    if (j.contains("scores")) {
      for (auto& [k, table] : j["scores"].items())
        for (auto& [mv, sc] : table.items()) s.scores[k][mv] = parse_score(sc);
    }
    s.score_policy = j.value("score_policy", s.score_policy);
    s.options = j.value("options", s.options);
    s.crash_on = j.value("crash_on", s.crash_on);
    s.hang_on = j.value("hang_on", s.hang_on);
    return s;
  }

  static StubScript load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read stub script " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("stub script " + path + ": " + e.what());
    }
  }

  Score score(const chess::Position& p, const chess::Move& m) const {
    for (const std::string& key : {fen_key(p), std::string("*")}) {
      if (auto it = scores.find(key); it != scores.end())
        if (auto s = it->second.find(m.uci()); s != it->second.end()) return s->second;
    }
    const chess::Position n = chess::apply_move(p, m);
    if (auto end = chess::game_result(n, {}); end && end->termination == chess::Termination::Checkmate)
      return Score::mate(1);
    if (score_policy == "zero") return Score::cp(0);
    const chess::Color us = p.side_to_move();
    int balance = 0;
    for (chess::Piece pc : n.board().squares())
      if (pc) balance += (pc.color() == us ? 1 : -1) * chess::material_value(pc.kind());
    return Score::cp(100 * balance);
  }

  chess::Move choose(const chess::Position& p, std::uint64_t seed) const {
    auto legal = chess::legal_moves(p);
    if (legal.empty()) throw PreconditionError("stub: no legal moves in " + p.fen());
    std::sort(legal.begin(), legal.end(), [](const chess::Move& a, const chess::Move& b) { return a.uci() < b.uci(); });

    if (auto it = moves.find(fen_key(p)); it != moves.end()) {
      for (const std::string& want : it->second)
        for (const chess::Move& m : legal)
          if (m.uci() == want) return m;
    }
    auto terminal_after = [&](const chess::Move& m, chess::Termination t) {
      auto end = chess::game_result(chess::apply_move(p, m), {});
      return end && end->termination == t;
    };
    for (const std::string& rule : policy) {
      if (rule == "first") return legal.front();
      if (rule == "last") return legal.back();
      if (rule == "random") {
        Rng rng(mix_seed(fnv1a(fen_key(p)) ^ seed));
        return legal[uniform_index(rng, legal.size())];
      }
      if (rule == "best" || rule == "worst") {
        auto cmp = [&](const chess::Move& a, const chess::Move& b) { return score(p, a) < score(p, b); };
        // Ties resolve to the first move in UCI order.
        if (rule == "best") {
          const chess::Move* pick = &legal.front();
          for (const auto& m : legal)
            if (cmp(*pick, m)) pick = &m;
          return *pick;
        }
        const chess::Move* pick = &legal.front();
        for (const auto& m : legal)
          if (cmp(m, *pick)) pick = &m;
        return *pick;
      }
      for (const chess::Move& m : legal) {
        if (rule == "mate" && terminal_after(m, chess::Termination::Checkmate)) return m;
        if (rule == "stalemate" && terminal_after(m, chess::Termination::Stalemate)) return m;
        if (rule == "check" && m.flags.check) return m;
        if (rule == "capture" && m.flags.capture) return m;
      }
    }
    return legal.front();
  }
};

/// In-process engine driven by a StubScript; no subprocess. Counts calls so
/// tests can verify which engines were consulted.
class ScriptedEngine final : public Engine {
 public:
  ScriptedEngine(EngineConfig cfg, StubScript script) : cfg_(std::move(cfg)), script_(std::move(script)) {}

  const EngineConfig& config() const override { return cfg_; }
  const StubScript& script() const noexcept { return script_; }

  long best_move_calls() const noexcept { return best_calls_; }
  long score_calls() const noexcept { return score_calls_; }
  void shutdown() override { closed_ = true; }

 protected:
  chess::Move search_best(const chess::Position& p, std::optional<std::uint64_t> seed) override {
    check(p);
    ++best_calls_;
    if (auto raw = script_.raw_moves.find(fen_key(p)); raw != script_.raw_moves.end()) {
      const auto& t = raw->second;
      return chess::Move{*chess::Square::parse(t.substr(0, 2)), *chess::Square::parse(t.substr(2, 2)),
                         t.size() > 4 ? chess::kind_from_letter(t[4]) : std::nullopt, {}};
    }
    return script_.choose(p, seed.value_or(0));
  }
  Score search_score(const chess::Position& p, const chess::Move& m) override {
    check(p);
    ++score_calls_;
    return script_.score(p, m);
  }

 private:
  void check(const chess::Position& p) const {
    if (closed_) throw EngineError("engine '" + cfg_.name + "' used after shutdown");
    const std::string key = fen_key(p);
    if (key == script_.crash_on || key == script_.hang_on)
      throw EngineError("engine '" + cfg_.name + "' crashed (scripted)");
  }

  EngineConfig cfg_;
  StubScript script_;
  std::atomic<long> best_calls_{0};
  std::atomic<long> score_calls_{0};
  bool closed_ = false;
};

}  // namespace centaur::uci
