#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "centaur/chess/notation.hpp"
#include "centaur/chess/outcome.hpp"
#include "centaur/error.hpp"
#include "json.hpp"

namespace centaur::team {

enum class Member { M, L };

inline Member other(Member m) noexcept { return m == Member::M ? Member::L : Member::M; }

inline std::string_view to_string(Member m) { return m == Member::M ? "M" : "L"; }

inline Member member_from_string(std::string_view s) {
  if (s == "M" || s == "m") return Member::M;
  if (s == "L" || s == "l") return Member::L;
  throw ParseError("unknown team member '" + std::string(s) + "' (expected M or L)");
}

/// First selects member M's recommendation, Second member L's.
enum class Choice { First, Second, Indifferent };

inline std::string_view to_string(Choice c) {
  switch (c) {
    case Choice::First: return "First";
    case Choice::Second: return "Second";
    case Choice::Indifferent: return "Indifferent";
  }
  return "?";
}

inline Choice choice_from_string(std::string_view s) {
  if (s == "First") return Choice::First;
  if (s == "Second") return Choice::Second;
  if (s == "Indifferent") return Choice::Indifferent;
  throw ParseError("unknown choice '" + std::string(s) + "'");
}

inline Choice choose(Member m) noexcept { return m == Member::M ? Choice::First : Choice::Second; }

/// Swaps First and Second; Indifferent is its own mirror.
inline Choice swapped(Choice c) noexcept {
  if (c == Choice::First) return Choice::Second;
  if (c == Choice::Second) return Choice::First;
  return c;
}

struct Recommendation {
  Member member;
  chess::Move move;
};

enum class InputMode { StateOnly, StateAndMoves };

/// Declarative description of a manager. Engine and model references are
/// names resolved by whoever builds the concrete Manager.
struct ManagerSpec {
  enum class Kind { Random, Fixed, Expert, Oracle, Model, FeatureModel, Human };

  Kind kind = Kind::Random;
  double p = 0.5;                  // Random: probability of First
  Member member = Member::M;       // Fixed: the member always chosen; Oracle: the superior member
  std::string engine = "expert";   // Expert: engine reference
  int rollouts = 1;                // Oracle: trajectories per branch
  std::string model;               // Model / FeatureModel: checkpoint path
  double tau = 0.0;                // Model / FeatureModel: indifference threshold
  std::string session;             // Human: display name

  static ManagerSpec random(double p = 0.5) {
    ManagerSpec s;
    s.kind = Kind::Random;
    s.p = p;
    s.validate();
    return s;
  }
  static ManagerSpec fixed(Member m) {
    ManagerSpec s;
    s.kind = Kind::Fixed;
    s.member = m;
    return s;
  }
  static ManagerSpec expert(std::string engine_ref = "expert") {
    ManagerSpec s;
    s.kind = Kind::Expert;
    s.engine = std::move(engine_ref);
    return s;
  }
  static ManagerSpec oracle(Member superior, int rollouts = 1) {
    ManagerSpec s;
    s.kind = Kind::Oracle;
    s.member = superior;
    s.rollouts = rollouts;
    s.validate();
    return s;
  }
  static ManagerSpec model_at(std::string path, double tau = 0.0) {
    ManagerSpec s;
    s.kind = Kind::Model;
    s.model = std::move(path);
    s.tau = tau;
    return s;
  }
  static ManagerSpec feature_model_at(std::string path, double tau = 0.0) {
    ManagerSpec s = model_at(std::move(path), tau);
    s.kind = Kind::FeatureModel;
    return s;
  }
  static ManagerSpec human(std::string name) {
    ManagerSpec s;
    s.kind = Kind::Human;
    s.session = std::move(name);
    return s;
  }

  InputMode input_mode() const noexcept {
    switch (kind) {
      case Kind::Model:
      case Kind::FeatureModel:
      case Kind::Random:
      case Kind::Fixed: return InputMode::StateOnly;
      default: return InputMode::StateAndMoves;
    }
  }

  void validate() const {
    if (kind == Kind::Random && !(p >= 0.0 && p <= 1.0))
      throw PreconditionError("random manager: p must lie in [0, 1]");
    if (kind == Kind::Oracle && rollouts < 1) throw PreconditionError("oracle manager: rollouts must be >= 1");
    if ((kind == Kind::Model || kind == Kind::FeatureModel) && (tau < 0.0 || !std::isfinite(tau)))
      throw PreconditionError("model manager: tau must be finite and >= 0");
  }

  /// Chooser id written into decision records.
  std::string id() const {
    auto num = [](double v) {
      nlohmann::json j = v;
      return j.dump();
    };
    switch (kind) {
      case Kind::Random: return "random(" + num(p) + ")";
      case Kind::Fixed: return "fixed(" + std::string(to_string(member)) + ")";
      case Kind::Expert: return "expert:" + engine;
      case Kind::Oracle: return "oracle(" + std::string(to_string(member)) + ",K=" + std::to_string(rollouts) + ")";
      case Kind::Model: return "model:" + model;
      case Kind::FeatureModel: return "feature-model:" + model;
      case Kind::Human: return "human:" + session;
    }
    return "?";
  }

  static std::string_view kind_name(Kind k) {
    switch (k) {
      case Kind::Random: return "random";
      case Kind::Fixed: return "fixed";
      case Kind::Expert: return "expert";
      case Kind::Oracle: return "oracle";
      case Kind::Model: return "model";
      case Kind::FeatureModel: return "feature-model";
      case Kind::Human: return "human";
    }
    return "?";
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"kind", kind_name(kind)}};
    switch (kind) {
      case Kind::Random: j["p"] = p; break;
      case Kind::Fixed: j["member"] = to_string(member); break;
      case Kind::Expert: j["engine"] = engine; break;
      case Kind::Oracle:
        j["superior"] = to_string(member);
        j["rollouts"] = rollouts;
        break;
      case Kind::Model:
      case Kind::FeatureModel:
        j["model"] = model;
        j["tau"] = tau;
        break;
      case Kind::Human: j["session"] = session; break;
    }
    return j;
  }

  static ManagerSpec from_json(const nlohmann::json& j) {
    ManagerSpec s;
    const std::string k = j.at("kind").get<std::string>();
    if (k == "random") {
      s.kind = Kind::Random;
      s.p = j.value("p", 0.5);
    } else if (k == "fixed") {
      s.kind = Kind::Fixed;
      s.member = member_from_string(j.at("member").get<std::string>());
    } else if (k == "expert") {
      s.kind = Kind::Expert;
      s.engine = j.value("engine", s.engine);
    } else if (k == "oracle") {
      s.kind = Kind::Oracle;
      s.member = member_from_string(j.value("superior", std::string("M")));
      s.rollouts = j.value("rollouts", 1);
    } else if (k == "model" || k == "feature-model") {
      s.kind = k == "model" ? Kind::Model : Kind::FeatureModel;
      s.model = j.at("model").get<std::string>();
      s.tau = j.value("tau", 0.0);
    } else if (k == "human") {
      s.kind = Kind::Human;
      s.session = j.value("session", std::string("anonymous"));
    } else {
      throw ParseError("unknown manager kind '" + k + "'");
    }
    s.validate();
    return s;
  }
};

/// One disagreement and how it was settled.
struct DecisionRecord {
  std::string fen;
  chess::Move rec_m;
  chess::Move rec_l;
  Choice choice = Choice::Indifferent;
  std::string chooser;
  Member resolved = Member::M;
  std::string game_id;
  int ply = 0;
  /// Seed of the rng handed to the manager; an Indifferent choice is settled
  /// by the first fair coin drawn from it after the manager returns.
  std::uint64_t seed = 0;

  const chess::Move& resolved_move() const noexcept { return resolved == Member::M ? rec_m : rec_l; }

  nlohmann::json to_json() const {
    return {{"fen", fen},       {"recM", rec_m.uci()}, {"recL", rec_l.uci()},   {"choice", to_string(choice)},
            {"chooser", chooser}, {"resolved", to_string(resolved)}, {"game_id", game_id}, {"ply", ply},
            {"seed", seed}};
  }

  static DecisionRecord from_json(const nlohmann::json& j) {
    DecisionRecord d;
    d.fen = j.at("fen").get<std::string>();
    const chess::Position p = chess::Position::from_fen(d.fen);
    d.rec_m = chess::parse_uci(p, j.at("recM").get<std::string>());
    d.rec_l = chess::parse_uci(p, j.at("recL").get<std::string>());
    d.choice = choice_from_string(j.at("choice").get<std::string>());
    d.chooser = j.value("chooser", std::string());
    d.resolved = member_from_string(j.at("resolved").get<std::string>());
    d.game_id = j.value("game_id", std::string());
    d.ply = j.value("ply", 0);
    d.seed = j.value("seed", std::uint64_t{0});
    return d;
  }
};

struct GameRecord {
  std::string game_id;
  std::size_t index = 0;
  std::string opening_id;
  std::string opening_fen = std::string(chess::kStartFen);
  chess::Color team_color = chess::Color::White;
  std::vector<chess::Move> moves;
  chess::GameOutcome outcome{chess::Result::Draw, chess::Termination::Adjudicated};
  std::vector<DecisionRecord> decisions;
  nlohmann::json engines = nlohmann::json::object();
  std::string team_label = "team";
  std::string adversary_label = "adversary";
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string abort_reason;

  double reward() const noexcept { return outcome.reward(); }

  nlohmann::json to_json() const {
    nlohmann::json mv = nlohmann::json::array();
    for (const auto& m : moves) mv.push_back(m.uci());
    return {{"game_id", game_id},
            {"index", index},
            {"opening_id", opening_id},
            {"opening_fen", opening_fen},
            {"team_color", team_color == chess::Color::White ? "white" : "black"},
            {"team", team_label},
            {"adversary", adversary_label},
            {"moves", mv},
            {"result", chess::to_string(outcome.result)},
            {"termination", chess::to_string(outcome.termination)},
            {"reward", reward()},
            {"decisions", decisions.size()},
            {"seed", seed},
            {"aborted", aborted},
            {"abort_reason", abort_reason},
            {"engines", engines}};
  }
};

/// Share of non-Indifferent decisions assigned to each member.
struct ChoiceDistribution {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t indifferent = 0;

  std::size_t n() const noexcept { return first + second; }
  bool defined() const noexcept { return n() > 0; }
  /// Throws when every decision was Indifferent.
  double share_m() const {
    if (!defined()) throw PreconditionError("choice distribution undefined: no non-indifferent decisions");
    return static_cast<double>(first) / static_cast<double>(n());
  }
  double share_l() const { return 1.0 - share_m(); }
};

inline ChoiceDistribution choice_distribution(std::span<const DecisionRecord> records) {
  ChoiceDistribution d;
  for (const auto& r : records) {
    if (r.choice == Choice::First) ++d.first;
    else if (r.choice == Choice::Second) ++d.second;
    else ++d.indifferent;
  }
  return d;
}

}  // namespace centaur::team
