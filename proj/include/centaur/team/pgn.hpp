#pragma once

#include <string>

#include "centaur/team/types.hpp"

namespace centaur::team {

namespace detail {

inline std::string pgn_result(const GameRecord& g) {
  if (g.aborted) return "*";
  if (g.outcome.result == chess::Result::Draw) return "1/2-1/2";
  const bool team_won = g.outcome.result == chess::Result::Win;
  const bool white_won = team_won == (g.team_color == chess::Color::White);
  return white_won ? "1-0" : "0-1";
}

inline std::string pgn_escape(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// PGN with a comment after every team move: "agree" when the members
/// agreed, otherwise the chooser, the choice and the member played. Solo
/// games carry no comments.
inline std::string to_pgn(const GameRecord& g) {
  const bool team_white = g.team_color == chess::Color::White;
  const std::string result = detail::pgn_result(g);
  std::string s;
  auto tag = [&](const std::string& k, const std::string& v) { s += "[" + k + " \"" + detail::pgn_escape(v) + "\"]\n"; };
  tag("Event", "centaur match");
  tag("Site", "?");
  tag("Date", "????.??.??");
  tag("Round", std::to_string(g.index + 1));
  tag("White", team_white ? g.team_label : g.adversary_label);
  tag("Black", team_white ? g.adversary_label : g.team_label);
  tag("Result", result);
  if (g.opening_fen != chess::kStartFen) {
    tag("SetUp", "1");
    tag("FEN", g.opening_fen);
  }
  tag("GameId", g.game_id);
  if (!g.opening_id.empty()) tag("Opening", g.opening_id);
  tag("TeamColor", team_white ? "white" : "black");
  tag("Termination", g.aborted ? "aborted" : std::string(chess::to_string(g.outcome.termination)));
  s += "\n";

  std::string line;
  auto emit = [&](const std::string& tok) {
    if (!line.empty() && line.size() + 1 + tok.size() > 79) {
      s += line + "\n";
      line.clear();
    }
    if (!line.empty()) line += ' ';
    line += tok;
  };

  chess::Position p = chess::Position::from_fen(g.opening_fen);
  std::size_t next_decision = 0;
  const bool solo = g.engines.contains("solo");
  bool first = true;
  for (const auto& m : g.moves) {
    const bool white = p.side_to_move() == chess::Color::White;
    if (white) emit(std::to_string(p.fullmove_number()) + ".");
    else if (first) emit(std::to_string(p.fullmove_number()) + "...");
    first = false;
    emit(chess::to_san(p, m));
    if (!solo && p.side_to_move() == g.team_color) {
      const DecisionRecord* d = nullptr;
      if (next_decision < g.decisions.size() && g.decisions[next_decision].fen == p.fen())
        d = &g.decisions[next_decision++];
      if (d)
        emit("{" + d->chooser + " " + std::string(to_string(d->choice)) + " " + std::string(to_string(d->resolved)) +
             "}");
      else
        emit("{agree}");
      first = true;  // a comment interrupts the move pair
    }
    p = chess::apply_move(p, m);
  }
  emit(result);
  s += line + "\n\n";
  return s;
}

inline std::string decisions_jsonl(const GameRecord& g) {
  std::string s;
  for (const auto& d : g.decisions) s += d.to_json().dump() + "\n";
  return s;
}

}  // namespace centaur::team
