#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "centaur/analysis/stats.hpp"
#include "centaur/team/types.hpp"

namespace centaur::harness {

inline std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot read " + p.string());
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(p.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<team::DecisionRecord> read_decisions(const std::filesystem::path& p) {
  std::vector<team::DecisionRecord> out;
  for (const auto& j : read_jsonl(p)) out.push_back(team::DecisionRecord::from_json(j));
  return out;
}

/// Recomputes a run's MatchSummary from its games.jsonl.
inline analysis::MatchSummary summary_from_games(const std::filesystem::path& games_jsonl) {
  analysis::MatchSummary s;
  for (const auto& g : read_jsonl(games_jsonl)) {
    if (s.team.empty() && !g.value("aborted", false)) {
      s.team = g.value("team", std::string());
      s.adversary = g.value("adversary", std::string());
    }
    if (g.value("aborted", false)) {
      ++s.aborted;
      continue;
    }
    const std::string r = g.at("result").get<std::string>();
    if (r == "win") ++s.wins;
    else if (r == "draw") ++s.draws;
    else if (r == "loss") ++s.losses;
    else throw ParseError(games_jsonl.string() + ": unknown result '" + r + "'");
    s.rewards.push_back(g.at("reward").get<double>());
  }
  return s;
}

}  // namespace centaur::harness
