#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "centaur/chess/movegen.hpp"
#include "centaur/chess/position.hpp"
#include "centaur/uci/stub_script.hpp"
#include "centaur/util/hash.hpp"

namespace centaur::harness {

struct Diagnostic {
  std::size_t line;
  std::string message;
};

/// Deduplicated opening positions with stable ids and a content hash.
struct OpeningSet {
  std::string source;
  std::vector<std::string> ids;
  std::vector<chess::Position> positions;
  std::string content_hash;
  std::vector<Diagnostic> diagnostics;
  std::size_t duplicates = 0;

  std::size_t size() const noexcept { return positions.size(); }

  /// fnv1a of each position's placement, side, castling and en passant.
  std::set<std::uint64_t> key_hashes() const {
    std::set<std::uint64_t> out;
    for (const auto& p : positions) out.insert(fnv1a(uci::fen_key(p)));
    return out;
  }

  nlohmann::json summary_json() const {
    nlohmann::json d = nlohmann::json::array();
    for (const auto& x : diagnostics) d.push_back({{"line", x.line}, {"message", x.message}});
    return {{"source", source},         {"positions", size()}, {"content_hash", content_hash},
            {"duplicates", duplicates}, {"diagnostics", d}};
  }
};

namespace detail {

inline bool is_integer(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

/// Value of the `id "..."` opcode, or empty.
inline std::string epd_id(const std::string& ops) {
  const auto at = ops.find("id ");
  if (at == std::string::npos || (at > 0 && ops[at - 1] != ' ' && ops[at - 1] != ';')) return {};
  const auto q1 = ops.find('"', at);
  if (q1 == std::string::npos) return {};
  const auto q2 = ops.find('"', q1 + 1);
  if (q2 == std::string::npos) return {};
  return ops.substr(q1 + 1, q2 - q1 - 1);
}

}  // namespace detail

/// One FEN or EPD record per line. Blank lines and lines starting with '#'
/// are skipped. EPD opcodes are ignored apart from `id`. Positions equal in
/// the first four FEN fields count as duplicates; the first one is kept.
inline OpeningSet parse_openings(std::istream& in, std::string source) {
  OpeningSet set;
  set.source = std::move(source);
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  Fnv1a hash;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream ls(line.substr(first));
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.size() < 4) {
      set.diagnostics.push_back({lineno, "expected at least 4 FEN fields"});
      continue;
    }
    std::string fen = tok[0] + ' ' + tok[1] + ' ' + tok[2] + ' ' + tok[3];
    std::size_t used = 4;
    if (tok.size() >= 6 && detail::is_integer(tok[4]) && detail::is_integer(tok[5])) {
      fen += ' ' + tok[4] + ' ' + tok[5];
      used = 6;
    }
    std::string ops;
    for (std::size_t i = used; i < tok.size(); ++i) ops += (ops.empty() ? "" : " ") + tok[i];

    std::optional<chess::Position> parsed;
    try {
      parsed = chess::Position::from_fen(fen);
    } catch (const Error& e) {
      set.diagnostics.push_back({lineno, e.what()});
      continue;
    }
    const chess::Position& p = *parsed;
    if (chess::legal_moves(p).empty()) {
      set.diagnostics.push_back({lineno, "terminal position (no legal moves)"});
      continue;
    }
    const std::string key = uci::fen_key(p);
    if (seen.count(key)) {
      ++set.duplicates;
      continue;
    }
    seen.insert(key);
    std::string id = detail::epd_id(ops);
    if (id.empty()) id = "line" + std::to_string(lineno);
    set.ids.push_back(std::move(id));
    hash.update(p.fen());
    hash.update("\n");
    set.positions.push_back(p);
  }
  if (set.positions.empty())
    throw ParseError("openings " + set.source + ": no valid positions (" + std::to_string(set.diagnostics.size()) +
                     " invalid lines)");
  set.content_hash = hex64(hash.digest());
  return set;
}

inline OpeningSet ingest_openings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read openings file " + path);
  return parse_openings(in, path);
}

inline OpeningSet openings_from_string(const std::string& text, std::string source = "<string>") {
  std::istringstream in(text);
  return parse_openings(in, std::move(source));
}

/// Throws if any position appears in both sets.
inline void require_disjoint(const OpeningSet& train, const OpeningSet& test) {
  const auto a = train.key_hashes(), b = test.key_hashes();
  std::size_t shared = 0;
  for (auto h : b) shared += a.count(h);
  if (shared)
    throw PreconditionError("opening sets " + train.source + " and " + test.source + " share " +
                            std::to_string(shared) + " position(s)");
}

}  // namespace centaur::harness
