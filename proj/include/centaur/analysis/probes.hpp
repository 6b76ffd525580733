#pragma once

#include <functional>
#include <memory>

#include "centaur/analysis/stats.hpp"
#include "centaur/rl/transformer.hpp"
#include "centaur/uci/engine.hpp"
#include "centaur/util/hash.hpp"

namespace centaur::analysis {

/// Anything that yields CLS attention for a token sequence: a trained
/// network, a fresh one, or a hand-built stand-in.
using AttentionFn = std::function<rl::ClsAttention(const chess::TokenSequence&)>;

template <typename T>
AttentionFn attention_of(std::shared_ptr<const rl::Transformer<T>> model) {
  return [model](const chess::TokenSequence& t) { return rl::extract_cls_attention(*model, t); };
}

struct ProbeSources {
  AttentionFn trained;
  AttentionFn untrained;
  std::string trained_id;
  std::string untrained_id;
};

/// The trained model plus the same architecture at a fresh seed, untrained.
template <typename T>
ProbeSources probe_sources(std::shared_ptr<const rl::Transformer<T>> trained, std::uint64_t untrained_seed) {
  auto h = trained->hyper();
  h.seed = untrained_seed;
  auto fresh = std::make_shared<const rl::Transformer<T>>(h);
  return {attention_of(trained), attention_of(fresh), "model:" + hex64(rl::fingerprint(trained->params())),
          "untrained:" + hex64(rl::fingerprint(fresh->params()))};
}

/// Untrained attention over the population of initialisations: every
/// distinct board is read by its own freshly seeded network, the seed
/// derived from `base_seed` and the token ids. A single fixed network carries
/// a small seed-specific bias (all empty squares share one embedding) that a
/// rank statistic detects even though its weights are near uniform.
template <typename T>
AttentionFn fresh_seed_attention(typename rl::Transformer<T>::Hyper hyper, std::uint64_t base_seed) {
  return [hyper, base_seed](const chess::TokenSequence& t) mutable {
    Fnv1a h;
    h.update(std::as_bytes(std::span<const std::uint8_t>(t.ids)));
    auto hh = hyper;
    hh.seed = derive_seed(base_seed, h.digest());
    return rl::extract_cls_attention(rl::Transformer<T>(hh), t);
  };
}

struct ProbeOptions {
  std::size_t min_positions = 1000;
  bool renormalize = false;  // rescale the 64 square weights to sum to 1
  std::uint64_t seed = 0;    // board shuffles and random-move draws

  nlohmann::json to_json() const {
    return {{"min_positions", min_positions}, {"renormalize", renormalize}, {"seed", seed}};
  }
};

struct ProbeGroup {
  std::string name;
  std::vector<double> values;  // one per retained position
  BoxSummary box;
};

struct ProbeComparison {
  std::string a, b;
  EffectReport effect;
  double paired_a_greater = 0.0;  // share of positions with a > b
};

struct ProbeCondition {
  std::string name;
  bool applicable = true;
  std::string note;
  std::size_t positions = 0;
  std::size_t skipped = 0;
  std::vector<ProbeGroup> groups;
  std::vector<ProbeComparison> comparisons;

  const ProbeComparison& comparison(const std::string& a, const std::string& b) const {
    for (const auto& c : comparisons)
      if (c.a == a && c.b == b) return c;
    throw PreconditionError("probe: no comparison " + a + " vs " + b + " in condition " + name);
  }
};

struct ProbeReport {
  std::string probe;
  std::vector<ProbeCondition> conditions;
  nlohmann::json provenance = nlohmann::json::object();

  const ProbeCondition& condition(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return c;
    throw PreconditionError("probe: no condition " + name);
  }

  nlohmann::json to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : conditions) {
      nlohmann::json g = nlohmann::json::array(), cmp = nlohmann::json::array();
      for (const auto& x : c.groups) g.push_back({{"name", x.name}, {"box", x.box.to_json()}});
      for (const auto& x : c.comparisons)
        cmp.push_back({{"a", x.a}, {"b", x.b}, {"effect", x.effect.to_json()}, {"paired_a_greater", x.paired_a_greater}});
      cs.push_back({{"name", c.name},
                    {"applicable", c.applicable},
                    {"note", c.note},
                    {"positions", c.positions},
                    {"skipped", c.skipped},
                    {"groups", g},
                    {"comparisons", cmp}});
    }
    return {{"probe", probe}, {"conditions", cs}, {"provenance", provenance}};
  }

  /// Long format: condition,group,index,value.
  std::string csv() const {
    std::string out = "condition,group,index,value\n";
    char buf[64];
    for (const auto& c : conditions)
      for (const auto& g : c.groups)
        for (std::size_t i = 0; i < g.values.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%.17g", g.values[i]);
          out += c.name + ',' + g.name + ',' + std::to_string(i) + ',' + buf + '\n';
        }
    return out;
  }
};

inline std::uint64_t position_set_hash(std::span<const chess::Position> positions) {
  Fnv1a h;
  for (const auto& p : positions) {
    h.update(p.fen());
    h.update("\n");
  }
  return h.digest();
}

namespace detail {

inline std::array<double, 64> square_weights(const AttentionFn& f, const chess::TokenSequence& t, bool renormalize) {
  const rl::ClsAttention a = f(t);
  std::array<double, 64> w = a.squares;
  if (renormalize) {
    double s = 0;
    for (double v : w) s += v;
    if (s > 0)
      for (double& v : w) v /= s;
  }
  return w;
}

/// Per-position means over the squares labelled a and b; nullopt skips.
using SplitFn = std::function<std::optional<std::pair<double, double>>(const chess::BoardSnapshot&, const std::array<double, 64>&)>;

inline ProbeCondition run_split(const std::string& name, const std::string& ga, const std::string& gb,
                                const AttentionFn& src, std::span<const chess::BoardSnapshot> boards,
                                const SplitFn& split, bool renormalize) {
  ProbeCondition c;
  c.name = name;
  ProbeGroup a{ga, {}, {}}, b{gb, {}, {}};
  std::size_t greater = 0;
  for (const auto& s : boards) {
    const auto w = square_weights(src, chess::tokenize(s), renormalize);
    const auto v = split(s, w);
    if (!v) {
      ++c.skipped;
      continue;
    }
    a.values.push_back(v->first);
    b.values.push_back(v->second);
    if (v->first > v->second) ++greater;
  }
  c.positions = a.values.size();
  if (c.positions == 0) {
    c.applicable = false;
    c.note = "every position was skipped";
    return c;
  }
  a.box = box_summary(a.values);
  b.box = box_summary(b.values);
  c.comparisons.push_back({ga, gb, analysis::a_w(a.values, b.values),
                           static_cast<double>(greater) / static_cast<double>(c.positions)});
  c.groups = {std::move(a), std::move(b)};
  return c;
}

inline std::optional<std::pair<double, double>> mean_split(const std::array<double, 64>& w,
                                                           const std::array<int, 64>& label) {
  double s[2] = {0, 0};
  int n[2] = {0, 0};
  for (int i = 0; i < 64; ++i) {
    if (label[static_cast<std::size_t>(i)] < 0) continue;
    s[label[static_cast<std::size_t>(i)]] += w[static_cast<std::size_t>(i)];
    ++n[label[static_cast<std::size_t>(i)]];
  }
  if (!n[0] || !n[1]) return std::nullopt;
  return std::pair{s[0] / n[0], s[1] / n[1]};
}

/// Trained, untrained and shuffled-board conditions for a board-only split.
inline ProbeReport three_conditions(const std::string& probe, const std::string& ga, const std::string& gb,
                                    const ProbeSources& src, std::span<const chess::Position> positions,
                                    const ProbeOptions& opt, const SplitFn& split) {
  if (positions.size() < opt.min_positions)
    throw PreconditionError(probe + ": " + std::to_string(positions.size()) + " positions, at least " +
                            std::to_string(opt.min_positions) + " required");
  std::vector<chess::BoardSnapshot> boards, shuffled;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    boards.push_back(chess::BoardSnapshot::of(positions[i]));
    shuffled.push_back(chess::shuffle_position(positions[i], derive_seed(opt.seed, i)));
  }
  ProbeReport r;
  r.probe = probe;
  r.conditions.push_back(run_split("trained", ga, gb, src.trained, boards, split, opt.renormalize));
  r.conditions.push_back(run_split("untrained", ga, gb, src.untrained, boards, split, opt.renormalize));
  r.conditions.push_back(run_split("shuffled", ga, gb, src.trained, shuffled, split, opt.renormalize));
  r.conditions.back().note = "trained model on boards with square contents permuted; labels recomputed on the permuted board";
  r.provenance = {{"options", opt.to_json()},
                  {"positions", positions.size()},
                  {"position_set", hex64(position_set_hash(positions))},
                  {"trained", src.trained_id},
                  {"untrained", src.untrained_id}};
  return r;
}

}  // namespace detail

/// Mean CLS attention to occupied versus empty squares, both colours' pieces
/// counting as occupied.
inline ProbeReport attention_probe_pieces(const ProbeSources& src, std::span<const chess::Position> positions,
                                          const ProbeOptions& opt = {}) {
  return detail::three_conditions(
      "pieces", "occupied", "empty", src, positions, opt,
      [](const chess::BoardSnapshot& s, const std::array<double, 64>& w) {
        std::array<int, 64> label;
        for (int i = 0; i < 64; ++i) label[static_cast<std::size_t>(i)] = s.board[chess::Square(i)] ? 0 : 1;
        return detail::mean_split(w, label);
      });
}

/// Mean CLS attention to attacked versus unattacked pieces of either colour.
/// A piece is attacked when the opposite colour attacks its square
/// (pseudo-legal attacks, pins ignored).
inline ProbeReport attention_probe_attacked(const ProbeSources& src, std::span<const chess::Position> positions,
                                            const ProbeOptions& opt = {}) {
  return detail::three_conditions(
      "attacked", "attacked", "unattacked", src, positions, opt,
      [](const chess::BoardSnapshot& s, const std::array<double, 64>& w) {
        std::array<int, 64> label;
        for (int i = 0; i < 64; ++i) {
          const chess::Piece pc = s.board[chess::Square(i)];
          label[static_cast<std::size_t>(i)] =
              !pc ? -1 : chess::is_attacked(s.board, chess::Square(i), ~pc.color()) ? 0 : 1;
        }
        return detail::mean_split(w, label);
      });
}

struct MoveProbeItem {
  chess::Position position;
  chess::Move rec_m;
  chess::Move rec_l;
  chess::Move third_party;
};

/// Queries both members and the third-party engine on every position with at
/// least two legal moves.
inline std::vector<MoveProbeItem> gather_move_probe_items(std::span<const chess::Position> positions, uci::Engine& m,
                                                          uci::Engine& l, uci::Engine& third, std::uint64_t seed) {
  std::vector<MoveProbeItem> out;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto& p = positions[i];
    if (chess::legal_moves(p).size() < 2) continue;
    const std::uint64_t s = derive_seed(seed, i);
    out.push_back({p, m.best_move(p, s), l.best_move(p, s), third.best_move(p, s)});
  }
  return out;
}

/// Attention to the origin and destination squares of each member's
/// recommendation, a third-party engine's move, and a uniformly random legal
/// move (drawn per position from the logged seed).
inline ProbeReport attention_probe_moves(const ProbeSources& src, std::span<const MoveProbeItem> items,
                                         const ProbeOptions& opt = {}) {
  if (items.size() < opt.min_positions)
    throw PreconditionError("moves: " + std::to_string(items.size()) + " positions, at least " +
                            std::to_string(opt.min_positions) + " required");
  static const std::array<std::string, 4> kSources = {"M", "L", "third_party", "random"};
  std::vector<std::array<chess::Move, 4>> moves;
  std::vector<chess::TokenSequence> tokens;
  std::size_t skipped = 0;
  std::vector<chess::Position> kept;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto legal = chess::legal_moves(items[i].position);
    if (legal.size() < 2) {
      ++skipped;
      continue;
    }
    Rng rng(derive_seed(opt.seed, i));
    moves.push_back({items[i].rec_m, items[i].rec_l, items[i].third_party, legal[uniform_index(rng, legal.size())]});
    tokens.push_back(chess::tokenize(items[i].position));
    kept.push_back(items[i].position);
  }

  auto run = [&](const std::string& name, const AttentionFn& f) {
    ProbeCondition c;
    c.name = name;
    c.positions = tokens.size();
    c.skipped = skipped;
    std::vector<ProbeGroup> origin(4), dest(4);
    for (std::size_t k = 0; k < 4; ++k) {
      origin[k].name = "origin:" + kSources[k];
      dest[k].name = "destination:" + kSources[k];
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto w = detail::square_weights(f, tokens[i], opt.renormalize);
      for (std::size_t k = 0; k < 4; ++k) {
        origin[k].values.push_back(w[static_cast<std::size_t>(moves[i][k].from.index())]);
        dest[k].values.push_back(w[static_cast<std::size_t>(moves[i][k].to.index())]);
      }
    }
    if (tokens.empty()) {
      c.applicable = false;
      c.note = "every position was skipped";
      return c;
    }
    for (auto* gs : {&origin, &dest}) {
      for (auto& g : *gs) g.box = box_summary(g.values);
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) {
          std::size_t greater = 0;
          for (std::size_t i = 0; i < tokens.size(); ++i) greater += (*gs)[a].values[i] > (*gs)[b].values[i];
          c.comparisons.push_back({(*gs)[a].name, (*gs)[b].name, analysis::a_w((*gs)[a].values, (*gs)[b].values),
                                   static_cast<double>(greater) / static_cast<double>(tokens.size())});
        }
    }
    c.groups = std::move(origin);
    c.groups.insert(c.groups.end(), dest.begin(), dest.end());
    return c;
  };

  ProbeReport r;
  r.probe = "moves";
  r.conditions.push_back(run("trained", src.trained));
  r.conditions.push_back(run("untrained", src.untrained));
  ProbeCondition sh;
  sh.name = "shuffled";
  sh.applicable = false;
  sh.note = "not applicable: moves are undefined on permuted boards; the third-party and random sources are the controls";
  r.conditions.push_back(sh);
  r.provenance = {{"options", opt.to_json()},
                  {"positions", items.size()},
                  {"position_set", hex64(position_set_hash(kept))},
                  {"trained", src.trained_id},
                  {"untrained", src.untrained_id}};
  return r;
}

}  // namespace centaur::analysis
