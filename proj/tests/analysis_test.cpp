#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "centaur/analysis/plots.hpp"
#include "centaur/analysis/probes.hpp"
#include "centaur/analysis/stats.hpp"
#include "centaur/analysis/tables.hpp"
#include "rl_fixtures.hpp"
#include "test_support.hpp"

using namespace centaur;
using namespace centaur::analysis;
using chess::Position;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

double brute_superiority(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (double x : a)
    for (double y : b) s += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

using Model = rl::Transformer<float>;

Model::Hyper small(int layers = 1, int heads = 1, int dim = 8) {
  Model::Hyper h;
  h.layers = layers;
  h.heads = heads;
  h.dim = dim;
  h.ff = 2 * dim;
  h.head_hidden = dim;
  return h;
}

/// Query and key projections zeroed: every attention row is exactly uniform.
std::shared_ptr<const Model> uniform_model() {
  auto m = std::make_shared<Model>(small(2, 2, 8));
  for (const auto& b : m->layout().blocks())
    if (b.name.find("attn.qkv") != std::string::npos)
      std::fill_n(m->params().begin() + static_cast<std::ptrdiff_t>(b.offset), b.size(), 0.0f);
  return m;
}

/// One layer, one head; only the e4 position embedding is non-zero and the
/// CLS query matches its key, so CLS attends (almost) only to e4.
std::shared_ptr<const Model> e4_model() {
  auto m = std::make_shared<Model>(small());
  for (const auto& b : m->layout().blocks())
    if (b.name.find(".gain") == std::string::npos)
      std::fill_n(m->params().begin() + static_cast<std::ptrdiff_t>(b.offset), b.size(), 0.0f);
  const int D = 8, e4 = chess::Square::at(4, 3).index();
  auto& p = m->params();
  const auto& pos = m->layout().find("embed.position");
  p[pos.offset + static_cast<std::size_t>(e4 * D)] = 1.0f;
  p[pos.offset + static_cast<std::size_t>(e4 * D + 1)] = -1.0f;
  const auto& w = m->layout().find("layer0.attn.qkv.weight");
  p[w.offset + static_cast<std::size_t>(D)] = 1.0f;  // input dim 0 -> key dim 0
  p[m->layout().find("layer0.attn.qkv.bias").offset] = 100.0f;  // query dim 0
  return m;
}

/// Hand-built attention: all weight spread over attacked pieces.
rl::ClsAttention attacked_only(const chess::TokenSequence& t) {
  const auto s = chess::decode(t);
  rl::ClsAttention a;
  int n = 0;
  for (int i = 0; i < 64; ++i) {
    const chess::Piece pc = s.board[chess::Square(i)];
    if (pc && chess::is_attacked(s.board, chess::Square(i), ~pc.color())) ++n;
  }
  for (int i = 0; i < 64; ++i) {
    const chess::Piece pc = s.board[chess::Square(i)];
    if (pc && chess::is_attacked(s.board, chess::Square(i), ~pc.color()))
      a.squares[static_cast<std::size_t>(i)] = 1.0 / n;
  }
  return a;
}

ProbeOptions opts(std::size_t min = 0, std::uint64_t seed = 3) {
  ProbeOptions o;
  o.min_positions = min;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(Wdl, Examples) {
  EXPECT_DOUBLE_EQ(wdl(2, 1, 1), 0.625);
  for (std::size_t n : {1u, 7u, 1000u}) EXPECT_DOUBLE_EQ(wdl(0, n, 0), 0.5);
  EXPECT_DOUBLE_EQ(wdl(10, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(wdl(0, 0, 3), 0.0);
  EXPECT_THROW(wdl(0, 0, 0), PreconditionError);
}

TEST(Wdl, PoolingIsCountWeighted) {
  MatchSummary a, b;
  a.wins = 3, a.draws = 1, a.losses = 0, a.rewards = {1, 1, 1, 0.5};
  b.wins = 0, b.draws = 2, b.losses = 4, b.rewards = {0.5, 0.5, 0, 0, 0, 0};
  const std::vector<MatchSummary> parts{a, b};
  const MatchSummary p = pool(parts);
  EXPECT_EQ(p.games(), 10u);
  EXPECT_DOUBLE_EQ(p.wdl(), (4 * a.wdl() + 6 * b.wdl()) / 10);
  EXPECT_DOUBLE_EQ(p.wdl(), mean(p.rewards));
}

TEST(MatchSummaryTest, CountsOutcomesAndExcludesAborted) {
  std::vector<team::GameRecord> games(5);
  games[0].outcome = {chess::Result::Win, chess::Termination::Checkmate};
  games[1].outcome = {chess::Result::Loss, chess::Termination::Checkmate};
  games[2].outcome = {chess::Result::Draw, chess::Termination::Stalemate};
  games[3].outcome = {chess::Result::Win, chess::Termination::Checkmate};
  games[4].aborted = true;
  for (auto& g : games) g.team_label = "t", g.adversary_label = "adv";
  const MatchSummary s = MatchSummary::of(games, "set-a");
  EXPECT_EQ(s.wins, 2u);
  EXPECT_EQ(s.draws, 1u);
  EXPECT_EQ(s.losses, 1u);
  EXPECT_EQ(s.aborted, 1u);
  EXPECT_DOUBLE_EQ(s.wdl(), 0.625);
  EXPECT_EQ(s.to_json()["team"], "t");
  EXPECT_EQ(s.to_json()["opening_set"], "set-a");

  // Game order does not matter.
  std::vector<team::GameRecord> rev(games.rbegin(), games.rend());
  EXPECT_DOUBLE_EQ(MatchSummary::of(rev).wdl(), s.wdl());
  EXPECT_DOUBLE_EQ(MatchSummary::of(rev).sem(), s.sem());
}

TEST(Sem, FrequencyFormula) {
  EXPECT_DOUBLE_EQ(sem_frequency(0.5, 10000), 0.005);
  EXPECT_DOUBLE_EQ(sem_frequency(0.0, 10), 0.0);
  EXPECT_DOUBLE_EQ(sem_frequency(0.2, 100), std::sqrt(0.2 * 0.8 / 100));
  EXPECT_THROW(sem_frequency(0.5, 0), PreconditionError);
}

TEST(ZScore, Examples) {
  const std::vector<double> a{1, 0, 0.5, 1, 0};
  EXPECT_DOUBLE_EQ(z_score(a, a), 0.0);
  const std::vector<double> ones(1000, 1.0), zeros(1000, 0.0);
  EXPECT_GT(z_score(ones, zeros), 30.0);
  std::vector<double> alt, shifted;
  for (int i = 0; i < 100; ++i) {
    alt.push_back(i % 2);
    shifted.push_back((i + 1) % 2);
  }
  EXPECT_DOUBLE_EQ(z_score(alt, shifted), 0.0);
  EXPECT_THROW(z_score(a, {}), PreconditionError);
}

TEST(ZScore, SignFlipAndShiftInvariance) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a, b;
    for (int i = 0; i < 20; ++i) a.push_back(static_cast<double>(uniform_index(rng, 3)) / 2);
    for (int i = 0; i < 30; ++i) b.push_back(static_cast<double>(uniform_index(rng, 3)) / 2);
    const double z = z_score(a, b);
    EXPECT_DOUBLE_EQ(z_score(b, a), -z);
    for (auto& v : a) v += 0.25;
    for (auto& v : b) v += 0.25;
    EXPECT_NEAR(z_score(a, b), z, 1e-9);
  }
}

TEST(AW, Examples) {
  const std::vector<double> lo{1, 2, 3}, hi{4, 5, 6};
  const EffectReport r = a_w(lo, hi);
  EXPECT_DOUBLE_EQ(r.a_w, 1.0);
  EXPECT_EQ(r.higher, EffectReport::Higher::B);
  EXPECT_DOUBLE_EQ(a_w(lo, lo).a_w, 0.5);
  EXPECT_EQ(a_w(lo, lo).higher, EffectReport::Higher::Equal);
  const std::vector<double> x{1, 2}, y{2, 3};
  EXPECT_DOUBLE_EQ(a_w(x, y).a_w, 0.875);
  EXPECT_EQ(a_w(x, y).higher, EffectReport::Higher::B);
  const std::vector<double> one{3.5};
  EXPECT_DOUBLE_EQ(a_w(one, one).a_w, 0.5);
}

TEST(AW, MatchesBruteForceOnRandomGroups) {
  Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(1 + uniform_index(rng, 12)), b(1 + uniform_index(rng, 12));
    for (auto& v : a) v = static_cast<double>(uniform_index(rng, 6));
    for (auto& v : b) v = static_cast<double>(uniform_index(rng, 6)) + (t % 2 ? 0.5 : 0.0);
    const double sup = brute_superiority(a, b);
    EXPECT_NEAR(superiority(a, b), sup, 1e-12);
    const EffectReport r = a_w(a, b);
    EXPECT_NEAR(r.a_w, r.higher == EffectReport::Higher::B ? 1 - sup : sup, 1e-12);
    // Swapping groups maps the raw value to its complement.
    EXPECT_NEAR(superiority(b, a), 1 - sup, 1e-12);
  }
}

TEST(AW, InvariantUnderIncreasingTransform) {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> a(10), b(8);
    for (auto& v : a) v = uniform01(rng) * 4 - 2;
    for (auto& v : b) v = uniform01(rng) * 4 - 1.5;
    auto ta = a, tb = b;
    for (auto& v : ta) v = std::exp(3 * v) + v * v * v;
    for (auto& v : tb) v = std::exp(3 * v) + v * v * v;
    EXPECT_DOUBLE_EQ(superiority(ta, tb), superiority(a, b));
  }
}

TEST(Oracle, FrozenStatistics) {
  int checked = 0;
  for (const auto& row : test_support::read_rows("stats_oracle.txt")) {
    const auto a = parse_list(row[1]);
    const auto b = parse_list(row[2]);
    const auto want = parse_list(row[3]);
    if (row[0] == "aw") {
      EXPECT_NEAR(superiority(a, b), want[0], 1e-12);
      EXPECT_NEAR(a_w(a, b).a_w, want[1], 1e-12);
    } else if (row[0] == "z") {
      EXPECT_NEAR(z_score(a, b), want[0], 1e-12);
    } else if (row[0] == "box") {
      const BoxSummary s = box_summary(a);
      EXPECT_NEAR(s.q1, want[0], 1e-12);
      EXPECT_NEAR(s.median, want[1], 1e-12);
      EXPECT_NEAR(s.q3, want[2], 1e-12);
      EXPECT_DOUBLE_EQ(s.whisker_low, want[3]);
      EXPECT_DOUBLE_EQ(s.whisker_high, want[4]);
      EXPECT_EQ(static_cast<double>(s.outliers.size()), want[5]);
      EXPECT_NEAR(sem(a), want[6], 1e-12);
    }
    ++checked;
  }
  EXPECT_EQ(checked, 30);
}

TEST(Box, WhiskersStopAtFarthestPointWithinRange) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 100};
  const BoxSummary b = box_summary(x);
  EXPECT_DOUBLE_EQ(b.q1, 3.25);
  EXPECT_DOUBLE_EQ(b.median, 5.5);
  EXPECT_DOUBLE_EQ(b.q3, 7.75);
  EXPECT_DOUBLE_EQ(b.whisker_low, 1);
  EXPECT_DOUBLE_EQ(b.whisker_high, 9);
  EXPECT_EQ(b.outliers, std::vector<double>{100});
  EXPECT_THROW(box_summary({}), PreconditionError);
}

TEST(Probes, UniformAttentionGivesExactTies) {
  const auto positions = rl_fixtures::random_game_positions(60, 1);
  const auto m = uniform_model();
  ProbeSources src{attention_of(m), attention_of(m), "uniform", "uniform"};
  const ProbeReport r = attention_probe_pieces(src, positions, opts());
  for (const auto& c : r.conditions) {
    ASSERT_EQ(c.groups.size(), 2u);
    for (std::size_t i = 0; i < c.groups[0].values.size(); ++i)
      EXPECT_EQ(c.groups[0].values[i], c.groups[1].values[i]);
    EXPECT_DOUBLE_EQ(c.comparisons[0].effect.a_w, 0.5);
  }
  const ProbeReport att = attention_probe_attacked(src, positions, opts());
  for (const auto& c : att.conditions) EXPECT_DOUBLE_EQ(c.comparisons[0].effect.a_w, 0.5);
}

TEST(Probes, AttackedSquareModelScoresOne) {
  const auto positions = rl_fixtures::random_game_positions(200, 2, 60);
  ProbeSources src{attacked_only, attacked_only, "attacked-only", "attacked-only"};
  const ProbeReport r = attention_probe_attacked(src, positions, opts());
  const auto& trained = r.condition("trained");
  EXPECT_GT(trained.skipped, 0u);
  EXPECT_EQ(trained.positions + trained.skipped, 200u);
  EXPECT_DOUBLE_EQ(trained.comparisons[0].effect.a_w, 1.0);
  EXPECT_EQ(trained.comparisons[0].effect.higher, EffectReport::Higher::A);
  // Labels are recomputed on the permuted board, so an attack-reading source
  // still separates perfectly there.
  EXPECT_DOUBLE_EQ(r.condition("shuffled").comparisons[0].effect.a_w, 1.0);
}

TEST(Probes, ShuffledConditionPermutesBoards) {
  const auto positions = rl_fixtures::random_game_positions(40, 3);
  int calls = 0;
  std::vector<chess::TokenSequence> seen;
  AttentionFn record = [&](const chess::TokenSequence& t) {
    ++calls;
    seen.push_back(t);
    return rl::ClsAttention{};
  };
  ProbeSources src{record, record, "r", "r"};
  attention_probe_pieces(src, positions, opts());
  ASSERT_EQ(calls, 120);
  int moved = 0;
  for (std::size_t i = 0; i < 40; ++i) moved += seen[80 + i] != seen[i];
  EXPECT_GT(moved, 35);
}

TEST(Probes, UntrainedModelIsNearUniformPerPosition) {
  const auto positions = rl_fixtures::random_game_positions(100, 4);
  const auto fresh = std::make_shared<const Model>(Model::Hyper{});
  ProbeSources src{attention_of(fresh), attention_of(fresh), "fresh", "fresh"};
  const auto c = attention_probe_pieces(src, positions, opts()).condition("untrained");
  int close = 0;
  for (std::size_t i = 0; i < c.positions; ++i) {
    const double a = c.groups[0].values[i], b = c.groups[1].values[i];
    close += std::abs(a - b) <= 0.1 * std::max(a, b);
  }
  EXPECT_GE(close, 95);
}

TEST(Probes, FreshSeedPopulationIsBalanced) {
  const auto positions = rl_fixtures::random_game_positions(600, 5, 120);
  const AttentionFn pop = fresh_seed_attention<float>(small(2, 2, 16), 17);
  ProbeSources src{pop, pop, "population", "population"};
  const auto r = attention_probe_pieces(src, positions, opts());
  EXPECT_NEAR(r.condition("untrained").comparisons[0].effect.a_w, 0.5, 0.05);
}

TEST(Probes, RequiresEnoughPositions) {
  const auto positions = rl_fixtures::random_game_positions(10, 6);
  const auto m = uniform_model();
  ProbeSources src{attention_of(m), attention_of(m), "u", "u"};
  EXPECT_THROW(attention_probe_pieces(src, positions, ProbeOptions{}), PreconditionError);
  EXPECT_THROW(attention_probe_attacked(src, positions, ProbeOptions{}), PreconditionError);
}

TEST(Probes, E4ModelFavoursMovesLandingOnE4) {
  const auto m = e4_model();
  const auto a = rl::extract_cls_attention(*m, Position::start());
  EXPECT_GT(a.squares[static_cast<std::size_t>(chess::Square::at(4, 3).index())], 0.99);

  std::vector<MoveProbeItem> items;
  for (const auto& p : rl_fixtures::random_game_positions(300, 7, 40)) {
    const auto legal = chess::legal_moves(p);
    std::optional<chess::Move> to_e4;
    std::vector<chess::Move> others;
    for (const auto& mv : legal) {
      if (mv.to == chess::Square::at(4, 3)) to_e4 = mv;
      else others.push_back(mv);
    }
    if (!to_e4 || others.size() < 2) continue;
    items.push_back({p, *to_e4, others.front(), others.back()});
  }
  ASSERT_GT(items.size(), 20u);
  const auto src = ProbeSources{attention_of(m), attention_of(m), "e4", "e4"};
  const ProbeReport r = attention_probe_moves(src, items, opts());
  const auto& c = r.condition("trained");
  EXPECT_DOUBLE_EQ(c.comparison("destination:M", "destination:L").effect.a_w, 1.0);
  EXPECT_DOUBLE_EQ(c.comparison("destination:M", "destination:third_party").effect.a_w, 1.0);
  EXPECT_GT(c.comparison("destination:M", "destination:random").effect.a_w, 0.9);
  EXPECT_EQ(c.comparison("destination:M", "destination:L").effect.higher, EffectReport::Higher::A);
  EXPECT_FALSE(r.condition("shuffled").applicable);
  EXPECT_FALSE(r.condition("shuffled").note.empty());
}

TEST(Probes, UniformModelMakesMoveSourcesIndistinguishable) {
  const auto m = uniform_model();
  auto e1 = rl_fixtures::stub("m", {{"policy", {"capture", "first"}}});
  auto e2 = rl_fixtures::stub("l", {{"policy", {"check", "last"}}});
  auto e3 = rl_fixtures::stub("t", {{"policy", {"random"}}});
  const auto positions = rl_fixtures::random_game_positions(80, 8);
  const auto items = gather_move_probe_items(positions, *e1, *e2, *e3, 1);
  const ProbeReport r = attention_probe_moves({attention_of(m), attention_of(m), "u", "u"}, items, opts());
  for (const auto& cmp : r.condition("trained").comparisons) EXPECT_DOUBLE_EQ(cmp.effect.a_w, 0.5) << cmp.a << cmp.b;
}

TEST(Probes, RandomMoveControlIsReproducible) {
  const auto m = std::make_shared<const Model>(small(1, 2, 8));
  auto e = rl_fixtures::stub("e", {{"policy", {"random"}}});
  const auto positions = rl_fixtures::random_game_positions(30, 9);
  const auto items = gather_move_probe_items(positions, *e, *e, *e, 2);
  const ProbeSources src{attention_of(m), attention_of(m), "m", "m"};
  const auto a = attention_probe_moves(src, items, opts(0, 11));
  const auto b = attention_probe_moves(src, items, opts(0, 11));
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_EQ(a.csv(), b.csv());
  const auto c = attention_probe_moves(src, items, opts(0, 12));
  EXPECT_NE(a.csv(), c.csv());
  EXPECT_EQ(a.provenance["options"]["seed"], 11);
}

TEST(Probes, ReportCarriesProvenance) {
  const auto trained = std::make_shared<const Model>(small(1, 1, 8));
  const ProbeSources src = probe_sources(trained, 1234);
  EXPECT_NE(src.trained_id, src.untrained_id);
  const auto positions = rl_fixtures::random_game_positions(20, 10);
  const auto r = attention_probe_pieces(src, positions, opts());
  EXPECT_EQ(r.provenance["trained"], src.trained_id);
  EXPECT_EQ(r.provenance["position_set"], hex64(position_set_hash(positions)));
  EXPECT_EQ(r.conditions.size(), 3u);
  const auto again = attention_probe_pieces(probe_sources(trained, 1234), positions, opts());
  EXPECT_EQ(again.to_json().dump(), r.to_json().dump());
}

TEST(Probes, RenormalisationRescalesSquares) {
  const auto m = std::make_shared<const Model>(small(1, 1, 8));
  const auto positions = rl_fixtures::random_game_positions(10, 11);
  auto o = opts();
  o.renormalize = true;
  const auto r = attention_probe_pieces({attention_of(m), attention_of(m), "m", "m"}, positions, o);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto a = rl::extract_cls_attention(*m, positions[i]);
    double s = 0;
    int occ = 0;
    double occ_sum = 0;
    for (int k = 0; k < 64; ++k) {
      s += a.squares[static_cast<std::size_t>(k)];
      if (positions[i].board()[chess::Square(k)]) {
        ++occ;
        occ_sum += a.squares[static_cast<std::size_t>(k)];
      }
    }
    EXPECT_NEAR(r.condition("trained").groups[0].values[i], occ_sum / s / occ, 1e-12);
  }
}

TEST(FeaturePreference, FixedManagerLeavesLEmpty) {
  std::vector<std::pair<Position, team::Member>> d;
  for (const auto& p : rl_fixtures::random_game_positions(10, 12)) d.push_back({p, team::Member::M});
  const auto t = feature_preference_table(d);
  EXPECT_TRUE(t.l_empty);
  EXPECT_FALSE(t.m_empty);
  ASSERT_EQ(t.rows.size(), 15u);
  for (const auto& r : t.rows) {
    EXPECT_FALSE(r.effect);
    EXPECT_TRUE(std::isnan(r.mean_l));
  }
  EXPECT_NE(t.csv().find("material_points"), std::string::npos);
  EXPECT_THROW(feature_preference_table({}), PreconditionError);
}

TEST(FeaturePreference, MaterialSplitAndDuplicationInvariance) {
  std::vector<std::pair<Position, team::Member>> d;
  for (const auto& p : rl_fixtures::random_game_positions(200, 13, 120)) {
    const auto f = chess::board_features(p);
    d.push_back({p, f.material_points >= 36 ? team::Member::M : team::Member::L});
  }
  const auto t = feature_preference_table(d);
  ASSERT_GT(t.n_m, 0u);
  ASSERT_GT(t.n_l, 0u);
  const auto& mat = t.row("material_points");
  EXPECT_DOUBLE_EQ(mat.effect->a_w, 1.0);
  EXPECT_EQ(mat.effect->higher, EffectReport::Higher::A);
  EXPECT_GT(mat.mean_m, mat.mean_l);

  auto twice = d;
  twice.insert(twice.end(), d.begin(), d.end());
  const auto t2 = feature_preference_table(twice);
  // Means agree up to summation rounding; A_w comes from integer counts.
  for (std::size_t k = 0; k < 15; ++k) {
    EXPECT_NEAR(t2.rows[k].mean_m, t.rows[k].mean_m, 1e-12 * std::max(1.0, std::abs(t.rows[k].mean_m)));
    EXPECT_NEAR(t2.rows[k].mean_l, t.rows[k].mean_l, 1e-12 * std::max(1.0, std::abs(t.rows[k].mean_l)));
    EXPECT_EQ(t2.rows[k].effect->a_w, t.rows[k].effect->a_w);
  }
}

TEST(FeaturePreference, UnrelatedFeatureIsBalanced) {
  // Positions at one fixed ply: the ply row ties everywhere.
  std::vector<std::pair<Position, team::Member>> d;
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    Position p = Position::start();
    for (int k = 0; k < 10; ++k) {
      const auto legal = chess::legal_moves(p);
      p = chess::apply_move(p, legal[uniform_index(rng, legal.size())]);
    }
    d.push_back({p, i % 2 ? team::Member::M : team::Member::L});
  }
  EXPECT_DOUBLE_EQ(feature_preference_table(d).row("ply").effect->a_w, 0.5);
}

TEST(Humanlikeness, CastlingFrequencies) {
  const Position p = Position::from_fen("r3k2r/pppppppp/8/8/8/8/PPPPPPPP/R3K2R w KQkq - 0 1");
  std::vector<RecommendationPair> pairs;
  for (int i = 0; i < 4; ++i) pairs.push_back({p, chess::parse_uci(p, "e1g1"), chess::parse_uci(p, "a2a3")});
  const auto r = humanlikeness_report(pairs);
  EXPECT_DOUBLE_EQ(r.row("castle").freq_m, 1.0);
  EXPECT_DOUBLE_EQ(r.row("castle").freq_l, 0.0);
  EXPECT_DOUBLE_EQ(r.row("castle").sem_m, 0.0);
  EXPECT_DOUBLE_EQ(r.row("pawn").freq_l, 1.0);
  EXPECT_DOUBLE_EQ(r.row("king").freq_m, 1.0);
  EXPECT_EQ(r.rows.size(), 11u);
}

TEST(Humanlikeness, SwappedSetsGiveIdenticalColumns) {
  std::vector<RecommendationPair> pairs;
  for (const auto& p : rl_fixtures::random_game_positions(40, 15)) {
    const auto legal = chess::legal_moves(p);
    if (legal.size() < 2) continue;
    pairs.push_back({p, legal.front(), legal.back()});
    pairs.push_back({p, legal.back(), legal.front()});
  }
  const auto r = humanlikeness_report(pairs);
  for (const auto& row : r.rows) {
    EXPECT_DOUBLE_EQ(row.freq_m, row.freq_l);
    EXPECT_DOUBLE_EQ(row.sem_m, row.sem_l);
  }
}

TEST(Humanlikeness, RejectsAgreementsAndEmptyInput) {
  const Position p = Position::start();
  const std::vector<RecommendationPair> same{{p, chess::parse_uci(p, "e2e4"), chess::parse_uci(p, "e2e4")}};
  EXPECT_THROW(humanlikeness_report(same), PreconditionError);
  EXPECT_THROW(humanlikeness_report({}), PreconditionError);
}

TEST(Plots, BoxAndBarSvg) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 100};
  const std::string box = svg::box_plot({{"a<b", box_summary(x)}, {"c", box_summary(std::vector<double>{2, 3})}}, "t");
  EXPECT_EQ(box.rfind("<svg", 0), 0u);
  EXPECT_NE(box.find("</svg>"), std::string::npos);
  EXPECT_NE(box.find("a&lt;b"), std::string::npos);
  EXPECT_NE(box.find("<circle"), std::string::npos);  // the outlier
  const std::string bar = svg::bar_plot({{"random", 0.45, 0.01}, {"expert", 0.55, 0.01}}, "WDL",
                                        std::pair<std::string, double>{"solo", 0.4});
  EXPECT_NE(bar.find("stroke-dasharray"), std::string::npos);
  EXPECT_EQ(bar, svg::bar_plot({{"random", 0.45, 0.01}, {"expert", 0.55, 0.01}}, "WDL",
                               std::pair<std::string, double>{"solo", 0.4}));
}
