#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "centaur/chess.hpp"
#include "centaur/uci/stub_script.hpp"
#include "centaur/uci/uci_engine.hpp"

using namespace centaur;
using namespace centaur::uci;
using chess::Position;
using chess::sq;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("centaur_uci_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_script(const std::string& name, const nlohmann::json& j) {
  const fs::path p = temp_dir() / (name + ".json");
  std::ofstream(p) << j.dump(2);
  return p.string();
}

EngineConfig stub_config(const std::string& script_path, const std::string& name = "stub") {
  EngineConfig c;
  c.name = name;
  c.executable = CENTAUR_STUB_ENGINE;
  c.args = {script_path};
  c.limit = SearchLimit::depth(1);
  c.handshake_timeout = std::chrono::milliseconds(5000);
  c.search_timeout = std::chrono::milliseconds(5000);
  return c;
}

std::string start_key() { return fen_key(Position::start()); }

chess::Move mv(const Position& p, const std::string& uci) { return chess::parse_uci(p, uci); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(UciEngine, ScriptedBestMoveOnStartPosition) {
  UciEngine e(stub_config(write_script("e4", {{"moves", {{start_key(), "e2e4"}}}})));
  EXPECT_EQ(e.best_move(Position::start()).uci(), "e2e4");
  EXPECT_EQ(e.state(), UciEngine::State::Ready);
}

TEST(UciEngine, ScoresReturnedInRequestOrder) {
  const Position p = Position::start();
  UciEngine e(stub_config(write_script("scores", {{"scores", {{start_key(), {{"e2e4", 30}, {"a2a3", -15}}}}}})));
  const std::vector<chess::Move> req = {mv(p, "e2e4"), mv(p, "a2a3")};
  const auto out = e.score_moves(p, req);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].move.uci(), "e2e4");
  EXPECT_EQ(out[0].score, Score::cp(30));
  EXPECT_EQ(out[1].move.uci(), "a2a3");
  EXPECT_EQ(out[1].score, Score::cp(-15));

  const std::vector<chess::Move> rev = {mv(p, "a2a3"), mv(p, "e2e4")};
  const auto back = e.score_moves(p, rev);
  EXPECT_EQ(back[0].score, Score::cp(-15));
  EXPECT_EQ(back[1].score, Score::cp(30));

  const std::vector<chess::Move> one = {mv(p, "a2a3")};
  ASSERT_EQ(e.score_moves(p, one).size(), 1u);
}

TEST(UciEngine, MateScoresParsed) {
  const Position p = Position::from_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
  UciEngine e(stub_config(write_script("mate", {{"policy", {"mate", "first"}}})));
  EXPECT_EQ(e.best_move(p).uci(), "a1a8");
  const std::vector<chess::Move> req = {mv(p, "a1a8"), mv(p, "a1a2")};
  const auto out = e.score_moves(p, req);
  EXPECT_EQ(out[0].score, Score::mate(1));
  EXPECT_EQ(out[1].score.kind, Score::Kind::Centipawns);
  EXPECT_GT(out[0].score, out[1].score);
}

TEST(UciEngine, ScoreMovesRejectsIllegalRequest) {
  const Position p = Position::start();
  UciEngine e(stub_config(write_script("plain", nlohmann::json::object())));
  const std::vector<chess::Move> req = {chess::Move{sq("e2"), sq("e5"), std::nullopt, {}}};
  EXPECT_THROW(e.score_moves(p, req), PreconditionError);
  EXPECT_EQ(e.state(), UciEngine::State::Ready);
}

TEST(UciEngine, BestMoveOnTerminalPositionIsPrecondition) {
  UciEngine e(stub_config(write_script("plain", nlohmann::json::object())));
  const Position mated = Position::from_fen("R5k1/5ppp/8/8/8/8/8/6K1 b - - 1 1");
  const Position stalemate = Position::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1");
  EXPECT_THROW(e.best_move(mated), PreconditionError);
  EXPECT_THROW(e.best_move(stalemate), PreconditionError);
}

TEST(UciEngine, IllegalBestMoveIsProtocolError) {
  UciEngine e(stub_config(write_script("illegal", {{"raw_moves", {{start_key(), "e2e5"}}}})));
  EXPECT_THROW(e.best_move(Position::start()), ProtocolError);
  UciEngine g(stub_config(write_script("garbage", {{"raw_moves", {{start_key(), "zz"}}}})));
  EXPECT_THROW(g.best_move(Position::start()), ProtocolError);
}

TEST(UciEngine, NonexistentExecutableFailsToStart) {
  EngineConfig c = stub_config("unused");
  c.executable = "/nonexistent/engine";
  try {
    UciEngine e(c);
    FAIL() << "expected EngineError";
  } catch (const EngineError& err) {
    EXPECT_NE(std::string(err.what()).find("failed to start"), std::string::npos);
  }
}

TEST(UciEngine, UnadvertisedOptionRejected) {
  EngineConfig c = stub_config(write_script("noopts", nlohmann::json::object()));
  c.options = {{"Hash", "16"}};
  EXPECT_THROW({ UciEngine e(c); }, EngineError);

  EngineConfig ok = stub_config(write_script("seedopt", {{"options", {"Seed"}}}));
  ok.options = {{"Seed", "7"}};
  UciEngine e(ok);
  EXPECT_TRUE(e.advertises("Seed"));
}

TEST(UciEngine, HandshakeTimeoutOnSilentProcess) {
  EngineConfig c;
  c.name = "silent";
  c.executable = "/bin/sleep";
  c.args = {"30"};
  c.handshake_timeout = std::chrono::milliseconds(200);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW({ UciEngine e(c); }, EngineError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(5));
}

TEST(UciEngine, InvalidLimitRejectedBeforeSpawn) {
  EngineConfig c = stub_config("unused");
  c.limit = SearchLimit::depth(0);
  EXPECT_THROW({ UciEngine e(c); }, PreconditionError);
}

TEST(UciEngine, CrashMidSearchCarriesTranscript) {
  UciEngine e(stub_config(write_script("crash", {{"crash_on", start_key()}})));
  try {
    e.best_move(Position::start());
    FAIL() << "expected EngineError";
  } catch (const ProtocolError&) {
    FAIL() << "crash must not be reported as a protocol error";
  } catch (const EngineError& err) {
    const std::string what = err.what();
    EXPECT_NE(what.find("transcript tail"), std::string::npos);
    EXPECT_NE(what.find("> go depth 1"), std::string::npos);
  }
  EXPECT_EQ(e.state(), UciEngine::State::Dead);
  EXPECT_THROW(e.best_move(Position::start()), EngineError);
  e.shutdown();
  e.shutdown();
  EXPECT_EQ(e.state(), UciEngine::State::Closed);
}

TEST(UciEngine, SearchTimeoutKillsEngine) {
  EngineConfig c = stub_config(write_script("hang", {{"hang_on", start_key()}}));
  c.search_timeout = std::chrono::milliseconds(200);
  UciEngine e(c);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(e.best_move(Position::start()), EngineError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(5));
  EXPECT_EQ(e.state(), UciEngine::State::Dead);
}

TEST(UciEngine, ShutdownIsIdempotent) {
  UciEngine e(stub_config(write_script("plain", nlohmann::json::object())));
  e.new_game();
  e.shutdown();
  EXPECT_NO_THROW(e.shutdown());
  EXPECT_EQ(e.state(), UciEngine::State::Closed);
  EXPECT_THROW(e.best_move(Position::start()), EngineError);
}

TEST(UciEngine, TranscriptIsDeterministic) {
  const std::string script = write_script("det", {{"policy", {"random"}}, {"options", {"Seed"}}});
  auto run = [&](const std::string& tag) {
    EngineConfig c = stub_config(script);
    c.transcript_path = (temp_dir() / ("transcript_" + tag + ".log")).string();
    fs::remove(c.transcript_path);
    UciEngine e(c);
    Position p = Position::start();
    for (int i = 0; i < 6; ++i) {
      e.new_game();
      p = chess::apply_move(p, e.best_move(p, 1000 + i));
    }
    e.shutdown();
    return slurp(c.transcript_path);
  };
  const std::string a = run("a"), b = run("b");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("> setoption name Seed value 1000"), std::string::npos);
}

TEST(UciEngine, SeedChangesRandomPolicy) {
  UciEngine e(stub_config(write_script("rnd", {{"policy", {"random"}}, {"options", {"Seed"}}})));
  const Position p = Position::start();
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::string first = e.best_move(p, s).uci();
    EXPECT_EQ(e.best_move(p, s).uci(), first);
    seen.insert(first);
  }
  EXPECT_GT(seen.size(), 3u);
}

TEST(UciEngine, InfoScoreParsing) {
  EXPECT_EQ(parse_info_score("info depth 12 seldepth 14 score cp -37 nodes 100 pv e2e4"), Score::cp(-37));
  EXPECT_EQ(parse_info_score("info depth 3 score mate -2 pv h7h8"), Score::mate(-2));
  EXPECT_FALSE(parse_info_score("info string hello"));
  EXPECT_FALSE(parse_info_score("bestmove e2e4"));
}

TEST(Score, TotalOrder) {
  const std::vector<Score> ascending = {Score::mate(-1), Score::mate(-5), Score::cp(-900), Score::cp(0),
                                        Score::cp(31), Score::cp(5000), Score::mate(7), Score::mate(2),
                                        Score::mate(1)};
  for (std::size_t i = 0; i + 1 < ascending.size(); ++i)
    EXPECT_LT(ascending[i], ascending[i + 1]) << ascending[i].uci() << " vs " << ascending[i + 1].uci();
}

TEST(ScriptedEngine, MatchesSubprocessStub) {
  const nlohmann::json j = {{"policy", {"capture", "check", "random"}}, {"options", {"Seed"}}};
  EngineConfig cfg;
  cfg.name = "scripted";
  ScriptedEngine in_proc(cfg, StubScript::from_json(j));
  UciEngine out_proc(stub_config(write_script("cmp", j)));
  Rng rng(42);
  Position p = Position::start();
  for (int ply = 0; ply < 60 && !chess::legal_moves(p).empty(); ++ply) {
    const std::uint64_t seed = rng();
    const chess::Move a = in_proc.best_move(p, seed);
    EXPECT_EQ(a.uci(), out_proc.best_move(p, seed).uci()) << p.fen();
    const auto legal = chess::legal_moves(p);
    const std::vector<chess::Move> req(legal.begin(), legal.begin() + std::min<std::size_t>(3, legal.size()));
    const auto sa = in_proc.score_moves(p, req), sb = out_proc.score_moves(p, req);
    for (std::size_t i = 0; i < req.size(); ++i) EXPECT_EQ(sa[i].score, sb[i].score);
    p = chess::apply_move(p, a);
  }
  EXPECT_EQ(in_proc.best_move_calls(), 60);
}

// Runs only when a real engine binary is supplied.
TEST(UciEngine, RealEngineFindsMateInOne) {
  const char* exe = std::getenv("CENTAUR_REAL_ENGINE");
  if (!exe || !*exe) GTEST_SKIP() << "CENTAUR_REAL_ENGINE not set";
  EngineConfig c;
  c.name = "real";
  c.executable = exe;
  c.limit = SearchLimit::depth(5);
  UciEngine e(c);
  const Position p = Position::from_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
  EXPECT_EQ(e.best_move(p).uci(), "a1a8");
  // Qd7+ hangs the queen to the king; Qd2 keeps it.
  const Position q = Position::from_fen("4k3/8/8/8/8/8/8/3QK3 w - - 0 1");
  const std::vector<chess::Move> req = {mv(q, "d1d7"), mv(q, "d1d2")};
  const auto out = e.score_moves(q, req);
  EXPECT_LT(out[0].score, out[1].score);
}
