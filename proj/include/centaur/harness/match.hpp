#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "centaur/analysis/stats.hpp"
#include "centaur/harness/config.hpp"
#include "centaur/harness/openings.hpp"
#include "centaur/rl/manager.hpp"
#include "centaur/team/game.hpp"
#include "centaur/team/oracle.hpp"
#include "centaur/team/pgn.hpp"

namespace centaur::harness {

/// Models loaded once per run and shared read-only by every worker.
struct LoadedModels {
  std::shared_ptr<const rl::ManagerModel> transformer;
  std::shared_ptr<const rl::FeatureModel> feature;

  static LoadedModels for_spec(const team::ManagerSpec& s) {
    LoadedModels out;
    if (s.kind == team::ManagerSpec::Kind::Model)
      out.transformer = std::make_shared<const rl::ManagerModel>(rl::ManagerModel::load(s.model));
    if (s.kind == team::ManagerSpec::Kind::FeatureModel)
      out.feature = std::make_shared<const rl::FeatureModel>(rl::FeatureModel::load(s.model));
    return out;
  }
};

/// The engine handles of one worker (or one interactive session).
struct EngineSet {
  std::unique_ptr<uci::Engine> m, l, adversary, expert;

  static EngineSet spawn(const ExperimentConfig& cfg) {
    EngineSet s;
    if (cfg.m && (!cfg.solo || *cfg.solo == team::Member::M)) s.m = make_engine(*cfg.m);
    if (cfg.l && (!cfg.solo || *cfg.solo == team::Member::L)) s.l = make_engine(*cfg.l);
    s.adversary = make_engine(*cfg.adversary);
    if (!cfg.solo && cfg.manager.kind == team::ManagerSpec::Kind::Expert) s.expert = make_engine(*cfg.expert);
    return s;
  }

  void new_game() {
    for (auto* e : {m.get(), l.get(), adversary.get(), expert.get()})
      if (e) e->new_game();
  }

  void shutdown() {
    for (auto* e : {m.get(), l.get(), adversary.get(), expert.get()})
      if (e) e->shutdown();
  }
};

/// Concrete manager for a spec. Human specs are rejected here; sessions
/// supply their own callback manager.
inline std::unique_ptr<team::Manager> build_manager(const team::ManagerSpec& spec, EngineSet& engines,
                                                    const LoadedModels& models, const team::PlayOptions& play) {
  using Kind = team::ManagerSpec::Kind;
  switch (spec.kind) {
    case Kind::Random: return std::make_unique<team::RandomManager>(spec.p);
    case Kind::Fixed: return std::make_unique<team::FixedManager>(spec.member);
    case Kind::Expert: return std::make_unique<team::ExpertManager>(*engines.expert);
    case Kind::Oracle:
      return std::make_unique<team::OracleManager>(spec.member == team::Member::M ? *engines.m : *engines.l,
                                                   *engines.adversary, spec.member, spec.rollouts, play);
    case Kind::Model: return std::make_unique<rl::ModelManager>(models.transformer, spec.tau, spec.id());
    case Kind::FeatureModel: return std::make_unique<rl::FeatureModelManager>(models.feature, spec.tau, spec.id());
    case Kind::Human: break;
  }
  throw PreconditionError("manager " + spec.id() + " cannot run unattended");
}

/// The openings a run plays: the chosen set, optionally cut to `count`
/// openings picked by a seeded permutation and kept in file order.
struct SelectedOpenings {
  OpeningSet set;
  std::vector<std::size_t> indices;
};

inline SelectedOpenings select_openings(const ExperimentConfig& cfg) {
  const auto& o = cfg.openings;
  if (o.path.empty()) throw PreconditionError(cfg.name + ": no openings path");
  OpeningSet train = ingest_openings(o.path);
  std::optional<OpeningSet> test;
  if (!o.test_path.empty()) {
    test = ingest_openings(o.test_path);
    require_disjoint(train, *test);
  }
  if (o.use == OpeningsConfig::Use::Test && !test) throw PreconditionError(cfg.name + ": openings.use = test without test_path");
  SelectedOpenings s{o.use == OpeningsConfig::Use::Test ? std::move(*test) : std::move(train), {}};
  const std::size_t n = s.set.size();
  if (o.count > n)
    throw PreconditionError(cfg.name + ": " + std::to_string(o.count) + " openings requested, " + s.set.source +
                            " has " + std::to_string(n));
  s.indices.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.indices[i] = i;
  if (o.count > 0 && o.count < n) {
    Rng rng(derive_seed(cfg.seed, fnv1a("openings")));
    shuffle_in_place(s.indices, rng);
    s.indices.resize(o.count);
    std::sort(s.indices.begin(), s.indices.end());
  }
  return s;
}

struct RunOptions {
  /// Directory name prefix; defaults to the current UTC time. Fix it to get
  /// identical run directories.
  std::optional<std::string> timestamp;
  bool write_artifacts = true;
  std::ostream* log = nullptr;  // progress lines, in addition to run.log
};

struct MatchResult {
  std::string name;
  std::string config_hash;
  std::string openings_hash;
  analysis::MatchSummary summary;
  team::ChoiceDistribution choices;
  std::vector<team::GameRecord> games;
  std::size_t aborted = 0;
  bool valid = true;  // false when more than 10% of games aborted
  std::filesystem::path run_dir;

  double abort_rate() const {
    return games.empty() ? 0.0 : static_cast<double>(aborted) / static_cast<double>(games.size());
  }

  nlohmann::json to_json() const {
    nlohmann::json ch{{"first", choices.first}, {"second", choices.second}, {"indifferent", choices.indifferent}};
    ch["share_m"] = choices.defined() ? nlohmann::json(choices.share_m()) : nlohmann::json(nullptr);
    return {{"name", name},
            {"config_hash", config_hash},
            {"openings_hash", openings_hash},
            {"games_total", games.size()},
            {"aborted", aborted},
            {"abort_rate", abort_rate()},
            {"valid", valid},
            {"summary", summary.to_json()},
            {"choices", ch}};
  }
};

inline constexpr double kMaxAbortRate = 0.10;

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

namespace detail {

struct GameJob {
  std::size_t index;
  std::size_t opening;  // index into the opening set
  chess::Color team_color;
};

inline std::vector<GameJob> game_jobs(const SelectedOpenings& sel, bool both_colors) {
  std::vector<GameJob> jobs;
  for (std::size_t i : sel.indices) {
    jobs.push_back({jobs.size(), i, chess::Color::White});
    if (both_colors) jobs.push_back({jobs.size(), i, chess::Color::Black});
  }
  return jobs;
}

inline std::filesystem::path fresh_dir(const std::filesystem::path& base) {
  std::filesystem::path p = base;
  for (int k = 2; std::filesystem::exists(p); ++k) p = base.string() + "-" + std::to_string(k);
  std::filesystem::create_directories(p);
  return p;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream o(p, std::ios::binary | std::ios::trunc);
  if (!o) throw Error("cannot write " + p.string());
  return o;
}

inline std::string log_line(const team::GameRecord& g) {
  std::string s = g.game_id + " opening=" + g.opening_id + " team=" +
                  (g.team_color == chess::Color::White ? "white" : "black");
  if (g.aborted) return s + " ABORTED: " + g.abort_reason;
  return s + " result=" + std::string(chess::to_string(g.outcome.result)) + " (" +
         std::string(chess::to_string(g.outcome.termination)) + ") plies=" + std::to_string(g.moves.size()) +
         " decisions=" + std::to_string(g.decisions.size());
}

}  // namespace detail

/// Plays every (opening, colour) game of `cfg`. Game i uses seed
/// derive_seed(cfg.seed, i), so results do not depend on the worker count
/// when the engines are deterministic. Workers own their engine handles and
/// respawn them after an aborted game; one collector writes artifacts in
/// game order.
inline MatchResult run_match(const ExperimentConfig& cfg, const RunOptions& ro = {}) {
  cfg.validate();
  const SelectedOpenings sel = select_openings(cfg);
  const auto jobs = detail::game_jobs(sel, cfg.both_colors);
  const LoadedModels models = cfg.solo ? LoadedModels{} : LoadedModels::for_spec(cfg.manager);
  const team::PlayOptions play = cfg.play_options();

  MatchResult res;
  res.name = cfg.name;
  res.config_hash = cfg.hash();
  res.openings_hash = sel.set.content_hash;

  std::ofstream pgn, games_jsonl, decisions_jsonl, log;
  if (ro.write_artifacts) {
    res.run_dir = detail::fresh_dir(std::filesystem::path(cfg.output_dir) /
                                    (ro.timestamp.value_or(utc_timestamp()) + "-" + res.config_hash));
    detail::open_out(res.run_dir / "config.json") << cfg.to_json().dump(2) << "\n";
    detail::open_out(res.run_dir / "openings.json") << sel.set.summary_json().dump(2) << "\n";
    pgn = detail::open_out(res.run_dir / "games.pgn");
    games_jsonl = detail::open_out(res.run_dir / "games.jsonl");
    decisions_jsonl = detail::open_out(res.run_dir / "decisions.jsonl");
    log = detail::open_out(res.run_dir / "run.log");
  }
  auto say = [&](const std::string& line) {
    if (log.is_open()) log << line << "\n";
    if (ro.log) *ro.log << line << "\n";
  };
  say("run " + cfg.name + " config=" + res.config_hash + " openings=" + sel.set.content_hash + " games=" +
      std::to_string(jobs.size()) + " seed=" + std::to_string(cfg.seed));

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::size_t, team::GameRecord> done;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    std::optional<EngineSet> engines;
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) break;
      const auto& job = jobs[k];
      const chess::Position& opening = sel.set.positions[job.opening];
      const std::uint64_t seed = derive_seed(cfg.seed, job.index);
      const std::string game_id = "game-" + std::to_string(job.index);
      team::GameRecord g;
      try {
        if (!engines) engines = EngineSet::spawn(cfg);
        engines->new_game();
        std::unique_ptr<team::Manager> mgr;
        std::unique_ptr<team::Side> side;
        if (cfg.solo) {
          side = std::make_unique<team::SoloSide>(*cfg.solo == team::Member::M ? *engines->m : *engines->l);
        } else {
          mgr = build_manager(cfg.manager, *engines, models, play);
          side = std::make_unique<team::TeamSide>(*engines->m, *engines->l, *mgr);
        }
        g = team::play_game(opening, *side, *engines->adversary, job.team_color, seed, play, game_id,
                            sel.set.ids[job.opening]);
      } catch (const std::exception& e) {
        g.game_id = game_id;
        g.opening_id = sel.set.ids[job.opening];
        g.opening_fen = opening.fen();
        g.team_color = job.team_color;
        g.seed = seed;
        g.aborted = true;
        g.abort_reason = e.what();
      }
      g.index = job.index;
      if (g.aborted) engines.reset();
      {
        std::lock_guard lk(mu);
        done.emplace(job.index, std::move(g));
      }
      cv.notify_one();
    }
    if (engines) engines->shutdown();
  };

  const int nworkers = std::max(1, std::min<int>(cfg.effective_workers(), static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);

  res.games.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    team::GameRecord g;
    {
      std::unique_lock lk(mu);
      cv.wait(lk, [&] { return done.count(i) > 0; });
      g = std::move(done.at(i));
      done.erase(i);
    }
    if (ro.write_artifacts) {
      pgn << team::to_pgn(g) << "\n";
      games_jsonl << g.to_json().dump() << "\n";
      decisions_jsonl << team::decisions_jsonl(g);
    }
    say(detail::log_line(g));
    res.summary.add(g);
    if (g.aborted) ++res.aborted;
    res.games.push_back(std::move(g));
  }
  for (auto& t : pool) t.join();

  for (const auto& g : res.games)
    if (!g.aborted) {
      res.summary.team = g.team_label;
      res.summary.adversary = g.adversary_label;
      break;
    }
  res.summary.opening_set = sel.set.content_hash;
  std::vector<team::DecisionRecord> all;
  for (const auto& g : res.games) all.insert(all.end(), g.decisions.begin(), g.decisions.end());
  res.choices = team::choice_distribution(all);
  res.valid = res.abort_rate() <= kMaxAbortRate;
  say("done: " + std::to_string(res.summary.games()) + " scored, " + std::to_string(res.aborted) + " aborted" +
      (res.valid ? "" : "; RUN INVALID (abort rate above 10%)"));
  if (ro.write_artifacts) detail::open_out(res.run_dir / "summary.json") << res.to_json().dump(2) << "\n";
  return res;
}

}  // namespace centaur::harness
