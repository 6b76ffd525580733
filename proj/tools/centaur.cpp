// Command-line front end: matches, baselines, manager training, probes,
// distillation, run statistics and the session service.

#include <iostream>

#include <CLI11.hpp>

#include "centaur/analysis/plots.hpp"
#include "centaur/analysis/probes.hpp"
#include "centaur/analysis/tables.hpp"
#include "centaur/harness/artifacts.hpp"
#include "centaur/harness/recipes.hpp"
#include "centaur/harness/server.hpp"
#include "centaur/rl/distill.hpp"

using namespace centaur;
using nlohmann::json;

namespace {

struct ConfigArgs {
  std::string config, recipe, output_dir, timestamp;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers, max_plies;
  std::optional<std::size_t> count;
  bool one_color = false;

  void add(CLI::App* app) {
    auto* c = app->add_option("-c,--config", config, "experiment config (JSON)");
    app->add_option("-r,--recipe", recipe, "named preset instead of a config file")->excludes(c);
    app->add_option("--seed", seed, "master seed override");
    app->add_option("--workers", workers, "worker threads (default: CPUs - 1)");
    app->add_option("--output-dir", output_dir, "results directory override");
    app->add_option("--count", count, "number of openings to play");
    app->add_option("--max-plies", max_plies, "adjudication cap override");
    app->add_flag("--one-color", one_color, "play each opening once, team as White");
    app->add_option("--timestamp", timestamp, "run directory prefix (default: current UTC time)");
  }

  harness::ExperimentConfig load() const {
    if (config.empty() && recipe.empty()) throw PreconditionError("give --config or --recipe");
    harness::ExperimentConfig c = config.empty() ? harness::recipe(recipe).config : harness::load_config(config);
    if (seed) c.seed = *seed;
    if (workers) c.workers = *workers;
    if (!output_dir.empty()) c.output_dir = output_dir;
    if (count) c.openings.count = *count;
    if (max_plies) c.max_plies = *max_plies;
    if (one_color) c.both_colors = false;
    return c;
  }

  harness::RunOptions run_options() const {
    harness::RunOptions o;
    if (!timestamp.empty()) o.timestamp = timestamp;
    o.log = &std::cerr;
    return o;
  }
};

int report_match(const harness::MatchResult& r) {
  std::cout << r.to_json().dump(2) << "\n";
  if (!r.run_dir.empty()) std::cerr << "artifacts: " << r.run_dir.string() << "\n";
  return r.valid ? 0 : 3;
}

/// Positions from a decisions.jsonl (decision points of played games) or
/// from an EPD/FEN file.
struct PositionSource {
  std::string decisions, positions;

  void add(CLI::App* app) {
    auto* d = app->add_option("--decisions", decisions, "decisions.jsonl of a run (decision points)");
    app->add_option("--positions", positions, "EPD/FEN file of positions")->excludes(d);
  }

  std::vector<chess::Position> load(std::vector<team::DecisionRecord>* records = nullptr) const {
    std::vector<chess::Position> out;
    if (!decisions.empty()) {
      auto ds = harness::read_decisions(decisions);
      for (const auto& d : ds) out.push_back(chess::Position::from_fen(d.fen));
      if (records) *records = std::move(ds);
    } else if (!positions.empty()) {
      out = harness::ingest_openings(positions).positions;
    } else {
      throw PreconditionError("give --decisions or --positions");
    }
    return out;
  }
};

void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream o(p, std::ios::binary);
  if (!o) throw Error("cannot write " + p.string());
  o << s;
}

void write_probe(const std::filesystem::path& dir, const analysis::ProbeReport& r) {
  write_file(dir / (r.probe + ".json"), r.to_json().dump(2) + "\n");
  write_file(dir / (r.probe + ".csv"), r.csv());
  std::vector<std::pair<std::string, analysis::BoxSummary>> boxes;
  for (const auto& c : r.conditions)
    for (const auto& g : c.groups) boxes.emplace_back(c.name + ":" + g.name, g.box);
  write_file(dir / (r.probe + ".svg"), analysis::svg::box_plot(boxes, "CLS attention: " + r.probe));
  for (const auto& c : r.conditions)
    for (const auto& cmp : c.comparisons)
      std::cout << r.probe << " [" << c.name << "] " << cmp.a << " vs " << cmp.b << ": A_w=" << cmp.effect.a_w
                << " higher=" << analysis::EffectReport::to_string(cmp.effect.higher) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"centaur: managed two-engine chess teams"};
  app.require_subcommand(1);

  ConfigArgs play_args;
  auto* play = app.add_subcommand("play", "run a match and write its artifacts");
  play_args.add(play);

  ConfigArgs base_args;
  std::string member = "M";
  auto* baseline = app.add_subcommand("baseline", "one team member alone against the adversary");
  base_args.add(baseline);
  baseline->add_option("--member", member, "M or L")->check(CLI::IsMember({"M", "L"}));

  ConfigArgs train_args;
  std::optional<int> iterations, games, rollouts;
  std::string train_out;
  auto* train = app.add_subcommand("train-manager", "policy iteration for the transformer manager");
  train_args.add(train);
  train->add_option("--iterations", iterations, "N");
  train->add_option("--games", games, "games per iteration");
  train->add_option("--rollouts", rollouts, "rollouts per recommendation (K)");
  train->add_option("--out", train_out, "artifact directory");

  std::string model_path, explain_out = "explain", probe = "all", explain_config;
  std::size_t min_positions = 1000;
  std::uint64_t probe_seed = 0;
  double tau = 0.0;
  PositionSource explain_src;
  auto* explain = app.add_subcommand("explain", "attention probes and feature tables for a trained manager");
  explain->add_option("--model", model_path, "manager checkpoint")->required();
  explain_src.add(explain);
  explain->add_option("--probe", probe, "pieces | attacked | moves | tables | all")
      ->check(CLI::IsMember({"pieces", "attacked", "moves", "tables", "all"}));
  explain->add_option("--config", explain_config, "config with engines m, l, third_party (moves probe)");
  explain->add_option("--min-positions", min_positions, "refuse probes over fewer positions");
  explain->add_option("--seed", probe_seed, "shuffles, random moves and the untrained network");
  explain->add_option("--tau", tau, "indifference threshold for the feature table");
  explain->add_option("--out", explain_out, "output directory");

  std::string distill_model, distill_out = "student.ckpt";
  std::vector<int> hidden = std::vector<int>(20, 256);
  int distill_epochs = 20;
  double distill_lr = 1e-3;
  PositionSource distill_src;
  auto* distill = app.add_subcommand("distill", "fit a feature-input student to a manager's choices");
  distill->add_option("--model", distill_model, "teacher checkpoint")->required();
  distill_src.add(distill);
  distill->add_option("--hidden", hidden, "hidden layer widths (none: logistic)");
  distill->add_option("--epochs", distill_epochs, "training epochs");
  distill->add_option("--lr", distill_lr, "Adam learning rate");
  distill->add_option("--tau", tau, "teacher indifference threshold");
  distill->add_option("--out", distill_out, "student checkpoint path");

  std::vector<std::string> runs;
  std::string stats_svg;
  auto* stats = app.add_subcommand("stats", "recompute summaries of runs; compare against the first");
  stats->add_option("runs", runs, "run directories")->required();
  stats->add_option("--svg", stats_svg, "bar plot of WDL with SEM error bars");

  ConfigArgs serve_args;
  std::string address = "127.0.0.1";
  unsigned short port = 8080;
  int threads = 4;
  bool no_persist = false;
  auto* serve = app.add_subcommand("serve", "HTTP and WebSocket service for human-managed games");
  serve_args.add(serve);
  serve->add_option("--address", address, "bind address");
  serve->add_option("--port", port, "port (0: ephemeral)");
  serve->add_option("--threads", threads, "I/O threads");
  serve->add_flag("--no-persist", no_persist, "do not write finished sessions");

  std::string show;
  auto* recipes = app.add_subcommand("recipes", "list presets, or print one as a config file");
  recipes->add_option("--show", show, "preset name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*play) return report_match(harness::run_match(play_args.load(), play_args.run_options()));

    if (*baseline) {
      auto cfg = base_args.load();
      cfg.solo = team::member_from_string(member);
      cfg.manager = team::ManagerSpec::fixed(*cfg.solo);
      return report_match(harness::run_match(cfg, base_args.run_options()));
    }

    if (*train) {
      auto cfg = train_args.load();
      auto pi = cfg.policy_iteration.value_or(rl::PolicyIterationConfig{});
      if (iterations) pi.iterations = *iterations;
      if (games) pi.games_per_iteration = *games;
      if (rollouts) pi.rollouts = *rollouts;
      if (!train_out.empty()) pi.out_dir = train_out;
      if (pi.out_dir.empty()) pi.out_dir = cfg.output_dir + "/train-" + cfg.hash();
      pi.seed = cfg.seed;
      pi.play = cfg.play_options();
      cfg.openings.use = harness::OpeningsConfig::Use::Train;
      const auto sel = harness::select_openings(cfg);
      std::vector<chess::Position> openings;
      for (auto i : sel.indices) openings.push_back(sel.set.positions[i]);
      if (!cfg.m || !cfg.l || !cfg.adversary) throw PreconditionError("train-manager needs engines m, l, adversary");
      auto m = harness::make_engine(*cfg.m), l = harness::make_engine(*cfg.l), adv = harness::make_engine(*cfg.adversary);
      const auto res = rl::policy_iteration(pi, *m, *l, *adv, openings, &std::cerr);
      json metrics = json::array();
      for (const auto& it : res.metrics) metrics.push_back(it.to_json());
      std::cout << metrics.dump(2) << "\n";
      if (!res.models.empty() && res.models.back()) {
        const auto final_path = std::filesystem::path(pi.out_dir) / "final.ckpt";
        res.models.back()->save(final_path.string());
        std::cerr << "final model: " << final_path.string() << "\n";
      }
      return 0;
    }

    if (*explain) {
      auto model = std::make_shared<const rl::ManagerModel>(rl::ManagerModel::load(model_path));
      std::vector<team::DecisionRecord> records;
      const auto positions = explain_src.load(&records);
      std::filesystem::create_directories(explain_out);
      analysis::ProbeOptions opt;
      opt.min_positions = min_positions;
      opt.seed = probe_seed;
      const auto src = analysis::probe_sources(model, derive_seed(probe_seed, 1));
      const bool all = probe == "all";
      if (all || probe == "pieces") write_probe(explain_out, analysis::attention_probe_pieces(src, positions, opt));
      if (all || probe == "attacked") write_probe(explain_out, analysis::attention_probe_attacked(src, positions, opt));
      if (probe == "moves" || (all && !explain_config.empty())) {
        if (explain_config.empty()) throw PreconditionError("the moves probe needs --config with engines");
        const auto cfg = harness::load_config(explain_config);
        if (!cfg.m || !cfg.l || !cfg.third_party) throw PreconditionError("config needs engines m, l, third_party");
        auto m = harness::make_engine(*cfg.m), l = harness::make_engine(*cfg.l);
        auto third = harness::make_engine(*cfg.third_party);
        const auto items = analysis::gather_move_probe_items(positions, *m, *l, *third, probe_seed);
        write_probe(explain_out, analysis::attention_probe_moves(src, items, opt));
      }
      if (all || probe == "tables") {
        std::vector<std::pair<chess::Position, team::Member>> chosen;
        for (const auto& p : positions) {
          const auto c = rl::choice_from_logits(model->logits(chess::tokenize(p)), tau);
          if (c != team::Choice::Indifferent)
            chosen.emplace_back(p, c == team::Choice::First ? team::Member::M : team::Member::L);
        }
        if (!chosen.empty()) {
          const auto t = analysis::feature_preference_table(chosen);
          write_file(std::filesystem::path(explain_out) / "feature_preferences.csv", t.csv());
          write_file(std::filesystem::path(explain_out) / "feature_preferences.json", t.to_json().dump(2) + "\n");
          std::cout << t.csv();
        }
        std::vector<analysis::RecommendationPair> pairs;
        for (const auto& d : records) pairs.push_back({chess::Position::from_fen(d.fen), d.rec_m, d.rec_l});
        if (!pairs.empty()) {
          const auto h = analysis::humanlikeness_report(pairs);
          write_file(std::filesystem::path(explain_out) / "humanlikeness.csv", h.csv());
          write_file(std::filesystem::path(explain_out) / "humanlikeness.json", h.to_json().dump(2) + "\n");
        }
      }
      std::cerr << "written to " << explain_out << "\n";
      return 0;
    }

    if (*distill) {
      const auto teacher = rl::ManagerModel::load(distill_model);
      const auto positions = distill_src.load();
      rl::FeatureModel::Hyper h;
      h.hidden = hidden;
      rl::TrainOptions opt;
      opt.epochs = distill_epochs;
      opt.lr = distill_lr;
      const auto r = rl::distill(teacher, positions, h, opt, tau);
      r.student.save(distill_out);
      std::cout << json{{"rows", r.rows},
                        {"excluded_indifferent", r.excluded_indifferent},
                        {"agreement_train", r.agreement_train},
                        {"agreement_holdout", std::isnan(r.agreement_holdout) ? json(nullptr) : json(r.agreement_holdout)},
                        {"student", distill_out}}
                       .dump(2)
                << "\n";
      return 0;
    }

    if (*stats) {
      std::vector<analysis::MatchSummary> sums;
      json out = json::array();
      std::vector<analysis::svg::Bar> bars;
      for (const auto& r : runs) {
        const std::filesystem::path dir(r);
        auto s = harness::summary_from_games(dir / "games.jsonl");
        if (std::ifstream oj(dir / "openings.json"); oj)
          s.opening_set = json::parse(oj).value("content_hash", std::string());
        json j = s.to_json();
        j["run"] = r;
        if (std::filesystem::exists(dir / "decisions.jsonl")) {
          const auto ds = harness::read_decisions(dir / "decisions.jsonl");
          const auto cd = team::choice_distribution(ds);
          j["choices"] = {{"first", cd.first}, {"second", cd.second}, {"indifferent", cd.indifferent}};
          j["choices"]["share_m"] = cd.defined() ? json(cd.share_m()) : json(nullptr);
        }
        if (!sums.empty() && s.games() && sums.front().games()) {
          j["vs_first"] = {{"z", analysis::z_score(s.rewards, sums.front().rewards)},
                           {"effect", analysis::a_w(s.rewards, sums.front().rewards).to_json()}};
        }
        if (s.games()) bars.push_back({std::filesystem::path(r).filename().string(), s.wdl(), s.sem()});
        out.push_back(j);
        sums.push_back(std::move(s));
      }
      std::cout << out.dump(2) << "\n";
      if (!stats_svg.empty()) {
        std::optional<std::pair<std::string, double>> ref;
        if (sums.front().games()) ref = std::pair<std::string, double>{"first run", sums.front().wdl()};
        write_file(stats_svg, analysis::svg::bar_plot(bars, "WDL (error bars: SEM)", ref));
      }
      return 0;
    }

    if (*serve) {
      harness::SessionManager mgr(serve_args.load(), !no_persist);
      harness::Server server(mgr, address, port, threads);
      std::cerr << "listening on " << address << ":" << server.port() << "\n";
      server.run();
      return 0;
    }

    if (*recipes) {
      if (!show.empty()) {
        std::cout << harness::recipe(show).config.to_json().dump(2) << "\n";
        return 0;
      }
      for (const auto& r : harness::experiment_recipes()) std::cout << r.name << "\t" << r.description << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
