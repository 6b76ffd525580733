#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>

#include "centaur/chess/notation.hpp"
#include "centaur/harness/match.hpp"

namespace centaur::harness {

/// Errors a client can cause; `status` is the HTTP status the service uses.
class SessionError : public Error {
 public:
  SessionError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

enum class SessionStatus { AwaitingHuman, EngineThinking, Finished };

inline std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::AwaitingHuman: return "awaiting_human";
    case SessionStatus::EngineThinking: return "engine_thinking";
    case SessionStatus::Finished: return "finished";
  }
  return "?";
}

struct SessionRequest {
  std::string human = "anonymous";
  bool blind = true;
  chess::Color team_color = chess::Color::White;
  std::optional<std::string> fen;  // opening; the service picks one when absent
  std::string opening_id;
  std::optional<std::uint64_t> seed;

  static SessionRequest from_json(const nlohmann::json& j) {
    SessionRequest r;
    if (!j.is_object()) throw SessionError(400, "request body must be a JSON object");
    try {
      r.human = j.value("human", r.human);
      r.blind = j.value("blind", r.blind);
      const std::string color = j.value("team_color", std::string("white"));
      if (color == "white") r.team_color = chess::Color::White;
      else if (color == "black") r.team_color = chess::Color::Black;
      else throw SessionError(400, "team_color must be 'white' or 'black'");
      if (j.contains("fen") && !j["fen"].is_null()) r.fen = j["fen"].get<std::string>();
      r.opening_id = j.value("opening_id", r.opening_id);
      if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw SessionError(400, std::string("bad session request: ") + e.what());
    }
    if (r.human.empty()) throw SessionError(400, "human name must not be empty");
    return r;
  }
};

/// One human-managed game. The human sees the two recommendations under
/// labels A and B; with `blind` the label-to-member assignment is drawn per
/// decision and revealed only in the final record. Mutations are
/// serialized; a choice that arrives while the engines are thinking or when
/// no decision is pending is a conflict (409).
class Session {
 public:
  using Listener = std::function<void(const nlohmann::json&)>;

  struct Pending {
    std::size_t decision = 0;  // index among this game's decisions
    chess::Move rec_m, rec_l;
    bool a_is_m = true;
    std::uint64_t seed = 0;
  };

  Session(std::string id, SessionRequest req, chess::Position opening, EngineSet engines, team::PlayOptions play,
          std::uint64_t seed)
      : id_(std::move(id)), req_(std::move(req)), p_(std::move(opening)), engines_(std::move(engines)), play_(play) {
    record_.game_id = id_;
    record_.opening_id = req_.opening_id;
    record_.opening_fen = p_.fen();
    record_.team_color = req_.team_color;
    record_.seed = seed;
    record_.team_label = engines_.m->config().name + "+" + engines_.l->config().name + " [" + chooser() + "]";
    record_.adversary_label = engines_.adversary->config().name;
    record_.engines = {{"M", team::describe_engine(*engines_.m)},
                       {"L", team::describe_engine(*engines_.l)},
                       {"manager", chooser()},
                       {"adversary", team::describe_engine(*engines_.adversary)}};
    refresh();
  }

  ~Session() { engines_.shutdown(); }

  const std::string& id() const noexcept { return id_; }
  std::string chooser() const { return "human:" + req_.human; }

  /// Plays engine moves until a decision is pending or the game ends.
  void start() {
    std::lock_guard lk(mu_);
    engines_.new_game();
    set_status(SessionStatus::EngineThinking);
    advance();
  }

  /// `label` is "A" or "B". `decision`, when given, must name the pending
  /// decision; a stale index is a conflict.
  nlohmann::json choose(const std::string& label, std::optional<std::size_t> decision = std::nullopt) {
    std::unique_lock lk(mu_, std::try_to_lock);
    if (!lk) throw SessionError(409, "session " + id_ + ": engines are thinking");
    if (status_ != SessionStatus::AwaitingHuman || !pending_)
      throw SessionError(409, "session " + id_ + ": no decision pending (" + std::string(to_string(status_)) + ")");
    if (label != "A" && label != "B") throw SessionError(400, "label must be 'A' or 'B'");
    if (decision && *decision != pending_->decision)
      throw SessionError(409, "session " + id_ + ": decision " + std::to_string(*decision) +
                                  " is not pending (pending: " + std::to_string(pending_->decision) + ")");
    const Pending pd = *pending_;
    const bool chose_m = (label == "A") == pd.a_is_m;
    team::DecisionRecord d;
    d.fen = p_.fen();
    d.rec_m = pd.rec_m;
    d.rec_l = pd.rec_l;
    d.choice = chose_m ? team::Choice::First : team::Choice::Second;
    d.chooser = chooser();
    d.resolved = chose_m ? team::Member::M : team::Member::L;
    d.game_id = id_;
    d.ply = p_.ply();
    d.seed = pd.seed;
    record_.decisions.push_back(d);
    unblinding_.push_back({{"decision", pd.decision}, {"A", pd.a_is_m ? "M" : "L"}, {"B", pd.a_is_m ? "L" : "M"}});
    pending_.reset();
    set_status(SessionStatus::EngineThinking);
    play(d.resolved_move(), "team", label);
    advance();
    return snapshot();
  }

  /// Current state, safe to call at any time (does not wait for engines).
  nlohmann::json snapshot() const {
    std::lock_guard lk(snap_mu_);
    return snap_;
  }

  SessionStatus status() const {
    std::lock_guard lk(snap_mu_);
    return snap_status_;
  }

  /// Game record plus unblinding map; only once the game is finished.
  nlohmann::json result() const {
    std::lock_guard lk(snap_mu_);
    if (!final_) throw SessionError(409, "session " + id_ + " is not finished");
    return *final_;
  }

  const team::GameRecord& record() const { return record_; }

  /// Listeners receive every event after registration, in order.
  std::size_t subscribe(Listener fn) {
    std::lock_guard lk(listen_mu_);
    listeners_.emplace(++next_listener_, std::move(fn));
    return next_listener_;
  }
  void unsubscribe(std::size_t token) {
    std::lock_guard lk(listen_mu_);
    listeners_.erase(token);
  }

 private:
  void emit(const nlohmann::json& ev) {
    std::lock_guard lk(listen_mu_);
    for (auto& [_, fn] : listeners_) fn(ev);
  }

  void set_status(SessionStatus s) {
    status_ = s;
    refresh();
    emit({{"event", "status"}, {"session", id_}, {"status", to_string(s)}, {"state", snapshot()}});
  }

  void play(const chess::Move& m, const char* by, const std::string& label = {}) {
    nlohmann::json t{{"ply", record_.moves.size()}, {"by", by}, {"uci", m.uci()}, {"san", chess::to_san(p_, m)}};
    if (!label.empty()) t["label"] = label;
    history_.push_back(p_);
    p_ = chess::apply_move(p_, m);
    record_.moves.push_back(m);
    t["fen"] = p_.fen();
    transcript_.push_back(t);
    refresh();
    emit({{"event", "move"}, {"session", id_}, {"move", t}});
  }

  void finish(const chess::GameOutcome& o) {
    record_.outcome = o;
    finish_common();
  }

  void abort(const std::string& why) {
    record_.aborted = true;
    record_.abort_reason = why;
    finish_common();
  }

  void finish_common() {
    pending_.reset();
    {
      std::lock_guard lk(snap_mu_);
      final_ = nlohmann::json{{"game", record_.to_json()},
                              {"decisions", nlohmann::json::array()},
                              {"unblinding", unblinding_},
                              {"blind", req_.blind},
                              {"pgn", team::to_pgn(record_)}};
      for (const auto& d : record_.decisions) (*final_)["decisions"].push_back(d.to_json());
    }
    set_status(SessionStatus::Finished);
  }

  // Caller holds mu_.
  void advance() {
    if (status_ != SessionStatus::EngineThinking) set_status(SessionStatus::EngineThinking);
    try {
      while (true) {
        if (auto end = chess::game_result(p_, history_)) return finish(end->for_side(record_.team_color));
        const int i = static_cast<int>(record_.moves.size());
        if (i >= play_.max_plies) return finish({chess::Result::Draw, chess::Termination::Adjudicated});
        const std::uint64_t s = derive_seed(record_.seed, static_cast<std::uint64_t>(i));
        if (p_.side_to_move() != record_.team_color) {
          play(engines_.adversary->best_move(p_, s), "adversary");
          continue;
        }
        const std::uint64_t engine_seed = derive_seed(s, 0);
        const chess::Move rm = engines_.m->best_move(p_, engine_seed);
        const chess::Move rl = engines_.l->best_move(p_, engine_seed);
        if (rm == rl) {
          play(rm, "team");
          continue;
        }
        Pending pd{record_.decisions.size(), rm, rl, true, derive_seed(s, 1)};
        if (req_.blind) {
          Rng rng(pd.seed);
          pd.a_is_m = fair_coin(rng);
        }
        pending_ = pd;
        set_status(SessionStatus::AwaitingHuman);
        return;
      }
    } catch (const uci::EngineError& e) {
      abort(e.what());
    }
  }

  // Caller holds mu_ (or is the constructor).
  void refresh() {
    nlohmann::json s{{"id", id_},
                     {"status", to_string(status_)},
                     {"fen", p_.fen()},
                     {"team_color", record_.team_color == chess::Color::White ? "white" : "black"},
                     {"side_to_move", p_.side_to_move() == chess::Color::White ? "white" : "black"},
                     {"human", req_.human},
                     {"blind", req_.blind},
                     {"ply", record_.moves.size()},
                     {"decisions", record_.decisions.size()},
                     {"transcript", transcript_},
                     {"pending", nullptr},
                     {"result", nullptr}};
    if (pending_) {
      const auto& pd = *pending_;
      const chess::Move& a = pd.a_is_m ? pd.rec_m : pd.rec_l;
      const chess::Move& b = pd.a_is_m ? pd.rec_l : pd.rec_m;
      nlohmann::json ja{{"uci", a.uci()}, {"san", chess::to_san(p_, a)}};
      nlohmann::json jb{{"uci", b.uci()}, {"san", chess::to_san(p_, b)}};
      if (!req_.blind) {
        ja["member"] = pd.a_is_m ? "M" : "L";
        jb["member"] = pd.a_is_m ? "L" : "M";
      }
      s["pending"] = {{"decision", pd.decision}, {"A", ja}, {"B", jb}};
    }
    if (status_ == SessionStatus::Finished)
      s["result"] = {{"result", record_.aborted ? "aborted" : chess::to_string(record_.outcome.result)},
                     {"termination", record_.aborted ? "aborted" : chess::to_string(record_.outcome.termination)},
                     {"reward", record_.aborted ? nlohmann::json(nullptr) : nlohmann::json(record_.reward())}};
    std::lock_guard lk(snap_mu_);
    snap_ = std::move(s);
    snap_status_ = status_;
  }

  std::string id_;
  SessionRequest req_;
  chess::Position p_;
  std::vector<chess::Position> history_;
  EngineSet engines_;
  team::PlayOptions play_;
  team::GameRecord record_;
  nlohmann::json transcript_ = nlohmann::json::array();
  nlohmann::json unblinding_ = nlohmann::json::array();
  std::optional<Pending> pending_;
  SessionStatus status_ = SessionStatus::EngineThinking;

  std::mutex mu_;
  mutable std::mutex snap_mu_;
  nlohmann::json snap_;
  SessionStatus snap_status_ = SessionStatus::EngineThinking;
  std::optional<nlohmann::json> final_;

  std::mutex listen_mu_;
  std::map<std::size_t, Listener> listeners_;
  std::size_t next_listener_ = 0;
};

/// Registry of live sessions, all playing with the engines of one config.
/// Finished sessions are written to <output_dir>/sessions/<id>/ when
/// `persist` is set.
class SessionManager {
 public:
  explicit SessionManager(ExperimentConfig cfg, bool persist = true) : cfg_(std::move(cfg)), persist_(persist) {
    if (!cfg_.m || !cfg_.l || !cfg_.adversary) throw PreconditionError("sessions need engines m, l and adversary");
    if (!cfg_.openings.path.empty()) openings_ = select_openings(cfg_);
  }

  std::shared_ptr<Session> create(const SessionRequest& req) {
    const std::uint64_t n = counter_.fetch_add(1);
    const std::uint64_t seed = req.seed.value_or(derive_seed(cfg_.seed, n));
    const std::string id = "s" + std::to_string(n + 1) + "-" + hex64(seed).substr(0, 8);
    SessionRequest r = req;
    std::optional<chess::Position> opening;
    if (r.fen) {
      try {
        opening = chess::Position::from_fen(*r.fen);
      } catch (const Error& e) {
        throw SessionError(400, std::string("bad fen: ") + e.what());
      }
      if (chess::legal_moves(*opening).empty()) throw SessionError(400, "opening position is terminal");
    } else if (openings_) {
      Rng rng(seed);
      const std::size_t k = openings_->indices[uniform_index(rng, openings_->indices.size())];
      opening = openings_->set.positions[k];
      if (r.opening_id.empty()) r.opening_id = openings_->set.ids[k];
    } else {
      opening = chess::Position::start();
    }
    ExperimentConfig ec = cfg_;
    ec.solo.reset();
    ec.manager = team::ManagerSpec::human(r.human);
    auto s = std::make_shared<Session>(id, r, *opening, EngineSet::spawn(ec), cfg_.play_options(), seed);
    if (persist_) s->subscribe([this, w = std::weak_ptr<Session>(s)](const nlohmann::json& ev) {
      if (ev.value("event", "") != "status" || ev.value("status", "") != "finished") return;
      if (auto sp = w.lock()) persist(*sp);
    });
    {
      std::lock_guard lk(mu_);
      sessions_[id] = s;
    }
    return s;
  }

  std::shared_ptr<Session> get(const std::string& id) const {
    std::lock_guard lk(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionError(404, "no session " + id);
    return it->second;
  }

  const ExperimentConfig& config() const noexcept { return cfg_; }

 private:
  void persist(const Session& s) const {
    const auto dir = std::filesystem::path(cfg_.output_dir) / "sessions" / s.id();
    std::filesystem::create_directories(dir);
    const auto& g = s.record();
    detail::open_out(dir / "game.json") << g.to_json().dump(2) << "\n";
    detail::open_out(dir / "game.pgn") << team::to_pgn(g);
    detail::open_out(dir / "decisions.jsonl") << team::decisions_jsonl(g);
    detail::open_out(dir / "result.json") << s.result().dump(2) << "\n";
  }

  ExperimentConfig cfg_;
  bool persist_;
  std::optional<SelectedOpenings> openings_;
  std::atomic<std::uint64_t> counter_{0};
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace centaur::harness
