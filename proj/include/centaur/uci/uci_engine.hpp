#pragma once

#include <deque>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include "centaur/chess/notation.hpp"
#include "centaur/uci/engine.hpp"
#include "centaur/uci/subprocess.hpp"

namespace centaur::uci {

/// Parsed "info ... score ..." fields; nullopt if the line carries no score.
inline std::optional<Score> parse_info_score(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string tok;
  if (!(in >> tok) || tok != "info") return std::nullopt;
  while (in >> tok) {
    if (tok != "score") continue;
    std::string kind;
    int value;
    if (!(in >> kind >> value)) return std::nullopt;
    if (kind == "cp") return Score::cp(value);
    if (kind == "mate") return Score::mate(value);
    return std::nullopt;
  }
  return std::nullopt;
}

/// Handle on an external UCI engine process.
class UciEngine final : public Engine {
 public:
  enum class State { Ready, Dead, Closed };

  /// Spawns the process and completes uci/uciok, setoption, isready/readyok.
  explicit UciEngine(EngineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (!cfg_.transcript_path.empty()) {
      transcript_file_ = std::make_unique<std::ofstream>(cfg_.transcript_path, std::ios::app);
      if (!*transcript_file_) throw EngineError("cannot open transcript " + cfg_.transcript_path);
    }
    try {
      proc_ = std::make_unique<Subprocess>(cfg_.executable, cfg_.args);
    } catch (const EngineError& e) {
      throw EngineError("engine '" + cfg_.name + "' failed to start: " + e.what());
    }
    try {
      send("uci");
      while (true) {
        const std::string line = receive(cfg_.handshake_timeout);
        if (line == "uciok") break;
        if (line.rfind("option name ", 0) == 0) {
          auto type = line.find(" type ");
          advertised_.insert(line.substr(12, type == std::string::npos ? std::string::npos : type - 12));
        }
      }
      for (const auto& [name, value] : cfg_.options) {
        if (!advertised_.count(name))
          throw EngineError("engine '" + cfg_.name + "' rejected option '" + name + "' (not advertised)");
        send("setoption name " + name + " value " + value);
      }
      sync(cfg_.handshake_timeout);
    } catch (const EngineError& e) {
      state_ = State::Dead;
      proc_->terminate(std::chrono::milliseconds(0));
      throw EngineError(std::string("engine startup failed: ") + e.what() + transcript_tail());
    }
  }

  ~UciEngine() override { shutdown(); }

  const EngineConfig& config() const override { return cfg_; }
  State state() const noexcept { return state_; }
  bool advertises(const std::string& option) const { return advertised_.count(option) > 0; }

  void new_game() override {
    std::lock_guard lock(mu_);
    ensure_ready();
    guarded([&] {
      send("ucinewgame");
      sync(cfg_.handshake_timeout);
    });
  }

  void shutdown() override {
    std::lock_guard lock(mu_);
    if (state_ == State::Closed) return;
    if (proc_) {
      if (state_ == State::Ready) send("quit");
      proc_->terminate(std::chrono::milliseconds(500));
    }
    state_ = State::Closed;
  }

  /// Last transcript lines, newest last.
  std::vector<std::string> transcript() const {
    std::lock_guard lock(mu_);
    return {tail_.begin(), tail_.end()};
  }

 protected:
  chess::Move search_best(const chess::Position& p, std::optional<std::uint64_t> seed) override {
    std::lock_guard lock(mu_);
    ensure_ready();
    return guarded([&] {
      if (seed && advertises("Seed")) send("setoption name Seed value " + std::to_string(*seed));
      send("position fen " + p.fen());
      send(cfg_.limit.go_command());
      auto [best, score] = await_bestmove();
      (void)score;
      try {
        return chess::parse_uci(p, best);
      } catch (const Error&) {
        throw ProtocolError("engine '" + cfg_.name + "' returned illegal bestmove '" + best + "' in " + p.fen());
      }
    });
  }

  Score search_score(const chess::Position& p, const chess::Move& m) override {
    std::lock_guard lock(mu_);
    ensure_ready();
    return guarded([&] {
      send("position fen " + p.fen());
      send(cfg_.limit.go_command() + " searchmoves " + m.uci());
      auto [best, score] = await_bestmove();
      if (!score)
        throw ProtocolError("engine '" + cfg_.name + "' reported no score for " + m.uci() + transcript_tail());
      return *score;
    });
  }

 private:
  template <typename F>
  auto guarded(F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ProtocolError&) {
      throw;
    } catch (const EngineError& e) {
      state_ = State::Dead;
      proc_->terminate(std::chrono::milliseconds(0));
      throw EngineError("engine '" + cfg_.name + "': " + e.what() + transcript_tail());
    }
  }

  void ensure_ready() const {
    if (state_ == State::Closed) throw EngineError("engine '" + cfg_.name + "' used after shutdown");
    if (state_ == State::Dead) throw EngineError("engine '" + cfg_.name + "' is dead");
  }

  std::pair<std::string, std::optional<Score>> await_bestmove() {
    std::optional<Score> last;
    while (true) {
      const std::string line = receive(cfg_.search_timeout);
      if (auto s = parse_info_score(line)) last = s;
      if (line.rfind("bestmove", 0) == 0) {
        std::istringstream in(line);
        std::string tag, move;
        in >> tag >> move;
        if (move.empty()) throw ProtocolError("engine '" + cfg_.name + "': empty bestmove");
        return {move, last};
      }
    }
  }

  void sync(std::chrono::milliseconds timeout) {
    send("isready");
    while (receive(timeout) != "readyok") {
    }
  }

  void send(const std::string& line) {
    log("> " + line);
    if (!proc_->write_line(line)) throw EngineError("engine stdin closed (process exited)");
  }

  std::string receive(std::chrono::milliseconds timeout) {
    auto line = proc_->read_line(timeout);
    if (!line) throw EngineError("engine process exited unexpectedly");
    log("< " + *line);
    return *line;
  }

  void log(const std::string& entry) {
    tail_.push_back(entry);
    if (tail_.size() > kTailLines) tail_.pop_front();
    if (transcript_file_) *transcript_file_ << entry << '\n' << std::flush;
  }

  std::string transcript_tail() const {
    std::string s = "\n--- transcript tail ---";
    for (const auto& l : tail_) s += "\n" + l;
    return s;
  }

  static constexpr std::size_t kTailLines = 40;

  EngineConfig cfg_;
  std::unique_ptr<Subprocess> proc_;
  std::unique_ptr<std::ofstream> transcript_file_;
  std::set<std::string> advertised_;
  std::deque<std::string> tail_;
  State state_ = State::Ready;
  mutable std::mutex mu_;
};

}  // namespace centaur::uci
