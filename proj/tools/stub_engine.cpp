// Scriptable UCI engine for tests and demos. Usage: stub_engine [script.json]
// Plays whatever the script dictates; see StubScript for the schema.

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "centaur/chess/notation.hpp"
#include "centaur/uci/stub_script.hpp"

using namespace centaur;

namespace {

chess::Position parse_position_command(std::istringstream& in) {
  std::string tok;
  in >> tok;
  chess::Position p = chess::Position::start();
  if (tok == "fen") {
    std::string fen, part;
    while (in >> part && part != "moves") fen += (fen.empty() ? "" : " ") + part;
    p = chess::Position::from_fen(fen);
    tok = part;
  } else {
    in >> tok;  // "moves" or nothing
  }
  if (tok == "moves") {
    std::string mv;
    while (in >> mv) p = chess::apply_move(p, chess::parse_uci(p, mv));
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  uci::StubScript script;
  try {
    if (argc > 1) script = uci::StubScript::load(argv[1]);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  std::uint64_t seed = 0;
  chess::Position pos = chess::Position::start();
  std::string line;
  while (std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    if (cmd == "uci") {
      std::cout << "id name " << script.name << "\nid author centaur\n";
      for (const auto& o : script.options)
        std::cout << "option name " << o << " type spin default 0 min 0 max 2147483647\n";
      std::cout << "uciok" << std::endl;
    } else if (cmd == "isready") {
      std::cout << "readyok" << std::endl;
    } else if (cmd == "setoption") {
      std::string tag, name, value;
      in >> tag >> name >> tag >> value;
      if (name == "Seed") seed = std::stoull(value);
    } else if (cmd == "position") {
      try {
        pos = parse_position_command(in);
      } catch (const std::exception& e) {
        std::cout << "info string bad position: " << e.what() << std::endl;
      }
    } else if (cmd == "go") {
      const std::string key = uci::fen_key(pos);
      if (key == script.crash_on) return 3;
      if (key == script.hang_on) {
        std::this_thread::sleep_for(std::chrono::hours(1));
        continue;
      }
      if (auto raw = script.raw_moves.find(key); raw != script.raw_moves.end()) {
        std::cout << "info depth 1 score cp 0\nbestmove " << raw->second << std::endl;
        continue;
      }
      std::vector<std::string> restrict;
      std::string tok;
      bool in_searchmoves = false;
      while (in >> tok) {
        if (tok == "searchmoves") in_searchmoves = true;
        else if (in_searchmoves) restrict.push_back(tok);
      }
      try {
        chess::Move best = restrict.empty() ? script.choose(pos, seed) : chess::parse_uci(pos, restrict.front());
        if (restrict.size() > 1) {
          // Highest scripted score among the allowed moves.
          for (const auto& r : restrict) {
            chess::Move m = chess::parse_uci(pos, r);
            if (script.score(pos, m) > script.score(pos, best)) best = m;
          }
        }
        std::cout << "info depth 1 score " << script.score(pos, best).uci() << " pv " << best.uci() << '\n'
                  << "bestmove " << best.uci() << std::endl;
      } catch (const std::exception& e) {
        std::cout << "info string " << e.what() << "\nbestmove 0000" << std::endl;
      }
    } else if (cmd == "quit") {
      break;
    }
  }
  return 0;
}
