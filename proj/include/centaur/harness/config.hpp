#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "centaur/rl/policy_iteration.hpp"
#include "centaur/team/types.hpp"
#include "centaur/uci/stub_script.hpp"
#include "centaur/uci/uci_engine.hpp"
#include "centaur/util/hash.hpp"

namespace centaur::harness {

/// Environment variable naming the directory that relative engine
/// executables are resolved against.
inline constexpr const char* kEngineDirEnv = "CENTAUR_ENGINE_DIR";

inline uci::EngineRole role_from_string(std::string_view s) {
  for (auto r : {uci::EngineRole::TeamMemberM, uci::EngineRole::TeamMemberL, uci::EngineRole::Adversary,
                 uci::EngineRole::Expert, uci::EngineRole::ThirdParty})
    if (uci::to_string(r) == s) return r;
  throw ParseError("unknown engine role '" + std::string(s) + "'");
}

/// An engine as written in a config file: a UCI process, or an in-process
/// scripted engine when `script` is present (executable is then ignored).
struct EngineSpec {
  uci::EngineConfig config;
  std::optional<nlohmann::json> script;

  bool scripted() const noexcept { return script.has_value(); }

  nlohmann::json to_json() const {
    const auto& c = config;
    nlohmann::json opts = nlohmann::json::array();
    for (const auto& [k, v] : c.options) opts.push_back({k, v});
    nlohmann::json j{{"name", c.name},
                     {"executable", c.executable},
                     {"args", c.args},
                     {"options", opts},
                     {c.limit.kind == uci::SearchLimit::Kind::Depth ? "depth" : "nodes", c.limit.value},
                     {"role", uci::to_string(c.role)},
                     {"handshake_timeout_ms", c.handshake_timeout.count()},
                     {"search_timeout_ms", c.search_timeout.count()}};
    if (!c.transcript_path.empty()) j["transcript"] = c.transcript_path;
    if (script) j["script"] = *script;
    return j;
  }

  /// `options` is either an array of [name, value] pairs (order kept) or an
  /// object (sent in key order).
  static EngineSpec from_json(const nlohmann::json& j, uci::EngineRole default_role = uci::EngineRole::Adversary) {
    EngineSpec s;
    auto& c = s.config;
    c.name = j.at("name").get<std::string>();
    c.executable = j.value("executable", std::string());
    c.args = j.value("args", std::vector<std::string>{});
    if (j.contains("options")) {
      const auto& o = j["options"];
      if (o.is_object()) {
        for (auto& [k, v] : o.items()) c.options.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
      } else {
        for (const auto& kv : o) c.options.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
      }
    }
    if (j.contains("depth") && j.contains("nodes")) throw ParseError("engine '" + c.name + "': both depth and nodes");
    if (j.contains("nodes")) c.limit = uci::SearchLimit::nodes(j["nodes"].get<long>());
    else c.limit = uci::SearchLimit::depth(j.value("depth", 1L));
    c.role = j.contains("role") ? role_from_string(j["role"].get<std::string>()) : default_role;
    c.handshake_timeout = std::chrono::milliseconds(j.value("handshake_timeout_ms", 10'000L));
    c.search_timeout = std::chrono::milliseconds(j.value("search_timeout_ms", 120'000L));
    c.transcript_path = j.value("transcript", std::string());
    if (j.contains("script")) s.script = j["script"];
    if (!s.scripted()) c.validate();
    else if (c.limit.value < 1) throw PreconditionError("engine '" + c.name + "': search limit must be >= 1");
    return s;
  }

  static EngineSpec stub(std::string name, nlohmann::json script, uci::EngineRole role = uci::EngineRole::Adversary) {
    EngineSpec s;
    s.config.name = std::move(name);
    s.config.executable = "-";
    s.config.role = role;
    s.script = std::move(script);
    return s;
  }
};

/// Relative executables without a directory part are looked up in
/// $CENTAUR_ENGINE_DIR when it is set.
inline std::string resolve_executable(const std::string& exe) {
  const std::filesystem::path p(exe);
  if (p.is_absolute() || p.has_parent_path()) return exe;
  if (const char* dir = std::getenv(kEngineDirEnv); dir && *dir) return (std::filesystem::path(dir) / p).string();
  return exe;
}

inline std::unique_ptr<uci::Engine> make_engine(const EngineSpec& spec) {
  if (spec.scripted()) return std::make_unique<uci::ScriptedEngine>(spec.config, uci::StubScript::from_json(*spec.script));
  uci::EngineConfig c = spec.config;
  c.executable = resolve_executable(c.executable);
  return std::make_unique<uci::UciEngine>(std::move(c));
}

struct OpeningsConfig {
  enum class Use { Train, Test };
  std::string path;
  std::string test_path;  // optional held-out set; must be disjoint from `path`
  Use use = Use::Train;
  std::size_t count = 0;  // 0: every opening of the chosen set

  nlohmann::json to_json() const {
    return {{"path", path}, {"test_path", test_path}, {"use", use == Use::Train ? "train" : "test"}, {"count", count}};
  }
  static OpeningsConfig from_json(const nlohmann::json& j) {
    OpeningsConfig o;
    o.path = j.value("path", std::string());
    o.test_path = j.value("test_path", std::string());
    const std::string use = j.value("use", std::string("train"));
    if (use == "train") o.use = Use::Train;
    else if (use == "test") o.use = Use::Test;
    else throw ParseError("openings.use must be 'train' or 'test'");
    o.count = j.value("count", std::size_t{0});
    return o;
  }
};

inline int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 1 ? static_cast<int>(hw) - 1 : 1;
}

/// Everything needed to reproduce a run.
struct ExperimentConfig {
  std::string name = "experiment";
  std::optional<EngineSpec> m, l, adversary, expert, third_party;
  team::ManagerSpec manager;
  /// Solo baseline: this member plays alone and the manager is unused.
  std::optional<team::Member> solo;
  OpeningsConfig openings;
  bool both_colors = true;
  int workers = 0;  // 0: logical CPUs - 1, at least 1
  std::uint64_t seed = 0;
  std::string output_dir = "runs";
  int max_plies = 512;
  std::optional<rl::PolicyIterationConfig> policy_iteration;

  int effective_workers() const { return workers > 0 ? workers : default_workers(); }
  team::PlayOptions play_options() const { return {max_plies}; }

  void validate() const {
    if (!adversary) throw PreconditionError(name + ": no adversary engine");
    if (solo) {
      if (!(*solo == team::Member::M ? m : l)) throw PreconditionError(name + ": solo member has no engine");
    } else {
      if (!m || !l) throw PreconditionError(name + ": engines m and l are required");
      manager.validate();
      if (manager.kind == team::ManagerSpec::Kind::Expert && !expert)
        throw PreconditionError(name + ": expert manager needs an 'expert' engine");
      if (manager.kind == team::ManagerSpec::Kind::Human)
        throw PreconditionError(name + ": human managers play through the session service");
    }
    if (workers < 0) throw PreconditionError(name + ": workers must be >= 0");
    if (max_plies < 1) throw PreconditionError(name + ": max_plies must be >= 1");
  }

  nlohmann::json to_json() const {
    nlohmann::json engines = nlohmann::json::object();
    auto put = [&](const char* key, const std::optional<EngineSpec>& e) {
      if (e) engines[key] = e->to_json();
    };
    put("m", m);
    put("l", l);
    put("adversary", adversary);
    put("expert", expert);
    put("third_party", third_party);
    nlohmann::json j{{"name", name},
                     {"engines", engines},
                     {"manager", manager.to_json()},
                     {"solo", solo ? nlohmann::json(team::to_string(*solo)) : nlohmann::json(nullptr)},
                     {"openings", openings.to_json()},
                     {"both_colors", both_colors},
                     {"workers", workers},
                     {"seed", seed},
                     {"output_dir", output_dir},
                     {"max_plies", max_plies}};
    if (policy_iteration) j["policy_iteration"] = policy_iteration->to_json();
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    try {
      ExperimentConfig c;
      c.name = j.value("name", c.name);
      if (j.contains("engines")) {
        const auto& e = j["engines"];
        auto get = [&](const char* key, uci::EngineRole role) -> std::optional<EngineSpec> {
          if (!e.contains(key) || e[key].is_null()) return std::nullopt;
          return EngineSpec::from_json(e[key], role);
        };
        c.m = get("m", uci::EngineRole::TeamMemberM);
        c.l = get("l", uci::EngineRole::TeamMemberL);
        c.adversary = get("adversary", uci::EngineRole::Adversary);
        c.expert = get("expert", uci::EngineRole::Expert);
        c.third_party = get("third_party", uci::EngineRole::ThirdParty);
      }
      if (j.contains("manager")) c.manager = team::ManagerSpec::from_json(j["manager"]);
      if (j.contains("solo") && !j["solo"].is_null()) c.solo = team::member_from_string(j["solo"].get<std::string>());
      if (j.contains("openings")) c.openings = OpeningsConfig::from_json(j["openings"]);
      c.both_colors = j.value("both_colors", c.both_colors);
      c.workers = j.value("workers", c.workers);
      c.seed = j.value("seed", c.seed);
      c.output_dir = j.value("output_dir", c.output_dir);
      c.max_plies = j.value("max_plies", c.max_plies);
      if (j.contains("policy_iteration") && !j["policy_iteration"].is_null())
        c.policy_iteration = rl::PolicyIterationConfig::from_json(j["policy_iteration"]);
      return c;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("experiment config: ") + e.what());
    }
  }

  /// Hash of the canonical JSON (sorted keys), excluding the worker count
  /// and output directory, which do not affect results.
  std::string hash() const {
    nlohmann::json j = to_json();
    j.erase("workers");
    j.erase("output_dir");
    return hex64(fnv1a(j.dump())).substr(0, 12);
  }
};

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

}  // namespace centaur::harness
