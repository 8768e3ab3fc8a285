#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nait/error.hpp"
#include "nait/harness.hpp"

namespace nait::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void get(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void get_count(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(where + "." + key + " must be a non-negative integer");
  }
  dst = static_cast<T>(v.get<unsigned long long>());
}

void parse_env(const json& j, EnvSpec& env) {
  reject_unknown(j,
                 {"kind", "n_states", "reversed_state", "goal_state", "start_state", "frame_size", "noise", "gamma",
                  "horizon", "rewarding_action", "reward", "episode_length", "actions"},
                 "env");
  get(j, "kind", env.kind, "env");
  auto& rw = env.random_walk;
  get(j, "n_states", rw.n_states, "env");
  get(j, "reversed_state", rw.reversed_state, "env");
  get(j, "goal_state", rw.goal_state, "env");
  get(j, "start_state", rw.start_state, "env");
  get(j, "noise", rw.noise, "env");
  get(j, "gamma", rw.gamma, "env");
  get_count(j, "horizon", rw.horizon, "env");
  get(j, "rewarding_action", rw.rewarding_action, "env");
  get(j, "reward", env.constant_reward, "env");
  get_count(j, "episode_length", env.constant_length, "env");
  get_count(j, "actions", env.constant_actions, "env");
  std::size_t frame = env.kind == "constant" ? env.constant_frame : rw.frame_size;
  get_count(j, "frame_size", frame, "env");
  if (env.kind == "constant") {
    env.constant_frame = frame;
  } else {
    rw.frame_size = frame;
  }
}

void parse_agent(const json& j, AgentConfig& a) {
  reject_unknown(j,
                 {"k", "F", "gamma", "alpha", "r", "M", "efc", "efs", "tiebreak_temp", "tie_epsilon", "encoder",
                  "sparsity", "bootstrap", "tiebreak", "update_mode", "kernel", "frozen_filter"},
                 "agent");
  get_count(j, "k", a.k, "agent");
  get_count(j, "F", a.F, "agent");
  get(j, "gamma", a.gamma, "agent");
  get(j, "alpha", a.alpha, "agent");
  get_count(j, "r", a.r, "agent");
  get_count(j, "M", a.index.M, "agent");
  get_count(j, "efc", a.index.efc, "agent");
  get_count(j, "efs", a.index.efs, "agent");
  get(j, "tiebreak_temp", a.tiebreak_temp, "agent");
  get(j, "tie_epsilon", a.tie_epsilon, "agent");
  get(j, "sparsity", a.sparsity, "agent");
  get(j, "frozen_filter", a.frozen_filter, "agent");
  if (j.contains("encoder")) a.encoder = parse_encoder(j.at("encoder").get<std::string>());
  if (j.contains("bootstrap")) a.bootstrap = parse_bootstrap(j.at("bootstrap").get<std::string>());
  if (j.contains("tiebreak")) a.tiebreak = parse_tiebreak(j.at("tiebreak").get<std::string>());
  if (j.contains("update_mode")) a.update_mode = parse_update_mode(j.at("update_mode").get<std::string>());
  if (j.contains("kernel")) a.kernel = parse_kernel(j.at("kernel").get<std::string>());
}

}  // namespace

void EnvSpec::validate() const {
  if (kind == "random_walk") {
    random_walk.validate();
  } else if (kind == "constant") {
    if (constant_length < 1) throw ConfigError("constant env needs episode_length >= 1");
    if (constant_actions < 1) throw ConfigError("constant env needs actions >= 1");
    if (constant_frame < 1) throw ConfigError("constant env needs frame_size >= 1");
  } else {
    throw ConfigError("unknown env kind '" + kind + "' (random_walk, constant)");
  }
}

void RunConfig::validate() const {
  env.validate();
  agent.validate();
  if (step_budget < 1) throw ConfigError("step_budget must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (log_every < 1) throw ConfigError("log_every must be >= 1");
  if (trailing_window < 1) throw ConfigError("trailing_window must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  const FrameShape shape = env.kind == "constant" ? FrameShape{env.constant_frame, env.constant_frame}
                                                  : FrameShape{env.random_walk.frame_size, env.random_walk.frame_size};
  StateEncoder probe(agent, shape);  // throws on an F the encoder cannot produce
  (void)probe;
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    reject_unknown(j,
                   {"env", "agent", "step_budget", "seeds", "log_every", "trailing_window", "eval_episodes",
                    "solve_threshold", "wall_clock_metrics", "checkpoints", "out", "jobs"},
                   "config");
    if (j.contains("env")) parse_env(j.at("env"), c.env);
    if (j.contains("agent")) parse_agent(j.at("agent"), c.agent);
    get_count(j, "step_budget", c.step_budget, "config");
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      if (!s.is_array()) throw ConfigError("config.seeds must be an array of integers");
      c.seeds.clear();
      for (const auto& v : s) {
        if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("seeds must be non-negative integers");
        c.seeds.push_back(v.get<std::uint64_t>());
      }
    }
    get_count(j, "log_every", c.log_every, "config");
    get_count(j, "trailing_window", c.trailing_window, "config");
    get_count(j, "eval_episodes", c.eval_episodes, "config");
    get(j, "solve_threshold", c.solve_threshold, "config");
    get(j, "wall_clock_metrics", c.wall_clock_metrics, "config");
    get(j, "checkpoints", c.checkpoints, "config");
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    get_count(j, "jobs", c.jobs, "config");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string run_config_to_json(const RunConfig& c) {
  json env;
  env["kind"] = c.env.kind;
  if (c.env.kind == "constant") {
    env["reward"] = c.env.constant_reward;
    env["episode_length"] = c.env.constant_length;
    env["actions"] = c.env.constant_actions;
    env["frame_size"] = c.env.constant_frame;
  } else {
    const auto& rw = c.env.random_walk;
    env["n_states"] = rw.n_states;
    env["reversed_state"] = rw.reversed_state;
    env["goal_state"] = rw.goal_state;
    env["start_state"] = rw.start_state;
    env["frame_size"] = rw.frame_size;
    env["noise"] = rw.noise;
    env["gamma"] = rw.gamma;
    env["horizon"] = rw.horizon;
    env["rewarding_action"] = rw.rewarding_action;
  }
  const auto& a = c.agent;
  json agent{{"k", a.k},
             {"F", a.F},
             {"gamma", a.gamma},
             {"alpha", a.alpha},
             {"r", a.r},
             {"M", a.index.M},
             {"efc", a.index.efc},
             {"efs", a.index.efs},
             {"tiebreak_temp", a.tiebreak_temp},
             {"tie_epsilon", a.tie_epsilon},
             {"encoder", to_string(a.encoder)},
             {"sparsity", a.sparsity},
             {"bootstrap", to_string(a.bootstrap)},
             {"tiebreak", to_string(a.tiebreak)},
             {"update_mode", to_string(a.update_mode)},
             {"kernel", to_string(a.kernel)},
             {"frozen_filter", a.frozen_filter}};
  json j{{"env", env},
         {"agent", agent},
         {"step_budget", c.step_budget},
         {"seeds", c.seeds},
         {"log_every", c.log_every},
         {"trailing_window", c.trailing_window},
         {"eval_episodes", c.eval_episodes},
         {"solve_threshold", c.solve_threshold},
         {"wall_clock_metrics", c.wall_clock_metrics},
         {"checkpoints", c.checkpoints},
         {"out", c.out.string()},
         {"jobs", c.jobs}};
  return j.dump(2);
}

RunConfig random_walk_defaults() {
  RunConfig c;
  c.agent.F = 25;
  c.agent.k = 16;
  c.agent.gamma = 0.9;
  c.agent.alpha = 0.1;
  c.agent.r = 50;
  c.step_budget = 20000;
  c.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  return c;
}

std::unique_ptr<Environment> make_env(const EnvSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.kind == "constant") {
    return std::make_unique<ConstantRewardEnv>(spec.constant_reward, spec.constant_length, spec.constant_actions,
                                               FrameShape{spec.constant_frame, spec.constant_frame});
  }
  RandomWalkConfig rw = spec.random_walk;
  rw.seed = seed;
  return std::make_unique<RandomWalkEnv>(rw);
}

}  // namespace nait::harness
