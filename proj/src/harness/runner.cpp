#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "nait/checkpoint.hpp"
#include "nait/error.hpp"
#include "nait/harness.hpp"

namespace nait::harness {

namespace {

bool stopped(const std::atomic<bool>* stop) { return stop && stop->load(std::memory_order_relaxed); }

std::string value_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SeedResult run_seed(const RunConfig& config, std::uint64_t seed, const std::atomic<bool>* stop,
                    std::unique_ptr<Agent>* trained) {
  using clock = std::chrono::steady_clock;
  AgentConfig agent_config = config.agent;
  agent_config.seed = mix_seed(seed, 1);
  auto env = make_env(config.env, mix_seed(seed, 2));
  auto agent = std::make_unique<Agent>(agent_config, env->action_count(), env->frame_shape());

  SeedResult r;
  r.seed = seed;
  r.rows.push_back(MetricRow{seed, 0, 0, 0.0, 0.0});

  std::size_t next_log = config.log_every;
  double interval_seconds = 0.0;
  std::size_t interval_steps = 0;
  auto emit = [&](std::size_t step, double trailing) {
    double sps = 0.0;
    if (config.wall_clock_metrics && interval_seconds > 0.0) sps = static_cast<double>(interval_steps) / interval_seconds;
    r.rows.push_back(MetricRow{seed, step, r.episode_returns.size(), trailing, sps});
    interval_seconds = 0.0;
    interval_steps = 0;
  };

  const auto start = clock::now();
  while (r.steps < config.step_budget) {
    if (stopped(stop)) {
      r.interrupted = true;
      break;
    }
    const EpisodeResult ep = agent->run_episode(*env, true, config.step_budget - r.steps);
    const double before = trailing_mean(r.episode_returns, config.trailing_window);
    for (std::size_t i = 0; i < ep.steps; ++i) {
      interval_seconds += i < ep.step_seconds.size() ? ep.step_seconds[i] : 0.0;
      ++interval_steps;
      const std::size_t global = r.steps + i + 1;
      if (global == next_log && i + 1 < ep.steps) {
        emit(global, before);
        next_log += config.log_every;
      }
    }
    r.steps += ep.steps;
    if (ep.terminated) r.episode_returns.push_back(ep.total_reward);
    const double trailing = trailing_mean(r.episode_returns, config.trailing_window);
    if (!r.solved_step && r.episode_returns.size() >= config.trailing_window && trailing >= config.solve_threshold) {
      r.solved_step = r.steps;
    }
    if (r.steps == next_log) {
      emit(r.steps, trailing);
      next_log += config.log_every;
    }
  }
  r.train_seconds = std::chrono::duration<double>(clock::now() - start).count();
  r.final_trailing_mean = trailing_mean(r.episode_returns, config.trailing_window);
  r.steps_per_sec = r.train_seconds > 0.0 ? static_cast<double>(r.steps) / r.train_seconds : 0.0;
  if (r.rows.back().step != r.steps) emit(r.steps, r.final_trailing_mean);

  for (std::size_t e = 0; e < config.eval_episodes; ++e) {
    if (stopped(stop)) {
      r.interrupted = true;
      break;
    }
    r.eval_returns.push_back(agent->run_episode(*env, false).total_reward);
  }
  if (!r.eval_returns.empty()) {
    double total = 0.0;
    for (double v : r.eval_returns) total += v;
    r.eval_mean_return = total / static_cast<double>(r.eval_returns.size());
  }
  if (trained) *trained = std::move(agent);
  return r;
}

RunResult run(const RunConfig& config, const std::atomic<bool>* stop) {
  config.validate();
  std::filesystem::create_directories(config.out);
  if (config.checkpoints) std::filesystem::create_directories(config.out / "checkpoints");

  RunResult result;
  result.seeds.resize(config.seeds.size());
  parallel_for(config.seeds.size(), config.jobs, [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i];
    std::unique_ptr<Agent> agent;
    result.seeds[i] = run_seed(config, seed, stop, config.checkpoints ? &agent : nullptr);
    if (agent) save_agent(config.out / "checkpoints" / ("seed_" + std::to_string(seed) + ".nait"), *agent);
  });
  for (const auto& s : result.seeds) result.interrupted = result.interrupted || s.interrupted;
  write_metrics_csv(config.out / "metrics.csv", result);
  write_summary_json(config.out / "summary.json", config, result);
  return result;
}

bool valid_axis(const std::string& axis) {
  static const char* axes[] = {"k", "alpha", "F", "M", "efs", "efc", "gamma", "r"};
  return std::any_of(std::begin(axes), std::end(axes), [&](const char* a) { return axis == a; });
}

void apply_axis(RunConfig& c, const std::string& axis, double value) {
  auto count = [&]() {
    if (!(value >= 0.0) || value != std::floor(value)) {
      throw ConfigError("axis " + axis + " needs a non-negative integer value, got " + value_label(value));
    }
    return static_cast<std::size_t>(value);
  };
  if (axis == "k") {
    c.agent.k = count();
  } else if (axis == "alpha") {
    c.agent.alpha = value;
  } else if (axis == "F") {
    c.agent.F = count();
  } else if (axis == "M") {
    c.agent.index.M = count();
  } else if (axis == "efs") {
    c.agent.index.efs = count();
  } else if (axis == "efc") {
    c.agent.index.efc = count();
  } else if (axis == "gamma") {
    c.agent.gamma = value;
    c.env.random_walk.gamma = value;
  } else if (axis == "r") {
    c.agent.r = count();
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "' (k, alpha, F, M, efs, efc, gamma, r)");
  }
}

SweepResult sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
                  const std::atomic<bool>* stop) {
  if (!valid_axis(axis)) throw ConfigError("unknown sweep axis '" + axis + "' (k, alpha, F, M, efs, efc, gamma, r)");
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<RunConfig> configs;
  for (double v : values) {
    RunConfig c = base;
    apply_axis(c, axis, v);
    c.out = base.out / (axis + "_" + value_label(v));
    c.validate();
    configs.push_back(std::move(c));
  }
  SweepResult out;
  out.axis = axis;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (stopped(stop)) {
      out.interrupted = true;
      break;
    }
    const RunResult r = run(configs[i], stop);
    SweepPoint p;
    p.value = values[i];
    for (const auto& s : r.seeds) p.scores.push_back(final_score(s, configs[i]));
    p.summary = summarize(p.scores);
    out.points.push_back(std::move(p));
    out.interrupted = out.interrupted || r.interrupted;
  }
  std::filesystem::create_directories(base.out);
  write_sweep_csv(base.out / "sweep.csv", out);
  return out;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << kSweepHeader << '\n';
  for (const auto& p : result.points) {
    char buf[256];
    const auto& s = p.summary;
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", result.axis.c_str(),
                  value_label(p.value).c_str(), s.count, s.median, s.mean, s.q1, s.q3, s.min, s.max);
    out << buf;
  }
}

}  // namespace nait::harness
