#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "nait/error.hpp"
#include "nait/harness.hpp"

namespace nait::harness {

void write_metric_row(std::ostream& out, const MetricRow& row) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%" PRIu64 ",%zu,%zu,%.6f,%.1f\n", row.seed, row.step, row.episodes,
                row.trailing_mean_return, row.steps_per_sec);
  out << buf;
}

double trailing_mean(const std::vector<double>& returns, std::size_t window) {
  if (returns.empty() || window == 0) return 0.0;
  const std::size_t n = std::min(window, returns.size());
  return std::accumulate(returns.end() - static_cast<std::ptrdiff_t>(n), returns.end(), 0.0) /
         static_cast<double>(n);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  s.q1 = quantile(values, 0.25);
  s.q3 = quantile(values, 0.75);
  return s;
}

double final_score(const SeedResult& r, const RunConfig& config) {
  if (config.eval_episodes > 0 && !r.eval_returns.empty()) return r.eval_mean_return;
  return r.final_trailing_mean;
}

void write_metrics_csv(const std::filesystem::path& path, const RunResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << kMetricsHeader << '\n';
  for (const auto& s : result.seeds) {
    for (const auto& row : s.rows) write_metric_row(out, row);
  }
  if (!out) throw Error("failed writing " + path.string());
}

void write_summary_json(const std::filesystem::path& path, const RunConfig& config, const RunResult& result) {
  using nlohmann::json;
  json seeds = json::array();
  std::vector<double> scores;
  std::size_t solved = 0;
  for (const auto& s : result.seeds) {
    const double score = final_score(s, config);
    scores.push_back(score);
    if (s.solved_step) ++solved;
    seeds.push_back({{"seed", s.seed},
                     {"steps", s.steps},
                     {"episodes", s.episode_returns.size()},
                     {"final_trailing_mean", s.final_trailing_mean},
                     {"eval_episodes", s.eval_returns.size()},
                     {"eval_mean_return", s.eval_mean_return},
                     {"solved_step", s.solved_step ? json(*s.solved_step) : json(nullptr)},
                     {"train_seconds", config.wall_clock_metrics ? s.train_seconds : 0.0},
                     {"steps_per_sec", config.wall_clock_metrics ? s.steps_per_sec : 0.0},
                     {"interrupted", s.interrupted}});
  }
  const Summary sum = summarize(scores);
  json j{{"config", json::parse(run_config_to_json(config))},
         {"interrupted", result.interrupted},
         {"seeds", seeds},
         {"seeds_solved", solved},
         {"score", {{"median", sum.median}, {"mean", sum.mean}, {"q1", sum.q1}, {"q3", sum.q3},
                    {"min", sum.min}, {"max", sum.max}}}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace nait::harness
