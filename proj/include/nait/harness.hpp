#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nait/agent.hpp"
#include "nait/envs.hpp"

namespace nait::harness {

// ---- configuration -------------------------------------------------------

struct EnvSpec {
  std::string kind = "random_walk";  // random_walk | constant
  RandomWalkConfig random_walk{};
  double constant_reward = 1.0;
  std::size_t constant_length = 10;
  std::size_t constant_actions = 2;
  std::size_t constant_frame = 2;

  void validate() const;
};

struct RunConfig {
  EnvSpec env{};
  AgentConfig agent{};
  std::size_t step_budget = 20000;
  std::vector<std::uint64_t> seeds{0};
  std::size_t log_every = 1000;
  std::size_t trailing_window = 5;
  std::size_t eval_episodes = 50;
  double solve_threshold = 1.0;
  // Off writes 0 for steps_per_sec so repeated runs are byte-identical.
  bool wall_clock_metrics = true;
  bool checkpoints = true;
  std::filesystem::path out = "runs/default";
  std::size_t jobs = 1;

  void validate() const;
};

// JSON with the layout documented in the README. Unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

// Agent config for a desk-scale random walk: F=25, k=16, gamma=0.9.
RunConfig random_walk_defaults();

std::unique_ptr<Environment> make_env(const EnvSpec& spec, std::uint64_t seed);

// ---- metrics -------------------------------------------------------------

struct MetricRow {
  std::uint64_t seed = 0;
  std::size_t step = 0;
  std::size_t episodes = 0;
  double trailing_mean_return = 0.0;
  double steps_per_sec = 0.0;
};

inline constexpr const char* kMetricsHeader = "seed,step,episodes,trailing_mean_return,steps_per_sec";
void write_metric_row(std::ostream& out, const MetricRow& row);

// Mean of the last min(window, n) values; 0 for an empty list.
double trailing_mean(const std::vector<double>& returns, std::size_t window);

struct Summary {
  double median = 0.0;
  double mean = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};
// Quartiles by linear interpolation between order statistics.
Summary summarize(std::vector<double> values);
double quantile(std::vector<double> sorted_values, double q);

// ---- training runs -------------------------------------------------------

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<MetricRow> rows;
  std::vector<double> episode_returns;
  std::size_t steps = 0;
  // First logged-or-episode-end step at which the trailing mean over a full
  // window reached solve_threshold.
  std::optional<std::size_t> solved_step;
  double final_trailing_mean = 0.0;
  std::vector<double> eval_returns;
  double eval_mean_return = 0.0;
  double train_seconds = 0.0;
  double steps_per_sec = 0.0;
  bool interrupted = false;
};

// Fresh agent and env for one seed, trained for step_budget steps, then
// evaluated greedily without learning. stop is polled between episodes.
SeedResult run_seed(const RunConfig& config, std::uint64_t seed, const std::atomic<bool>* stop = nullptr,
                    std::unique_ptr<Agent>* trained = nullptr);

struct RunResult {
  std::vector<SeedResult> seeds;
  bool interrupted = false;
};

// All seeds (in parallel when jobs > 1), then writes metrics.csv,
// summary.json and per-seed checkpoints under config.out.
RunResult run(const RunConfig& config, const std::atomic<bool>* stop = nullptr);
void write_metrics_csv(const std::filesystem::path& path, const RunResult& result);
void write_summary_json(const std::filesystem::path& path, const RunConfig& config, const RunResult& result);

// Score used for sweeps: evaluation mean when evaluation ran, otherwise the
// final trailing mean.
double final_score(const SeedResult& r, const RunConfig& config);

// ---- sweeps --------------------------------------------------------------

// Axes: k, alpha, F, M, efs, efc, gamma, r.
void apply_axis(RunConfig& config, const std::string& axis, double value);
bool valid_axis(const std::string& axis);

struct SweepPoint {
  double value = 0.0;
  std::vector<double> scores;
  Summary summary;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepPoint> points;
  bool interrupted = false;
};

inline constexpr const char* kSweepHeader = "axis,value,seeds,median,mean,q1,q3,min,max";
SweepResult sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
                  const std::atomic<bool>* stop = nullptr);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

// ---- ANN benchmark -------------------------------------------------------

struct BenchConfig {
  std::string source = "random_walk";  // random_walk | gaussian
  std::size_t n = 10000;
  std::size_t queries = 500;
  std::size_t k = 30;
  std::size_t F = 25;
  std::size_t clusters = 50;
  double cluster_spread = 0.1;
  std::vector<std::size_t> efs{8, 32, 128, 200};
  std::vector<std::size_t> efc{200};
  std::vector<std::size_t> M{40};
  std::uint64_t seed = 0;
  bool include_brute_force = true;
};

struct BenchRow {
  std::string index;  // hnsw | brute
  std::size_t efs = 0;
  std::size_t efc = 0;
  std::size_t M = 0;
  double recall = 0.0;
  double queries_per_second = 0.0;
};

inline constexpr const char* kBenchHeader = "index,efs,efc,M,recall,queries_per_second";

// DCT features of frame stacks along a uniformly random walk policy.
std::vector<StateVec> random_walk_dataset(std::size_t n, std::size_t F, std::uint64_t seed);
std::vector<StateVec> gaussian_clusters(std::size_t n, std::size_t dim, std::size_t clusters, double spread,
                                        std::uint64_t seed);

std::vector<BenchRow> bench_ann(const BenchConfig& config);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

// ---- human-normalized score ---------------------------------------------

struct TaskScore {
  std::string task;
  double random = 0.0;
  double human = 0.0;
  double agent = 0.0;
};

struct TaskHns {
  std::string task;
  double hns = 0.0;
};

struct HnsReport {
  std::vector<TaskHns> tasks;
  std::vector<std::string> excluded;  // human == random
  double median = 0.0;                // lower median: element (n-1)/2 of the sorted scores
  double midpoint_median = 0.0;       // average of the two middle elements for even n
  double mean = 0.0;
};

double hns(double agent, double random, double human);
HnsReport compute_hns(const std::vector<TaskScore>& table, std::ostream* warnings = nullptr);

// Reads the shipped score CSV; agent_column picks the agent score and
// subset_column (when non-empty) keeps only rows where that column is 1.
std::vector<TaskScore> load_score_table(const std::filesystem::path& path, const std::string& agent_column,
                                        const std::string& subset_column = "");

// ---- oracle --------------------------------------------------------------

void write_oracle_table(std::ostream& out, const RandomWalkConfig& config, double tol = 1e-12);

}  // namespace nait::harness
