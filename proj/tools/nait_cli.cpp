// Command-line front end: run, sweep, bench-ann, hns, oracle.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nait/error.hpp"
#include "nait/harness.hpp"
#include "nait/simd.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  // "0,1,2" or "0-9"
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t dash = part.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw nait::ConfigError("bad seed range " + part);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(part));
      }
    } catch (const std::logic_error&) {
      throw nait::ConfigError("bad seed list '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw nait::ConfigError("empty seed list");
  return out;
}

struct RunFlags {
  std::string config;
  std::string seeds;
  std::size_t steps = 0;
  std::string out;
  std::size_t log_every = 0;
  std::size_t jobs = 0;
  bool random_walk_defaults = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON run config");
  cmd->add_option("--seeds", f.seeds, "Seed list, e.g. 0,1,2 or 0-9");
  cmd->add_option("--steps", f.steps, "Step budget per seed");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--log-every", f.log_every, "Steps between metric rows");
  cmd->add_option("--jobs", f.jobs, "Seeds run in parallel");
}

nait::harness::RunConfig resolve(const RunFlags& f) {
  nait::harness::RunConfig c =
      f.config.empty() ? nait::harness::random_walk_defaults() : nait::harness::load_run_config(f.config);
  if (!f.seeds.empty()) c.seeds = parse_seeds(f.seeds);
  if (f.steps) c.step_budget = f.steps;
  if (!f.out.empty()) c.out = f.out;
  if (f.log_every) c.log_every = f.log_every;
  if (f.jobs) c.jobs = f.jobs;
  c.validate();
  return c;
}

std::vector<std::size_t> to_sizes(const std::vector<double>& v) {
  std::vector<std::size_t> out;
  for (double x : v) out.push_back(static_cast<std::size_t>(x));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric agent with inter-trace updates: training, sweeps and benchmarks"};
  app.require_subcommand(1);
  std::string simd_backend;
  app.add_option("--simd", simd_backend, "Kernel backend: scalar, avx2, neon");

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Train one agent per seed and write metrics.csv, summary.json, checkpoints");
  add_run_flags(run, run_flags);

  RunFlags sweep_flags;
  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "Repeat run over values of one hyperparameter");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--axis", axis, "k, alpha, F, M, efs, efc, gamma or r")->required();
  sweep->add_option("--values", values, "Values for the axis")->required()->delimiter(',');

  nait::harness::BenchConfig bench_cfg;
  std::vector<double> bench_efs, bench_efc, bench_m;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench-ann", "Recall and query throughput of the HNSW index vs brute force");
  bench->add_option("--source", bench_cfg.source, "random_walk or gaussian");
  bench->add_option("--n", bench_cfg.n, "Indexed points");
  bench->add_option("--queries", bench_cfg.queries, "Query points");
  bench->add_option("--k", bench_cfg.k, "Neighbours per query");
  bench->add_option("--dim", bench_cfg.F, "Feature dimension (perfect square for random_walk)");
  bench->add_option("--efs", bench_efs, "efs grid")->delimiter(',');
  bench->add_option("--efc", bench_efc, "efc grid")->delimiter(',');
  bench->add_option("--M", bench_m, "M grid")->delimiter(',');
  bench->add_option("--seed", bench_cfg.seed, "Data and index seed");
  bench->add_option("--out", bench_out, "CSV path (stdout when empty)");

  std::string table_path = "data/atari_table6.csv";
  std::string column = "nait_100k";
  std::string subset;
  auto* hns = app.add_subcommand("hns", "Human-normalized scores from a score table");
  hns->add_option("--table", table_path, "CSV with game,random,human and agent columns");
  hns->add_option("--column", column, "Agent score column");
  hns->add_option("--subset", subset, "Keep rows where this 0/1 column is 1 (e.g. atari100k)");

  std::string oracle_config;
  auto* oracle = app.add_subcommand("oracle", "Print the value-iteration Q table for the random walk");
  oracle->add_option("--config", oracle_config, "JSON run config (its env section is used)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!simd_backend.empty()) nait::simd::set_backend(nait::simd::parse_backend(simd_backend));
    std::signal(SIGINT, on_sigint);

    if (*run) {
      const auto cfg = resolve(run_flags);
      const auto result = nait::harness::run(cfg, &g_stop);
      std::size_t solved = 0;
      for (const auto& s : result.seeds) solved += s.solved_step ? 1 : 0;
      std::printf("%zu/%zu seeds solved; results in %s%s\n", solved, result.seeds.size(), cfg.out.string().c_str(),
                  result.interrupted ? " (interrupted)" : "");
      return result.interrupted ? 130 : 0;
    }
    if (*sweep) {
      const auto cfg = resolve(sweep_flags);
      const auto result = nait::harness::sweep(cfg, axis, values, &g_stop);
      std::printf("%s\n", nait::harness::kSweepHeader);
      for (const auto& p : result.points) {
        std::printf("%s,%g,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", axis.c_str(), p.value, p.summary.count,
                    p.summary.median, p.summary.mean, p.summary.q1, p.summary.q3, p.summary.min, p.summary.max);
      }
      return result.interrupted ? 130 : 0;
    }
    if (*bench) {
      if (!bench_efs.empty()) bench_cfg.efs = to_sizes(bench_efs);
      if (!bench_efc.empty()) bench_cfg.efc = to_sizes(bench_efc);
      if (!bench_m.empty()) bench_cfg.M = to_sizes(bench_m);
      const auto rows = nait::harness::bench_ann(bench_cfg);
      if (bench_out.empty()) {
        nait::harness::write_bench_csv(std::cout, rows);
      } else {
        std::ofstream out(bench_out);
        if (!out) throw nait::Error("cannot write " + bench_out);
        nait::harness::write_bench_csv(out, rows);
      }
      return 0;
    }
    if (*hns) {
      const auto table = nait::harness::load_score_table(table_path, column, subset);
      const auto rep = nait::harness::compute_hns(table, &std::cerr);
      std::printf("task,hns\n");
      for (const auto& t : rep.tasks) std::printf("%s,%.4f\n", t.task.c_str(), t.hns);
      std::printf("# tasks=%zu excluded=%zu median=%.4f midpoint_median=%.4f mean=%.4f\n", rep.tasks.size(),
                  rep.excluded.size(), rep.median, rep.midpoint_median, rep.mean);
      return 0;
    }
    if (*oracle) {
      const auto cfg =
          oracle_config.empty() ? nait::harness::random_walk_defaults() : nait::harness::load_run_config(oracle_config);
      if (cfg.env.kind != "random_walk") throw nait::ConfigError("oracle needs a random_walk env");
      nait::harness::write_oracle_table(std::cout, cfg.env.random_walk);
      return 0;
    }
  } catch (const nait::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
