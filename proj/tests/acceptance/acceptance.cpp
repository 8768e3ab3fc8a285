// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "nait/agent.hpp"
#include "nait/envs.hpp"
#include "nait/harness.hpp"
#include "nait/representation.hpp"
#include "nait/value_memory.hpp"
#include "oracles.hpp"
#include "trace_driver.hpp"

using namespace nait;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- AC1 + AC10 share one training run --------------------------------------

struct WalkRun {
  std::size_t solved = 0;
  std::size_t seeds = 0;
  double wall_seconds = 0.0;
  double train_seconds = 0.0;
  std::size_t steps = 0;
  std::vector<std::string> solved_steps;
};

const WalkRun& walk_run() {
  static const WalkRun w = [] {
    harness::RunConfig c = harness::random_walk_defaults();
    c.checkpoints = false;
    c.jobs = 1;
    c.out = fs::temp_directory_path() / "nait_acceptance_walk";
    fs::remove_all(c.out);
    WalkRun out;
    const auto start = std::chrono::steady_clock::now();
    const auto r = harness::run(c);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.seeds = r.seeds.size();
    for (const auto& s : r.seeds) {
      out.steps += s.steps;
      out.train_seconds += s.train_seconds;
      if (s.solved_step && *s.solved_step <= c.step_budget) ++out.solved;
      out.solved_steps.push_back(s.solved_step ? std::to_string(*s.solved_step) : "-");
    }
    return out;
  }();
  return w;
}

Outcome ac1() {
  const auto& w = walk_run();
  std::string steps;
  for (const auto& s : w.solved_steps) steps += (steps.empty() ? "" : ",") + s;
  const bool pass = w.seeds == 10 && w.solved >= 8 && w.wall_seconds < 120.0;
  return {pass, std::to_string(w.solved) + "/" + std::to_string(w.seeds) + " seeds solved (steps " + steps +
                    "), 10-seed run " + fmt("%.1f s", w.wall_seconds) + " (limit 120 s)"};
}

Outcome ac10() {
  const auto& w = walk_run();
  const double sps = static_cast<double>(w.steps) / w.train_seconds;
  return {sps >= 200.0, fmt("%.0f steps/s single-threaded", sps) + " (floor 200, target 1000: " +
                            (sps >= 1000.0 ? "met" : "not met") + ")"};
}

// ---- AC2 --------------------------------------------------------------------

Outcome ac2() {
  const RandomWalkConfig c;
  const QTable q = value_iteration(random_walk_mdp(c), 1e-12);
  const std::size_t s9 = 8, s15 = 14;
  const double best = std::max(q(s9, 0), q(s9, 1));
  const double err = std::abs(best - std::pow(0.9, 10));
  const bool pass = err <= 1e-6 && q.greedy(s15) == 0;
  return {pass, fmt("|Q*(9) - 0.9^10| = %.2e", err) + ", greedy at 15 = a" + std::to_string(q.greedy(s15))};
}

// ---- AC3 --------------------------------------------------------------------

Outcome ac3() {
  Rng rng(301);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    const double gamma = uniform01(rng);
    const std::size_t len = 1 + static_cast<std::size_t>(uniform01(rng) * 500.0);
    const std::size_t pool = 1 + static_cast<std::size_t>(uniform01(rng) * 2.0 * static_cast<double>(len));
    std::vector<double> pw(len + 2);
    for (std::size_t n = 0; n < pw.size(); ++n) pw[n] = std::pow(gamma, static_cast<double>(n));
    TraceState tr(gamma);
    std::vector<double> rewards;
    std::vector<std::size_t> first;
    for (std::size_t t = 0; t < len; ++t) {
      const auto key = static_cast<float>(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pool)));
      if (tr.visit(StateVec{key}, 0, t)) first.push_back(t);
      rewards.push_back(uniform01(rng) * 2.0 - 1.0);
      const double q_next = uniform01(rng) * 10.0 - 5.0;
      const auto q = intertrace_step(tr, rewards.back(), q_next);
      for (std::size_t i = 0; i < first.size(); ++i) {
        double g = 0.0;
        for (std::size_t j = first[i]; j <= t; ++j) g += pw[j - first[i]] * rewards[j];
        const double naive = g + pw[t - first[i] + 1] * q_next;
        worst = std::max(worst, std::abs(q[i] - naive));
        ++checked;
      }
    }
  }
  return {worst <= 1e-9, fmt("max |Q_IT - naive| = %.2e", worst) + " over " + std::to_string(checked) + " entries"};
}

// ---- AC4 --------------------------------------------------------------------

Outcome ac4() {
  Rng rng(401);
  const double gammas[] = {0.5, 0.25, 0.75};
  const std::size_t max_lens[] = {40, 40, 20};  // keeps every return exactly representable
  std::size_t mismatches = 0, compared = 0;
  for (int trace = 0; trace < 100; ++trace) {
    const int g = trace % 3;
    AgentConfig cfg;
    cfg.gamma = gammas[g];
    cfg.alpha = 0.1;
    cfg.k = 3;
    cfg.r = 1 + static_cast<std::size_t>(uniform01(rng) * 10.0);
    cfg.index = IndexParams{6, 20, 20, static_cast<std::uint64_t>(trace)};
    std::vector<ActionMemory> mem(2, ActionMemory(cfg.index));
    oracle::ReferenceMc ref(cfg.gamma, cfg.alpha);
    const int episodes = 1 + trace % 4;
    for (int e = 0; e < episodes; ++e) {
      const auto ep = testing_support::random_episode(rng, max_lens[g], 10, 3, 2, true);
      testing_support::drive_episode(mem, ep, cfg);
      ref.episode(ep.states, ep.actions, ep.rewards);
    }
    std::size_t stored = 0;
    for (const auto& [key, value] : ref.table()) {
      StateVec s(key.first.size() / sizeof(float));
      std::memcpy(s.data(), key.first.data(), key.first.size());
      const auto hit = mem[static_cast<std::size_t>(key.second)].exact_lookup(s);
      ++compared;
      if (!hit || hit->value != value) ++mismatches;
      ++stored;
    }
    if (stored != mem[0].size() + mem[1].size()) ++mismatches;
  }
  return {mismatches == 0, std::to_string(compared) + " stored values compared, " + std::to_string(mismatches) +
                               " not bit-identical"};
}

// ---- AC5 --------------------------------------------------------------------

Outcome ac5() {
  double worst = 0.0;
  bool bounds_ok = true;
  // Closed-form weights: the boundary and the midpoint.
  const auto w = tricubic_weights(std::vector<double>{1.0, 2.0});
  worst = std::max(worst, std::abs(w[0] - 0.669921875));
  worst = std::max(worst, std::abs(w[1] - 0.0));

  // Query at 0; neighbours at 1, -1 (values 10, 4) and 2 (value 100, weight 0).
  {
    ActionMemory m;
    m.update(StateVec{1.0f}, 10.0, 0.1);
    m.update(StateVec{-1.0f}, 4.0, 0.1);
    m.update(StateVec{2.0f}, 100.0, 0.1);
    worst = std::max(worst, std::abs(m.estimate_q(StateVec{0.0f}, 3, false).value - 7.0));
  }
  // Distances 1, 1.5, 2 with values 1, 2, 3.
  {
    ActionMemory n;
    n.update(StateVec{1.0f}, 1.0, 0.1);
    n.update(StateVec{1.5f}, 2.0, 0.1);
    n.update(StateVec{2.0f}, 3.0, 0.1);
    const double a = oracle::tricubic(1.0, 2.0), b = oracle::tricubic(1.5, 2.0);
    const double expect = (a * 1.0 + b * 2.0) / (a + b);
    worst = std::max(worst, std::abs(n.estimate_q(StateVec{0.0f}, 3, false).value - expect));
  }
  // Random neighbourhoods: closed form from a naive scan, and the convex-hull bound.
  Rng rng(501);
  for (int trial = 0; trial < 200; ++trial) {
    ActionMemory m(IndexParams{8, 64, 400, static_cast<std::uint64_t>(trial)});
    std::vector<StateVec> pts;
    std::vector<double> vals;
    const int n = 20 + trial % 80;
    for (int i = 0; i < n; ++i) {
      StateVec p{static_cast<float>(uniform01(rng) * 4 - 2), static_cast<float>(uniform01(rng) * 4 - 2)};
      const double v = uniform01(rng) * 20 - 10;
      m.update(p, v, 0.1);
      pts.push_back(p);
      vals.push_back(v);
    }
    const std::size_t k = 1 + static_cast<std::size_t>(uniform01(rng) * 10);
    const StateVec q{static_cast<float>(uniform01(rng) * 4 - 2), static_cast<float>(uniform01(rng) * 4 - 2)};
    std::vector<std::pair<double, double>> by_dist;
    for (int i = 0; i < n; ++i) {
      const double dx = static_cast<double>(pts[i][0]) - q[0], dy = static_cast<double>(pts[i][1]) - q[1];
      by_dist.push_back({std::sqrt(dx * dx + dy * dy), vals[i]});
    }
    std::sort(by_dist.begin(), by_dist.end());
    by_dist.resize(k);
    const double d_max = by_dist.back().first;
    double num = 0, den = 0, lo = 1e300, hi = -1e300;
    for (const auto& [d, v] : by_dist) {
      const double wi = oracle::tricubic(d, d_max);
      num += wi * v;
      den += wi;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double got = m.estimate_q(q, k, false).value;
    if (den > 0) worst = std::max(worst, std::abs(got - num / den));
    if (got < lo - 1e-12 || got > hi + 1e-12) bounds_ok = false;
  }
  return {worst <= 1e-9 && bounds_ok,
          fmt("max closed-form error %.2e", worst) + (bounds_ok ? ", always within neighbour range" : ", OUT OF RANGE")};
}

// ---- AC6 --------------------------------------------------------------------

Outcome ac6() {
  Rng rng(601);
  double worst_abs = 0.0, worst_energy = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t h = 1 + static_cast<std::size_t>(uniform01(rng) * 64);
    const std::size_t w = 1 + static_cast<std::size_t>(uniform01(rng) * 64);
    const Frame img = oracle::random_frame(h, w, rng);
    const Frame got = dct2(img);
    const Frame ref = oracle::dct2(img);
    double e_in = 0, e_out = 0;
    for (std::size_t j = 0; j < img.size(); ++j) {
      worst_abs = std::max(worst_abs, std::abs(got.pixels()[j] - ref.pixels()[j]));
      e_in += img.pixels()[j] * img.pixels()[j];
      e_out += got.pixels()[j] * got.pixels()[j];
    }
    worst_energy = std::max(worst_energy, std::abs(e_out - e_in) / e_in);
  }
  return {worst_abs <= 1e-6 && worst_energy <= 1e-6,
          fmt("max |dct2 - naive| = %.2e", worst_abs) + fmt(", max energy rel. error %.2e", worst_energy)};
}

// ---- AC7 --------------------------------------------------------------------

double exact_recall(const std::vector<StateVec>& data, const std::vector<StateVec>& queries, const HnswIndex& index,
                    std::size_t k, std::size_t efs) {
  double total = 0.0;
  std::vector<std::pair<double, std::size_t>> d(data.size());
  for (const auto& q : queries) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) {
        const double diff = static_cast<double>(data[i][j]) - q[j];
        s += diff * diff;
      }
      d[i] = {s, i};
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::set<std::size_t> truth;
    for (std::size_t i = 0; i < k; ++i) truth.insert(d[i].second);
    std::size_t hits = 0;
    for (const auto& n : index.knn(q, k, efs)) hits += truth.count(n.id);
    total += static_cast<double>(hits) / static_cast<double>(k);
  }
  return total / static_cast<double>(queries.size());
}

Outcome ac7() {
  const std::size_t n = 10000, nq = 200, k = 30;
  const std::vector<std::size_t> efs_grid{8, 32, 128, 200};
  std::string detail;
  bool pass = true;
  for (const std::string source : {"random_walk", "gaussian"}) {
    auto all = source == "random_walk" ? harness::random_walk_dataset(n + nq, 25, 7)
                                       : harness::gaussian_clusters(n + nq, 25, 50, 0.1, 7);
    const std::vector<StateVec> data(all.begin(), all.begin() + n);
    const std::vector<StateVec> queries(all.begin() + n, all.end());
    HnswIndex index(IndexParams{}, 25);
    for (const auto& p : data) index.insert(p);
    std::vector<double> rec;
    for (std::size_t efs : efs_grid) rec.push_back(exact_recall(data, queries, index, k, efs));
    const double floor = source == "random_walk" ? 0.8 : 0.95;
    bool monotone = true;
    for (std::size_t i = 1; i < rec.size(); ++i) monotone = monotone && rec[i] + 0.01 >= rec[i - 1];
    pass = pass && rec.back() >= floor && monotone;
    detail += (detail.empty() ? "" : "; ") + source + " recall@30 efs{8,32,128,200} =";
    for (double r : rec) detail += fmt(" %.4f", r);
    detail += fmt(" (need >= %.2f)", floor) + (monotone ? "" : " NOT MONOTONE");
  }
  return {pass, detail};
}

// ---- AC8 --------------------------------------------------------------------

Outcome ac8() {
  bool pass = true;
  std::string detail;
  {
    ActionMemory m;
    const StateVec key{1.0f, 2.0f};
    m.update(key, 2.0, 0.1);
    m.begin_episode();
    m.batch_update(std::vector<UpdateEntry>{{key, 4.0}}, 0.1);
    m.batch_update(std::vector<UpdateEntry>{{key, 6.0}}, 0.1);
    const double v = m.exact_lookup(key)->value;
    const double frozen = m.estimate_q(key, 1, true).value;
    pass = pass && std::abs(v - 2.4) < 1e-12 && frozen == 2.0;
    detail += fmt("2.0 -> targets 4, 6 -> %.12g", v) + fmt(" (frozen reads %.12g)", frozen);
  }
  Rng rng(801);
  std::size_t violations = 0, queries = 0;
  for (int trial = 0; trial < 30; ++trial) {
    ActionMemory m(IndexParams{16, 100, 200, static_cast<std::uint64_t>(trial)});
    std::vector<StateVec> keys;
    for (int i = 0; i < 1000; ++i) {
      StateVec p(4);
      for (float& x : p) x = static_cast<float>(uniform01(rng));
      m.update(p, uniform01(rng), 0.5);
      keys.push_back(p);
    }
    m.begin_episode();
    std::vector<StateVec> probes;
    std::vector<QEstimate> before;
    for (int i = 0; i < 50; ++i) {
      StateVec q = i % 5 == 0 ? keys[static_cast<std::size_t>(uniform01(rng) * 1000)] : StateVec(4);
      if (i % 5 != 0)
        for (float& x : q) x = static_cast<float>(uniform01(rng));
      probes.push_back(q);
      before.push_back(m.estimate_q(q, 8, true));
    }
    for (int round = 0; round < 5; ++round) {
      std::vector<UpdateEntry> batch;
      for (int i = 0; i < 100; ++i) batch.push_back({keys[static_cast<std::size_t>(uniform01(rng) * 1000)], uniform01(rng) * 10});
      for (int i = 0; i < 2; ++i) {
        StateVec p(4);
        for (float& x : p) x = static_cast<float>(uniform01(rng));
        batch.push_back({p, 50.0});
      }
      m.batch_update(batch, 0.3);
      for (std::size_t i = 0; i < probes.size(); ++i) {
        const QEstimate now = m.estimate_q(probes[i], 8, true);
        ++queries;
        if (now.value != before[i].value) ++violations;
      }
    }
  }
  pass = pass && violations == 0;
  detail += "; " + std::to_string(queries) + " frozen reads after in-episode writes, " + std::to_string(violations) +
            " changed";
  return {pass, detail};
}

// ---- AC9 --------------------------------------------------------------------

Outcome ac9() {
  const fs::path table = fs::path(NAIT_SOURCE_DIR) / "data" / "atari_table6.csv";
  const auto subset = harness::compute_hns(harness::load_score_table(table, "nait_100k", "atari100k"));
  const auto all = harness::compute_hns(harness::load_score_table(table, "nait_100k"));
  const bool pass = std::abs(subset.median - 0.312) <= 0.001 && std::abs(all.median - 0.176) <= 0.001;
  return {pass, fmt("subset median %.4f", subset.median) + " over " + std::to_string(subset.tasks.size()) +
                    fmt(" games (need 0.312), all-games median %.4f", all.median) + " over " +
                    std::to_string(all.tasks.size()) + " games (need 0.176)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 random-walk learning", ac1}, {"AC2 oracle Q*", ac2},          {"AC3 inter-trace identity", ac3},
      {"AC4 Monte-Carlo equivalence", ac4}, {"AC5 kernel estimate", ac5}, {"AC6 dct2", ac6},
      {"AC7 HNSW recall", ac7},           {"AC8 frozen memory", ac8},    {"AC9 HNS aggregation", ac9},
      {"AC10 throughput floor", ac10}};
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
