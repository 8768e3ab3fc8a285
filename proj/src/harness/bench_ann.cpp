#include <chrono>
#include <cstdio>
#include <ostream>

#include "nait/ann_index.hpp"
#include "nait/error.hpp"
#include "nait/harness.hpp"

namespace nait::harness {

std::vector<StateVec> random_walk_dataset(std::size_t n, std::size_t F, std::uint64_t seed) {
  RandomWalkConfig rw;
  rw.seed = mix_seed(seed, 2);
  RandomWalkEnv env(rw);
  const DctEncoder encoder(env.frame_shape(), F);
  Rng policy(mix_seed(seed, 3));
  std::vector<StateVec> out;
  out.reserve(n);
  FrameStack stack(env.reset());
  while (out.size() < n) {
    out.push_back(encoder.encode(stack));
    EnvStep s = env.step(uniform01(policy) < 0.5 ? 0 : 1);
    if (s.done) {
      stack.reset(env.reset());
    } else {
      stack.push(std::move(s.observation));
    }
  }
  return out;
}

std::vector<StateVec> gaussian_clusters(std::size_t n, std::size_t dim, std::size_t clusters, double spread,
                                        std::uint64_t seed) {
  if (clusters == 0 || dim == 0) throw ConfigError("gaussian clusters need clusters >= 1 and dim >= 1");
  Rng rng(seed);
  std::vector<std::vector<double>> centers(clusters, std::vector<double>(dim));
  for (auto& c : centers) {
    for (double& x : c) x = standard_normal(rng);
  }
  std::vector<StateVec> out(n, StateVec(dim));
  for (auto& p : out) {
    const auto& c = centers[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(clusters))];
    for (std::size_t d = 0; d < dim; ++d) p[d] = static_cast<float>(c[d] + spread * standard_normal(rng));
  }
  return out;
}

std::vector<BenchRow> bench_ann(const BenchConfig& c) {
  using clock = std::chrono::steady_clock;
  if (c.n == 0 || c.queries == 0 || c.k == 0) throw ConfigError("bench needs n, queries and k >= 1");
  std::vector<StateVec> all;
  if (c.source == "random_walk") {
    all = random_walk_dataset(c.n + c.queries, c.F, c.seed);
  } else if (c.source == "gaussian") {
    all = gaussian_clusters(c.n + c.queries, c.F, c.clusters, c.cluster_spread, c.seed);
  } else {
    throw ConfigError("unknown bench source '" + c.source + "' (random_walk, gaussian)");
  }
  // Queries are the last points of the stream, disjoint from the indexed set.
  const std::vector<StateVec> data(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(c.n));
  const std::vector<StateVec> queries(all.begin() + static_cast<std::ptrdiff_t>(c.n), all.end());

  BruteForceIndex brute(c.F);
  for (const auto& v : data) brute.insert(v);
  std::vector<std::vector<Neighbor>> truth;
  truth.reserve(queries.size());
  const auto brute_start = clock::now();
  for (const auto& q : queries) truth.push_back(brute.knn(q, c.k));
  const double brute_seconds = std::chrono::duration<double>(clock::now() - brute_start).count();

  std::vector<BenchRow> rows;
  if (c.include_brute_force) {
    double recall_sum = 0.0;
    for (std::size_t i = 0; i < queries.size(); ++i) recall_sum += recall_at_k(truth[i], truth[i], c.k);
    rows.push_back({"brute", 0, 0, 0, recall_sum / static_cast<double>(queries.size()),
                    brute_seconds > 0 ? static_cast<double>(queries.size()) / brute_seconds : 0.0});
  }
  for (std::size_t M : c.M) {
    for (std::size_t efc : c.efc) {
      IndexParams p;
      p.M = M;
      p.efc = efc;
      p.seed = c.seed;
      HnswIndex index(p, c.F);
      for (const auto& v : data) index.insert(v);
      for (std::size_t efs : c.efs) {
        double recall_sum = 0.0;
        const auto start = clock::now();
        std::vector<std::vector<Neighbor>> found;
        found.reserve(queries.size());
        for (const auto& q : queries) found.push_back(index.knn(q, c.k, efs));
        const double seconds = std::chrono::duration<double>(clock::now() - start).count();
        for (std::size_t i = 0; i < queries.size(); ++i) recall_sum += recall_at_k(found[i], truth[i], c.k);
        rows.push_back({"hnsw", efs, efc, M, recall_sum / static_cast<double>(queries.size()),
                        seconds > 0 ? static_cast<double>(queries.size()) / seconds : 0.0});
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchHeader << '\n';
  for (const auto& r : rows) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.6f,%.1f\n", r.index.c_str(), r.efs, r.efc, r.M, r.recall,
                  r.queries_per_second);
    out << buf;
  }
}

}  // namespace nait::harness
