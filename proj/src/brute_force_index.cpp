#include <algorithm>
#include <string>
#include <unordered_set>

#include "nait/ann_index.hpp"
#include "nait/error.hpp"
#include "nait/simd.hpp"

namespace nait {

PointId BruteForceIndex::insert(std::span<const float> v) {
  if (dim_ == 0) {
    if (v.empty()) throw InvalidInput("cannot insert an empty vector");
    dim_ = v.size();
  }
  if (v.size() != dim_) {
    throw InvalidInput("vector dimension " + std::to_string(v.size()) + " != index dimension " +
                       std::to_string(dim_));
  }
  const auto id = static_cast<PointId>(size());
  data_.insert(data_.end(), v.begin(), v.end());
  return id;
}

std::vector<Neighbor> BruteForceIndex::knn(std::span<const float> q, std::size_t k) const {
  const std::size_t n = size();
  if (n == 0 || k == 0) return {};
  if (q.size() != dim_) throw InvalidInput("query dimension does not match index dimension");
  const auto& kern = simd::active();
  std::vector<Neighbor> all(n);
  for (std::size_t i = 0; i < n; ++i) {
    all[i] = {static_cast<PointId>(i), kern.squared_l2_f32(q.data(), data_.data() + i * dim_, dim_)};
  }
  const std::size_t take = std::min(k, n);
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end());
  all.resize(take);
  return all;
}

std::vector<Neighbor> brute_knn(const BruteForceIndex& oracle, std::span<const float> q, std::size_t k) {
  return oracle.knn(q, k);
}

double recall_at_k(std::span<const Neighbor> approx, std::span<const Neighbor> exact, std::size_t k) {
  if (k == 0) return 0.0;
  std::unordered_set<PointId> truth;
  for (std::size_t i = 0; i < std::min(k, exact.size()); ++i) truth.insert(exact[i].id);
  std::size_t hits = 0;
  std::unordered_set<PointId> seen;
  for (std::size_t i = 0; i < std::min(k, approx.size()); ++i) {
    if (seen.insert(approx[i].id).second && truth.contains(approx[i].id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double recall(const HnswIndex& index, const BruteForceIndex& oracle,
              std::span<const std::vector<float>> queries, std::size_t k) {
  if (queries.empty()) return 0.0;
  double total = 0.0;
  for (const auto& q : queries) total += recall_at_k(index.knn(q, k), oracle.knn(q, k), k);
  return total / static_cast<double>(queries.size());
}

}  // namespace nait
