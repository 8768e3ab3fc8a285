#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "nait/random.hpp"

namespace nait {

// Dense id assigned in insertion order, starting at 0.
using PointId = std::uint32_t;

struct Neighbor {
  PointId id;
  double distance;  // squared L2

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  }
  friend bool operator>(const Neighbor& a, const Neighbor& b) { return b < a; }
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct IndexParams {
  std::size_t M = 40;     // links per node on upper layers, 2M on layer 0
  std::size_t efc = 200;  // construction candidate list
  std::size_t efs = 200;  // search candidate list
  std::uint64_t seed = 0;

  void validate() const;
};

namespace detail {

// Reusable visited-marker arrays for concurrent readers. Copies start empty.
class VisitedPool {
 public:
  class List {
   public:
    void prepare(std::size_t n);
    bool test_and_set(PointId id) {
      if (marks_[id] == epoch_) return true;
      marks_[id] = epoch_;
      return false;
    }

   private:
    std::vector<std::uint32_t> marks_;
    std::uint32_t epoch_ = 0;
  };

  VisitedPool() = default;
  VisitedPool(const VisitedPool&) {}
  VisitedPool& operator=(const VisitedPool&) { return *this; }
  VisitedPool(VisitedPool&&) noexcept {}
  VisitedPool& operator=(VisitedPool&&) noexcept { return *this; }

  std::unique_ptr<List> acquire(std::size_t n);
  void release(std::unique_ptr<List> list);

 private:
  std::mutex mutex_;
  std::vector<std::unique_ptr<List>> free_;
};

}  // namespace detail

// Hierarchical navigable small-world graph over squared L2.
//
// Insertion samples a level floor(-ln(U) / ln(M)), descends greedily from the
// entry point through the layers above it, then on each of its layers runs a
// best-first search with efc candidates and links to at most M of them chosen
// by the neighbour-diversity heuristic. Reverse links are added and a neighbour
// whose list overflows (M, or 2M on layer 0) is re-pruned with the same
// heuristic; every dropped link is removed on both sides so adjacency stays
// symmetric.
//
// Single writer. knn() may run concurrently with other knn() calls.
class HnswIndex {
 public:
  static constexpr std::size_t kInitialCapacity = 1000;

  explicit HnswIndex(IndexParams params = {}, std::size_t dim = 0);

  // Dimension is fixed by the first insert when not given up front.
  PointId insert(std::span<const float> v);

  // min(k, size()) neighbours, ascending by (distance, id). Candidate list is
  // max(ef, k), ef defaulting to params().efs.
  std::vector<Neighbor> knn(std::span<const float> q, std::size_t k) const;
  std::vector<Neighbor> knn(std::span<const float> q, std::size_t k, std::size_t ef) const;

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::size_t dim() const { return dim_; }
  std::size_t capacity() const { return capacity_; }
  const IndexParams& params() const { return params_; }
  void set_efs(std::size_t efs);

  std::span<const float> vector(PointId id) const { return {data_.data() + std::size_t{id} * dim_, dim_}; }
  int level(PointId id) const { return levels_[id]; }
  int max_level() const { return max_level_; }
  PointId entry_point() const { return entry_; }
  std::span<const PointId> links(PointId id, int layer) const;
  std::size_t max_links(int layer) const { return layer == 0 ? 2 * params_.M : params_.M; }

  // Symmetry, degree caps and layer nesting. Returns false with the first problem in *why.
  bool check_integrity(std::string* why = nullptr) const;

  void save(std::ostream& out) const;
  static HnswIndex load(std::istream& in);

 private:
  double distance(std::span<const float> q, PointId id) const;
  double distance(PointId a, PointId b) const { return distance(vector(a), b); }
  int draw_level();
  void grow(std::size_t needed);
  std::vector<PointId>& links_mut(PointId id, int layer);

  PointId greedy_descend(std::span<const float> q, PointId start, int from_layer, int to_layer) const;
  std::vector<Neighbor> search_layer(std::span<const float> q, std::span<const Neighbor> entry,
                                     std::size_t ef, int layer) const;
  std::vector<Neighbor> select_neighbors(std::vector<Neighbor> candidates, std::size_t max_links) const;
  void shrink_if_needed(PointId id, int layer);
  void remove_link(PointId from, PointId to, int layer);

  IndexParams params_;
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::size_t capacity_ = 0;
  std::vector<float> data_;
  std::vector<int> levels_;
  // links_[id][layer]
  std::vector<std::vector<std::vector<PointId>>> links_;
  PointId entry_ = 0;
  int max_level_ = -1;
  double level_mult_;
  Rng rng_;
  std::uint64_t rng_draws_ = 0;
  mutable detail::VisitedPool visited_;
};

// Exact linear scan; ties broken by lower id.
class BruteForceIndex {
 public:
  explicit BruteForceIndex(std::size_t dim = 0) : dim_(dim) {}

  PointId insert(std::span<const float> v);
  std::vector<Neighbor> knn(std::span<const float> q, std::size_t k) const;

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const float> vector(PointId id) const { return {data_.data() + std::size_t{id} * dim_, dim_}; }

 private:
  std::size_t dim_;
  std::vector<float> data_;
};

std::vector<Neighbor> brute_knn(const BruteForceIndex& oracle, std::span<const float> q, std::size_t k);

// |approx ∩ exact| / k for one query.
double recall_at_k(std::span<const Neighbor> approx, std::span<const Neighbor> exact, std::size_t k);
// Mean recall over queries.
double recall(const HnswIndex& index, const BruteForceIndex& oracle,
              std::span<const std::vector<float>> queries, std::size_t k);

}  // namespace nait
