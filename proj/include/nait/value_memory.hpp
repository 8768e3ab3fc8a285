#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "nait/ann_index.hpp"
#include "nait/representation.hpp"

namespace nait {

enum class KernelKind { tricubic, uniform };

struct QEstimate {
  double value = 0.0;
  double mean_sq_dist = 0.0;  // 0 whenever the exact-match branch fired
  std::size_t neighbor_count = 0;
  bool exact_match = false;
};

struct MemoryHit {
  PointId id;
  double value;
};

struct UpdateEntry {
  std::span<const float> state;
  double target;
};

struct MemoryOptions {
  KernelKind kernel = KernelKind::tricubic;
  // Frozen lookups skip points inserted during the current episode.
  bool frozen_filter = true;
};

// Hash of the raw little-endian bytes of a state vector.
using KeyHasher = std::uint64_t (*)(std::span<const float>);
std::uint64_t default_key_hash(std::span<const float> key);

// (1 - (d/d_max)^3)^3 per neighbour, uniform 1/k when d_max == 0 or every weight is 0.
std::vector<double> tricubic_weights(std::span<const double> distances);
std::vector<double> kernel_weights(KernelKind kind, std::span<const double> distances);

// Value memory for one action: an HNSW index over stored states, a bit-exact
// lookup table and a current/frozen pair of values per point.
//
// The frozen view is the memory as of the last begin_episode(). It is kept
// lazily: an entry's pre-episode value is copied aside the first time the
// entry is updated during an episode, so begin_episode() is O(1).
class ActionMemory {
 public:
  explicit ActionMemory(IndexParams params = {}, MemoryOptions options = {},
                        KeyHasher hasher = default_key_hash);

  void begin_episode() {
    ++episode_;
    fresh_ = 0;
  }
  std::uint64_t episode() const { return episode_; }

  std::optional<MemoryHit> exact_lookup(std::span<const float> s) const;
  QEstimate estimate_q(std::span<const float> s, std::size_t k, bool use_frozen) const;

  // Existing entries (present before this episode) move from their frozen
  // value toward the target: v = f + alpha (target - f). Anything else is
  // written as the target directly, inserting the state when it is new.
  // All targets are validated before any entry is touched.
  void batch_update(std::span<const UpdateEntry> entries, double alpha);
  void update(std::span<const float> s, double target, double alpha);

  std::size_t size() const { return values_.size(); }
  std::size_t frozen_size() const { return values_.size() - fresh_; }
  double value(PointId id) const { return values_[id]; }
  double frozen_value(PointId id) const;
  // True when the point belongs to the frozen copy (inserted before this episode).
  bool in_frozen(PointId id) const { return insert_episode_[id] < episode_; }
  std::uint64_t insert_episode(PointId id) const { return insert_episode_[id]; }
  std::uint64_t update_episode(PointId id) const { return update_episode_[id]; }

  const HnswIndex& index() const { return index_; }
  const MemoryOptions& options() const { return options_; }
  void set_options(MemoryOptions options) { options_ = options; }

  void save(std::ostream& out) const;
  static ActionMemory load(std::istream& in, MemoryOptions options = {},
                           KeyHasher hasher = default_key_hash);

 private:
  std::optional<PointId> find_exact(std::span<const float> s) const;
  void apply(std::span<const float> s, double target, double alpha);

  HnswIndex index_;
  MemoryOptions options_;
  KeyHasher hasher_;
  std::unordered_multimap<std::uint64_t, PointId> exact_;
  std::vector<double> values_;
  std::vector<double> frozen_;
  std::vector<std::uint64_t> insert_episode_;
  std::vector<std::uint64_t> update_episode_;
  std::uint64_t episode_ = 0;
  std::size_t fresh_ = 0;  // entries inserted during the current episode
};

}  // namespace nait
