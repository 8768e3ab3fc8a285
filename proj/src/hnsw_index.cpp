#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "binary_io.hpp"
#include "nait/ann_index.hpp"
#include "nait/error.hpp"
#include "nait/simd.hpp"

namespace nait {

namespace {
constexpr std::uint32_t kIndexFormatVersion = 1;
constexpr std::uint64_t kNoEntry = std::numeric_limits<std::uint64_t>::max();
}  // namespace

void IndexParams::validate() const {
  if (M < 2) throw ConfigError("HNSW M must be >= 2");
  if (efc < 1) throw ConfigError("HNSW efc must be >= 1");
  if (efs < 1) throw ConfigError("HNSW efs must be >= 1");
}

namespace detail {

void VisitedPool::List::prepare(std::size_t n) {
  if (marks_.size() < n) marks_.resize(n, 0);
  if (++epoch_ == 0) {
    std::fill(marks_.begin(), marks_.end(), 0);
    epoch_ = 1;
  }
}

std::unique_ptr<VisitedPool::List> VisitedPool::acquire(std::size_t n) {
  std::unique_ptr<List> list;
  {
    std::lock_guard lock(mutex_);
    if (!free_.empty()) {
      list = std::move(free_.back());
      free_.pop_back();
    }
  }
  if (!list) list = std::make_unique<List>();
  list->prepare(n);
  return list;
}

void VisitedPool::release(std::unique_ptr<List> list) {
  std::lock_guard lock(mutex_);
  free_.push_back(std::move(list));
}

}  // namespace detail

HnswIndex::HnswIndex(IndexParams params, std::size_t dim)
    : params_(params), dim_(dim), level_mult_(0.0), rng_(params.seed) {
  params_.validate();
  level_mult_ = 1.0 / std::log(static_cast<double>(params_.M));
}

void HnswIndex::set_efs(std::size_t efs) {
  if (efs < 1) throw ConfigError("HNSW efs must be >= 1");
  params_.efs = efs;
}

double HnswIndex::distance(std::span<const float> q, PointId id) const {
  return simd::active().squared_l2_f32(q.data(), data_.data() + std::size_t{id} * dim_, dim_);
}

int HnswIndex::draw_level() {
  ++rng_draws_;
  const double u = uniform_open_closed(rng_);
  return static_cast<int>(std::floor(-std::log(u) * level_mult_));
}

void HnswIndex::grow(std::size_t needed) {
  if (needed <= capacity_) return;
  std::size_t cap = capacity_ == 0 ? kInitialCapacity : capacity_;
  while (cap < needed) cap *= 2;
  data_.reserve(cap * dim_);
  levels_.reserve(cap);
  links_.reserve(cap);
  capacity_ = cap;
}

std::span<const PointId> HnswIndex::links(PointId id, int layer) const {
  const auto& per_node = links_[id];
  if (layer < 0 || static_cast<std::size_t>(layer) >= per_node.size()) return {};
  return per_node[static_cast<std::size_t>(layer)];
}

std::vector<PointId>& HnswIndex::links_mut(PointId id, int layer) {
  return links_[id][static_cast<std::size_t>(layer)];
}

PointId HnswIndex::greedy_descend(std::span<const float> q, PointId start, int from_layer,
                                  int to_layer) const {
  PointId cur = start;
  double cur_d = distance(q, cur);
  for (int layer = from_layer; layer > to_layer; --layer) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (PointId nb : links(cur, layer)) {
        const double d = distance(q, nb);
        if (d < cur_d || (d == cur_d && nb < cur)) {
          cur = nb;
          cur_d = d;
          changed = true;
        }
      }
    }
  }
  return cur;
}

// Returns the ef best points found, in no particular order.
std::vector<Neighbor> HnswIndex::search_layer(std::span<const float> q,
                                              std::span<const Neighbor> entry, std::size_t ef,
                                              int layer) const {
  auto visited = visited_.acquire(count_);
  // candidates: min-heap by distance; results: max-heap holding the best ef.
  std::vector<Neighbor> candidates;
  std::vector<Neighbor> results;
  candidates.reserve(ef + 1);
  results.reserve(ef + 1);
  const std::greater<> min_first;
  const std::less<> max_first;
  for (const Neighbor& e : entry) {
    if (visited->test_and_set(e.id)) continue;
    candidates.push_back(e);
    std::push_heap(candidates.begin(), candidates.end(), min_first);
    results.push_back(e);
    std::push_heap(results.begin(), results.end(), max_first);
    if (results.size() > ef) {
      std::pop_heap(results.begin(), results.end(), max_first);
      results.pop_back();
    }
  }

  const auto l2 = simd::active().squared_l2_f32;
  const float* base = data_.data();
  const auto layer_index = static_cast<std::size_t>(layer);
  while (!candidates.empty()) {
    const Neighbor c = candidates.front();
    if (results.size() >= ef && results.front() < c) break;
    std::pop_heap(candidates.begin(), candidates.end(), min_first);
    candidates.pop_back();
    const auto& per_node = links_[c.id];
    if (layer_index >= per_node.size()) continue;
    for (PointId nb : per_node[layer_index]) {
      if (visited->test_and_set(nb)) continue;
      const Neighbor n{nb, l2(q.data(), base + std::size_t{nb} * dim_, dim_)};
      if (results.size() < ef || n < results.front()) {
        candidates.push_back(n);
        std::push_heap(candidates.begin(), candidates.end(), min_first);
        results.push_back(n);
        std::push_heap(results.begin(), results.end(), max_first);
        if (results.size() > ef) {
          std::pop_heap(results.begin(), results.end(), max_first);
          results.pop_back();
        }
      }
    }
  }
  visited_.release(std::move(visited));
  return results;
}

// Keep a candidate only if it is closer to the base point than to every
// neighbour already kept.
std::vector<Neighbor> HnswIndex::select_neighbors(std::vector<Neighbor> candidates,
                                                  std::size_t max_links) const {
  std::sort(candidates.begin(), candidates.end());
  if (candidates.size() <= max_links) return candidates;
  std::vector<Neighbor> kept;
  kept.reserve(max_links);
  for (const Neighbor& c : candidates) {
    if (kept.size() == max_links) break;
    bool diverse = true;
    for (const Neighbor& r : kept) {
      if (distance(c.id, r.id) < c.distance) {
        diverse = false;
        break;
      }
    }
    if (diverse) kept.push_back(c);
  }
  return kept;
}

void HnswIndex::remove_link(PointId from, PointId to, int layer) {
  auto& l = links_mut(from, layer);
  l.erase(std::remove(l.begin(), l.end(), to), l.end());
}

void HnswIndex::shrink_if_needed(PointId id, int layer) {
  auto& current = links_mut(id, layer);
  const std::size_t cap = max_links(layer);
  if (current.size() <= cap) return;
  std::vector<Neighbor> cands;
  cands.reserve(current.size());
  for (PointId nb : current) cands.push_back({nb, distance(id, nb)});
  const auto kept = select_neighbors(cands, cap);
  std::vector<PointId> next;
  next.reserve(kept.size());
  for (const Neighbor& n : kept) next.push_back(n.id);
  std::vector<PointId> dropped;
  for (PointId nb : current) {
    if (std::find(next.begin(), next.end(), nb) == next.end()) dropped.push_back(nb);
  }
  current = std::move(next);
  for (PointId nb : dropped) remove_link(nb, id, layer);
}

PointId HnswIndex::insert(std::span<const float> v) {
  if (dim_ == 0) {
    if (v.empty()) throw InvalidInput("cannot insert an empty vector");
    dim_ = v.size();
  }
  if (v.size() != dim_) {
    throw InvalidInput("vector dimension " + std::to_string(v.size()) + " != index dimension " +
                       std::to_string(dim_));
  }
  if (count_ >= std::numeric_limits<PointId>::max()) throw InvalidInput("index is full");
  grow(count_ + 1);

  const auto id = static_cast<PointId>(count_);
  data_.insert(data_.end(), v.begin(), v.end());
  const int level = draw_level();
  levels_.push_back(level);
  links_.emplace_back(static_cast<std::size_t>(level) + 1);
  ++count_;
  const std::span<const float> q = vector(id);

  if (max_level_ < 0) {
    entry_ = id;
    max_level_ = level;
    return id;
  }

  PointId cur = greedy_descend(q, entry_, max_level_, level);
  std::vector<Neighbor> entry{{cur, distance(q, cur)}};
  for (int layer = std::min(level, max_level_); layer >= 0; --layer) {
    auto found = search_layer(q, entry, params_.efc, layer);
    // The new point is not yet linked, so it cannot appear in `found`.
    const auto chosen = select_neighbors(found, params_.M);
    auto& own = links_mut(id, layer);
    own.reserve(chosen.size());
    for (const Neighbor& n : chosen) {
      own.push_back(n.id);
      links_mut(n.id, layer).push_back(id);
    }
    for (const Neighbor& n : chosen) shrink_if_needed(n.id, layer);
    entry = std::move(found);
  }
  if (level > max_level_) {
    max_level_ = level;
    entry_ = id;
  }
  return id;
}

std::vector<Neighbor> HnswIndex::knn(std::span<const float> q, std::size_t k) const {
  return knn(q, k, params_.efs);
}

std::vector<Neighbor> HnswIndex::knn(std::span<const float> q, std::size_t k, std::size_t ef) const {
  if (count_ == 0) throw EmptyIndex("knn on an empty index");
  if (k == 0) throw InvalidInput("knn requires k >= 1");
  if (q.size() != dim_) {
    throw InvalidInput("query dimension " + std::to_string(q.size()) + " != index dimension " +
                       std::to_string(dim_));
  }
  const PointId start = greedy_descend(q, entry_, max_level_, 0);
  const Neighbor entry{start, distance(q, start)};
  auto found = search_layer(q, std::span<const Neighbor>(&entry, 1), std::max(ef, k), 0);
  const std::size_t keep = std::min(k, found.size());
  std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(keep), found.end());
  found.resize(keep);
  return found;
}

bool HnswIndex::check_integrity(std::string* why) const {
  auto fail = [&](std::string msg) {
    if (why != nullptr) *why = std::move(msg);
    return false;
  };
  for (std::size_t i = 0; i < count_; ++i) {
    const auto id = static_cast<PointId>(i);
    if (links_[i].size() != static_cast<std::size_t>(levels_[i]) + 1) {
      return fail("node " + std::to_string(i) + " layer count disagrees with its level");
    }
    for (int layer = 0; layer <= levels_[i]; ++layer) {
      const auto l = links(id, layer);
      if (l.size() > max_links(layer)) {
        return fail("node " + std::to_string(i) + " exceeds degree cap at layer " + std::to_string(layer));
      }
      for (PointId nb : l) {
        if (nb >= count_ || nb == id) return fail("node " + std::to_string(i) + " has an invalid link");
        if (levels_[nb] < layer) {
          return fail("link " + std::to_string(i) + "->" + std::to_string(nb) + " above target level");
        }
        const auto back = links(nb, layer);
        if (std::find(back.begin(), back.end(), id) == back.end()) {
          return fail("link " + std::to_string(i) + "->" + std::to_string(nb) + " at layer " +
                      std::to_string(layer) + " has no reverse link");
        }
        if (std::count(l.begin(), l.end(), nb) != 1) {
          return fail("node " + std::to_string(i) + " has a duplicate link");
        }
      }
    }
  }
  if (count_ > 0 && levels_[entry_] != max_level_) return fail("entry point is not on the top layer");
  return true;
}

// Layout (little-endian):
//   "NAIT" u32 version u32 F u64 count f32[count*F]
//   u32 M u32 efc u32 efs u64 seed u64 rng_draws u64 entry i32 max_level
//   per node: u32 level, then per layer 0..level: u32 n, u32 ids[n]
void HnswIndex::save(std::ostream& out) const {
  io::write_magic(out);
  io::write<std::uint32_t>(out, kIndexFormatVersion);
  io::write<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
  io::write<std::uint64_t>(out, count_);
  io::write_array(out, data_.data(), count_ * dim_);
  io::write<std::uint32_t>(out, static_cast<std::uint32_t>(params_.M));
  io::write<std::uint32_t>(out, static_cast<std::uint32_t>(params_.efc));
  io::write<std::uint32_t>(out, static_cast<std::uint32_t>(params_.efs));
  io::write<std::uint64_t>(out, params_.seed);
  io::write<std::uint64_t>(out, rng_draws_);
  io::write<std::uint64_t>(out, count_ == 0 ? kNoEntry : std::uint64_t{entry_});
  io::write<std::int32_t>(out, max_level_);
  for (std::size_t i = 0; i < count_; ++i) {
    io::write<std::uint32_t>(out, static_cast<std::uint32_t>(levels_[i]));
    for (const auto& layer : links_[i]) {
      io::write<std::uint32_t>(out, static_cast<std::uint32_t>(layer.size()));
      io::write_array(out, layer.data(), layer.size());
    }
  }
  if (!out) throw FormatError("failed writing index snapshot");
}

HnswIndex HnswIndex::load(std::istream& in) {
  io::expect_magic(in);
  const auto version = io::read<std::uint32_t>(in, "version");
  if (version != kIndexFormatVersion) {
    throw FormatError("unsupported index format version " + std::to_string(version));
  }
  const auto dim = io::read<std::uint32_t>(in, "dimension");
  const auto count = io::read<std::uint64_t>(in, "count");
  if (count > std::numeric_limits<PointId>::max() || (count > 0 && dim == 0)) {
    throw FormatError("implausible index header");
  }
  std::vector<float> data(count * dim);
  io::read_array(in, data.data(), data.size(), "vectors");

  IndexParams params;
  params.M = io::read<std::uint32_t>(in, "M");
  params.efc = io::read<std::uint32_t>(in, "efc");
  params.efs = io::read<std::uint32_t>(in, "efs");
  params.seed = io::read<std::uint64_t>(in, "seed");
  const auto draws = io::read<std::uint64_t>(in, "rng state");
  const auto entry = io::read<std::uint64_t>(in, "entry point");
  const auto max_level = io::read<std::int32_t>(in, "max level");
  try {
    params.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid index parameters: ") + e.what());
  }

  HnswIndex index(params, dim);
  index.grow(count);
  index.data_ = std::move(data);
  index.data_.reserve(index.capacity_ * dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto level = io::read<std::uint32_t>(in, "node level");
    if (level > 64) throw FormatError("implausible node level");
    index.levels_.push_back(static_cast<int>(level));
    auto& per_node = index.links_.emplace_back(level + 1);
    for (auto& layer : per_node) {
      const auto n = io::read<std::uint32_t>(in, "link count");
      if (n > 2 * params.M) throw FormatError("link list exceeds degree cap");
      layer.resize(n);
      io::read_array(in, layer.data(), n, "links");
      for (PointId nb : layer) {
        if (nb >= count) throw FormatError("link to unknown node");
      }
    }
  }
  index.count_ = count;
  if (count > 0) {
    if (entry >= count || max_level != index.levels_[entry]) throw FormatError("bad entry point");
    index.entry_ = static_cast<PointId>(entry);
    index.max_level_ = max_level;
  } else if (entry != kNoEntry) {
    throw FormatError("entry point on an empty index");
  }
  index.rng_.discard(draws);
  index.rng_draws_ = draws;
  return index;
}

}  // namespace nait
