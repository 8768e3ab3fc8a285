#include "nait/value_memory.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstring>
#include <limits>
#include <string>
#include <string_view>

#include "binary_io.hpp"
#include "nait/error.hpp"

namespace nait {

namespace {
constexpr std::uint32_t kMemoryFormatVersion = 1;

bool same_bytes(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size_bytes()) == 0;
}
}  // namespace

std::uint64_t default_key_hash(std::span<const float> key) {
  if constexpr (std::endian::native == std::endian::little) {
    return std::hash<std::string_view>{}(
        std::string_view(reinterpret_cast<const char*>(key.data()), key.size_bytes()));
  } else {
    std::string bytes(key.size_bytes(), '\0');
    for (std::size_t i = 0; i < key.size(); ++i) {
      const float v = io::to_little(key[i]);
      std::memcpy(bytes.data() + i * sizeof(float), &v, sizeof(float));
    }
    return std::hash<std::string>{}(bytes);
  }
}

std::vector<double> tricubic_weights(std::span<const double> distances) {
  const std::size_t k = distances.size();
  std::vector<double> w(k, k == 0 ? 0.0 : 1.0 / static_cast<double>(k));
  if (k == 0) return w;
  const double d_max = *std::max_element(distances.begin(), distances.end());
  if (!(d_max > 0.0)) return w;
  double total = 0.0;
  std::vector<double> tri(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double u = distances[i] / d_max;
    const double c = 1.0 - u * u * u;
    tri[i] = c * c * c;
    total += tri[i];
  }
  if (!(total > 0.0)) return w;
  return tri;
}

std::vector<double> kernel_weights(KernelKind kind, std::span<const double> distances) {
  if (kind == KernelKind::tricubic) return tricubic_weights(distances);
  return std::vector<double>(distances.size(),
                             distances.empty() ? 0.0 : 1.0 / static_cast<double>(distances.size()));
}

ActionMemory::ActionMemory(IndexParams params, MemoryOptions options, KeyHasher hasher)
    : index_(params), options_(options), hasher_(hasher ? hasher : default_key_hash) {}

double ActionMemory::frozen_value(PointId id) const {
  return update_episode_[id] == episode_ ? frozen_[id] : values_[id];
}

std::optional<PointId> ActionMemory::find_exact(std::span<const float> s) const {
  if (values_.empty() || s.size() != index_.dim()) return std::nullopt;
  const auto [first, last] = exact_.equal_range(hasher_(s));
  for (auto it = first; it != last; ++it) {
    if (same_bytes(index_.vector(it->second), s)) return it->second;
  }
  return std::nullopt;
}

std::optional<MemoryHit> ActionMemory::exact_lookup(std::span<const float> s) const {
  if (auto id = find_exact(s)) return MemoryHit{*id, values_[*id]};
  return std::nullopt;
}

QEstimate ActionMemory::estimate_q(std::span<const float> s, std::size_t k, bool use_frozen) const {
  if (k == 0) throw InvalidInput("estimate_q requires k >= 1");
  QEstimate est;
  if (values_.empty()) return est;
  if (s.size() != index_.dim()) throw InvalidInput("state dimension does not match memory");

  const bool filter = use_frozen && options_.frozen_filter;
  if (auto id = find_exact(s); id && !(filter && !in_frozen(*id))) {
    est.value = use_frozen ? frozen_value(*id) : values_[*id];
    est.exact_match = true;
    est.neighbor_count = 1;
    return est;
  }

  const bool filter_fresh = filter && fresh_ > 0;
  const std::size_t population = filter ? frozen_size() : values_.size();
  const bool enough = population >= k;
  // Below k entries the value is 0, but the mean distance over whatever is
  // stored still feeds the tie-break.
  const std::size_t want = enough ? k : population;
  if (want == 0) return est;
  std::vector<Neighbor> found;
  if (!filter_fresh) {
    found = index_.knn(s, want);
  } else {
    // At most fresh_ of the nearest points can be hidden, so want + fresh_
    // always leaves want frozen ones.
    const std::size_t limit = std::min(want + fresh_, values_.size());
    for (std::size_t fetch = std::min(2 * want, limit);; fetch = std::min(2 * fetch, limit)) {
      found = index_.knn(s, fetch);
      std::erase_if(found, [&](const Neighbor& n) { return !in_frozen(n.id); });
      if (found.size() >= want || fetch == limit) break;
    }
  }
  if (found.size() > want) found.resize(want);
  if (found.empty()) return est;

  std::vector<double> dist(found.size());
  double sq_total = 0.0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    sq_total += found[i].distance;
    dist[i] = std::sqrt(found[i].distance);
  }
  est.mean_sq_dist = sq_total / static_cast<double>(found.size());
  est.neighbor_count = found.size();
  if (!enough) return est;

  const auto w = kernel_weights(options_.kernel, dist);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    const double v = use_frozen ? frozen_value(found[i].id) : values_[found[i].id];
    num += w[i] * v;
    den += w[i];
  }
  est.value = num / den;
  return est;
}

void ActionMemory::apply(std::span<const float> s, double target, double alpha) {
  if (auto id = find_exact(s)) {
    const PointId i = *id;
    if (in_frozen(i)) {
      if (update_episode_[i] != episode_) {
        frozen_[i] = values_[i];
        update_episode_[i] = episode_;
      }
      values_[i] = frozen_[i] + alpha * (target - frozen_[i]);
    } else {
      values_[i] = target;
    }
    return;
  }
  const PointId id = index_.insert(s);
  exact_.emplace(hasher_(s), id);
  values_.push_back(target);
  frozen_.push_back(target);
  insert_episode_.push_back(episode_);
  ++fresh_;
  // Never equal to a live episode counter until the entry is first updated.
  update_episode_.push_back(std::numeric_limits<std::uint64_t>::max());
}

void ActionMemory::batch_update(std::span<const UpdateEntry> entries, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("learning rate must lie in (0, 1]");
  for (const auto& e : entries) {
    if (!std::isfinite(e.target)) throw InvalidInput("non-finite update target");
    if (index_.dim() != 0 && e.state.size() != index_.dim()) {
      throw InvalidInput("state dimension does not match memory");
    }
    for (float x : e.state) {
      if (!std::isfinite(x)) throw InvalidInput("non-finite state coordinate");
    }
  }
  for (const auto& e : entries) apply(e.state, e.target, alpha);
}

void ActionMemory::update(std::span<const float> s, double target, double alpha) {
  const UpdateEntry e{s, target};
  batch_update(std::span<const UpdateEntry>(&e, 1), alpha);
}

// Layout: index snapshot, then "NAIT" u32 version u64 episode u64 count
// f64 values[count] f64 frozen[count] u64 insert_episode[count] u64 update_episode[count]
void ActionMemory::save(std::ostream& out) const {
  index_.save(out);
  io::write_magic(out);
  io::write<std::uint32_t>(out, kMemoryFormatVersion);
  io::write<std::uint64_t>(out, episode_);
  io::write<std::uint64_t>(out, values_.size());
  io::write_array(out, values_.data(), values_.size());
  io::write_array(out, frozen_.data(), frozen_.size());
  io::write_array(out, insert_episode_.data(), insert_episode_.size());
  io::write_array(out, update_episode_.data(), update_episode_.size());
  if (!out) throw FormatError("failed writing memory section");
}

ActionMemory ActionMemory::load(std::istream& in, MemoryOptions options, KeyHasher hasher) {
  HnswIndex index = HnswIndex::load(in);
  io::expect_magic(in);
  const auto version = io::read<std::uint32_t>(in, "memory version");
  if (version != kMemoryFormatVersion) {
    throw FormatError("unsupported memory format version " + std::to_string(version));
  }
  const auto episode = io::read<std::uint64_t>(in, "episode");
  const auto count = io::read<std::uint64_t>(in, "memory count");
  if (count != index.size()) throw FormatError("memory count disagrees with index size");

  ActionMemory mem(index.params(), options, hasher);
  mem.values_.resize(count);
  mem.frozen_.resize(count);
  mem.insert_episode_.resize(count);
  mem.update_episode_.resize(count);
  io::read_array(in, mem.values_.data(), count, "values");
  io::read_array(in, mem.frozen_.data(), count, "frozen values");
  io::read_array(in, mem.insert_episode_.data(), count, "insert stamps");
  io::read_array(in, mem.update_episode_.data(), count, "update stamps");
  mem.index_ = std::move(index);
  mem.episode_ = episode;
  mem.fresh_ = static_cast<std::size_t>(std::count(mem.insert_episode_.begin(), mem.insert_episode_.end(), episode));
  mem.exact_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto id = static_cast<PointId>(i);
    mem.exact_.emplace(mem.hasher_(mem.index_.vector(id)), id);
  }
  return mem;
}

}  // namespace nait
