#include <cstring>
#include <vector>

#include "nait/agent.hpp"
#include "nait/error.hpp"
#include "nait/simd.hpp"

namespace nait {

std::uint64_t TraceState::key(std::span<const float> s, int a) {
  std::uint64_t h = default_key_hash(s);
  h ^= static_cast<std::uint64_t>(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::optional<std::size_t> TraceState::find(std::span<const float> s, int a) const {
  const auto [first, last] = slots_.equal_range(key(s, a));
  for (auto it = first; it != last; ++it) {
    const Visit& v = visits_[it->second];
    if (v.action == a && v.state.size() == s.size() &&
        std::memcmp(v.state.data(), s.data(), s.size_bytes()) == 0) {
      return it->second;
    }
  }
  return std::nullopt;
}

bool TraceState::visit(std::span<const float> s, int a, std::size_t t) {
  if (find(s, a)) return false;
  slots_.emplace(key(s, a), visits_.size());
  visits_.push_back(Visit{StateVec(s.begin(), s.end()), a, t});
  returns_.push_back(0.0);
  discounts_.push_back(1.0);
  targets_.push_back(0.0);
  return true;
}

std::span<const double> TraceState::step(double reward, double q_next) {
  simd::active().intertrace_f64(returns_.data(), discounts_.data(), targets_.data(), returns_.size(), reward,
                                gamma_, q_next);
  ++steps_;
  return targets_;
}

void TraceState::clear() {
  steps_ = 0;
  visits_.clear();
  returns_.clear();
  discounts_.clear();
  targets_.clear();
  slots_.clear();
}

std::span<const double> intertrace_step(TraceState& trace, double reward, double q_next) {
  return trace.step(reward, q_next);
}

namespace {

void dispatch(const TraceState& trace, std::span<ActionMemory> memories, double alpha,
              std::span<const double> values, std::size_t r) {
  std::vector<std::vector<UpdateEntry>> per_action(memories.size());
  const auto visits = trace.visits();
  const std::size_t t = trace.steps() == 0 ? 0 : trace.steps() - 1;
  for (std::size_t i = 0; i < visits.size(); ++i) {
    const Visit& v = visits[i];
    if (r != 0 && (t - v.first_time) % r != 0) continue;
    if (v.action < 0 || static_cast<std::size_t>(v.action) >= memories.size()) {
      throw InvalidInput("trace action has no memory");
    }
    per_action[static_cast<std::size_t>(v.action)].push_back(UpdateEntry{v.state, values[i]});
  }
  for (std::size_t a = 0; a < memories.size(); ++a) {
    if (!per_action[a].empty()) memories[a].batch_update(per_action[a], alpha);
  }
}

}  // namespace

void maybe_update(const TraceState& trace, std::span<ActionMemory> memories, double alpha, std::size_t r) {
  if (r == 0) throw ConfigError("update period must be >= 1");
  if (trace.steps() == 0) return;
  dispatch(trace, memories, alpha, trace.targets(), r);
}

void finish_episode(TraceState& trace, std::span<ActionMemory> memories, double alpha) {
  dispatch(trace, memories, alpha, trace.returns(), 0);
  trace.clear();
}

}  // namespace nait
