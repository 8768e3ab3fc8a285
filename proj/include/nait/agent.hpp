#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nait/ann_index.hpp"
#include "nait/envs.hpp"
#include "nait/random.hpp"
#include "nait/representation.hpp"
#include "nait/value_memory.hpp"

namespace nait {

enum class EncoderKind { dct, sparse, very_sparse };
enum class BootstrapMode { next_action, greedy_max };
enum class TieBreakMode { distance, uniform };
enum class UpdateMode { intertrace, monte_carlo };

struct AgentConfig {
  std::size_t k = 64;
  std::size_t F = 289;
  double gamma = 0.99;
  double alpha = 0.1;
  std::size_t r = 50;
  IndexParams index{};
  double tiebreak_temp = 1.0;
  double tie_epsilon = 0.0;
  EncoderKind encoder = EncoderKind::dct;
  double sparsity = 3.0;  // used by the sparse encoder; very_sparse uses sqrt(D_in)
  BootstrapMode bootstrap = BootstrapMode::next_action;
  TieBreakMode tiebreak = TieBreakMode::distance;
  UpdateMode update_mode = UpdateMode::intertrace;
  KernelKind kernel = KernelKind::tricubic;
  bool frozen_filter = true;
  std::uint64_t seed = 0;

  void validate() const;
  MemoryOptions memory_options() const { return {kernel, frozen_filter}; }
};

std::string to_string(EncoderKind v);
std::string to_string(BootstrapMode v);
std::string to_string(TieBreakMode v);
std::string to_string(UpdateMode v);
std::string to_string(KernelKind v);
EncoderKind parse_encoder(const std::string& s);
BootstrapMode parse_bootstrap(const std::string& s);
TieBreakMode parse_tiebreak(const std::string& s);
UpdateMode parse_update_mode(const std::string& s);
KernelKind parse_kernel(const std::string& s);

// Maps a frame stack to a state vector with either the DCT block or a sparse
// random projection of the flattened stack.
class StateEncoder {
 public:
  StateEncoder(const AgentConfig& config, FrameShape frame);

  StateVec encode(const FrameStack& stack) const;
  std::size_t feature_dim() const { return feature_dim_; }
  EncoderKind kind() const { return kind_; }

 private:
  EncoderKind kind_;
  std::size_t feature_dim_;
  std::optional<DctEncoder> dct_;
  std::optional<ProjectionMatrix> projection_;
};

struct Visit {
  StateVec state;
  int action;
  std::size_t first_time;
};

// First-visit bookkeeping for the current episode. Only the running return
// G and discount Gamma are kept per unique (state, action) pair; rewards are
// folded in as they arrive and never stored.
class TraceState {
 public:
  explicit TraceState(double gamma = 0.99) : gamma_(gamma) {}

  // Registers (s, a) at time t. Appends a slot with G = 0, Gamma = 1 when the
  // pair is new; returns false for a revisit.
  bool visit(std::span<const float> s, int a, std::size_t t);
  // G += Gamma r; Gamma *= gamma; targets = G + Gamma q_next.
  std::span<const double> step(double reward, double q_next);

  std::size_t size() const { return visits_.size(); }
  bool empty() const { return visits_.empty(); }
  double gamma() const { return gamma_; }
  std::size_t steps() const { return steps_; }
  std::span<const Visit> visits() const { return visits_; }
  std::span<const double> returns() const { return returns_; }
  std::span<const double> discounts() const { return discounts_; }
  std::span<const double> targets() const { return targets_; }
  std::optional<std::size_t> find(std::span<const float> s, int a) const;

  void clear();

 private:
  static std::uint64_t key(std::span<const float> s, int a);

  double gamma_;
  std::size_t steps_ = 0;
  std::vector<Visit> visits_;
  std::vector<double> returns_;
  std::vector<double> discounts_;
  std::vector<double> targets_;
  std::unordered_multimap<std::uint64_t, std::size_t> slots_;
};

struct ActionDecision {
  int action = 0;
  std::vector<double> q_values;
  std::vector<double> mean_sq_dists;
  bool was_tiebreak = false;
};

// Greedy in the current memory; ties within tie_epsilon of the max are broken
// by softmax(mean_sq_dist / temp) or uniformly.
ActionDecision select_action(std::span<const ActionMemory> memories, std::span<const float> s,
                             const AgentConfig& config, Rng& rng);
// Probabilities over actions used by the tie-break, zero outside the
// candidate set.
std::vector<double> tiebreak_probabilities(std::span<const double> q_values,
                                           std::span<const double> mean_sq_dists,
                                           const AgentConfig& config);

std::span<const double> intertrace_step(TraceState& trace, double reward, double q_next);
// Writes targets for pairs with (t - t_i) mod r == 0, where t is the time of
// the reward most recently folded in.
void maybe_update(const TraceState& trace, std::span<ActionMemory> memories, double alpha, std::size_t r);
// Monte-Carlo update with the accumulated returns G, then clears the trace.
void finish_episode(TraceState& trace, std::span<ActionMemory> memories, double alpha);

struct EpisodeResult {
  double total_reward = 0.0;
  std::size_t steps = 0;
  bool terminated = false;  // env signalled done, as opposed to hitting step_limit
  std::vector<double> step_seconds;
};

class Agent {
 public:
  Agent(AgentConfig config, std::size_t action_count, FrameShape frame);

  // One full episode. With learn=false the memories are only read. When
  // step_limit cuts the episode short the collected returns are still
  // written as Monte-Carlo targets.
  EpisodeResult run_episode(Environment& env, bool learn = true,
                            std::size_t step_limit = std::numeric_limits<std::size_t>::max());

  ActionDecision act(std::span<const float> s) { return select_action(memories_, s, config_, rng_); }
  StateVec encode(const FrameStack& stack) const { return encoder_.encode(stack); }

  const AgentConfig& config() const { return config_; }
  std::size_t action_count() const { return memories_.size(); }
  FrameShape frame_shape() const { return frame_; }
  std::span<const ActionMemory> memories() const { return memories_; }
  std::span<ActionMemory> memories() { return memories_; }
  std::size_t total_steps() const { return total_steps_; }
  std::uint64_t episodes() const { return episodes_; }
  Rng& rng() { return rng_; }

  void save(std::ostream& out) const;
  static Agent load(std::istream& in, AgentConfig config, FrameShape frame);

 private:
  double bootstrap_value(std::span<const float> s, int next_action) const;

  AgentConfig config_;
  FrameShape frame_;
  StateEncoder encoder_;
  std::vector<ActionMemory> memories_;
  TraceState trace_;
  Rng rng_;
  std::size_t total_steps_ = 0;
  std::uint64_t episodes_ = 0;
};

}  // namespace nait
