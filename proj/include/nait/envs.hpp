#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nait/random.hpp"
#include "nait/representation.hpp"

namespace nait {

struct EnvStep {
  Frame observation;
  double reward = 0.0;
  bool done = false;
};

// Contract every pixel environment exposes to the agent and harness.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual Frame reset() = 0;
  // Throws ProtocolError when called after a terminal step without reset().
  virtual EnvStep step(int action) = 0;
  virtual std::size_t action_count() const = 0;
  virtual FrameShape frame_shape() const = 0;
};

struct RandomWalkConfig {
  int n_states = 19;
  int reversed_state = 15;
  int goal_state = 19;  // 1-indexed
  int start_state = 9;
  std::size_t frame_size = 5;
  double noise = 0.1;
  double gamma = 0.9;
  std::size_t horizon = 200;
  int rewarding_action = 1;  // action that pays at the goal state
  std::uint64_t seed = 0;

  void validate() const;
};

// Mean intensity for a 1-indexed state: linear map of 1..n onto [-1, 1].
double state_intensity(int state, int n_states);
// frame_size x frame_size i.i.d. N(intensity, noise).
Frame render(int state, int n_states, std::size_t frame_size, double noise, Rng& rng);

// States 1..n on a line; a0 moves left and a1 right except at the reversed
// state where they swap. Moving off either end is a self-transition. The
// rewarding action at the goal pays 1 and ends the episode; the horizon also
// ends it.
class RandomWalkEnv final : public Environment {
 public:
  explicit RandomWalkEnv(RandomWalkConfig config);

  Frame reset() override;
  EnvStep step(int action) override;
  std::size_t action_count() const override { return 2; }
  FrameShape frame_shape() const override { return {config_.frame_size, config_.frame_size}; }

  int state() const { return state_; }
  const RandomWalkConfig& config() const { return config_; }

  // Deterministic transition: (next state, reward, terminal).
  struct Transition {
    int next;
    double reward;
    bool terminal;
  };
  static Transition transition(const RandomWalkConfig& config, int state, int action);

 private:
  RandomWalkConfig config_;
  Rng rng_;
  int state_;
  std::size_t t_ = 0;
  bool done_ = true;
};

// One state, constant reward, fixed episode length. Harness plumbing checks.
class ConstantRewardEnv final : public Environment {
 public:
  ConstantRewardEnv(double reward, std::size_t episode_length, std::size_t actions = 2,
                    FrameShape shape = {2, 2});

  Frame reset() override;
  EnvStep step(int action) override;
  std::size_t action_count() const override { return actions_; }
  FrameShape frame_shape() const override { return shape_; }

 private:
  double reward_;
  std::size_t length_;
  std::size_t actions_;
  FrameShape shape_;
  std::size_t t_ = 0;
  bool done_ = true;
};

// Deterministic finite MDP; states are 0-based here.
struct TabularMdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<std::size_t> next;  // [s * n_actions + a]
  std::vector<double> reward;
  std::vector<bool> terminal;
  double gamma = 0.9;

  std::size_t at(std::size_t s, std::size_t a) const { return s * n_actions + a; }
};

TabularMdp random_walk_mdp(const RandomWalkConfig& config);

struct QTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> q;  // [s * n_actions + a]
  std::size_t iterations = 0;
  double residual = 0.0;

  double operator()(std::size_t s, std::size_t a) const { return q[s * n_actions + a]; }
  std::size_t greedy(std::size_t s) const;
};

// Bellman-optimality iteration until the sup-norm change is <= tol.
QTable value_iteration(const TabularMdp& mdp, double tol = 1e-12, std::size_t max_iterations = 100000);
// max over (s,a) of |Q - T Q|.
double bellman_residual(const TabularMdp& mdp, const QTable& q);

}  // namespace nait
