#include "nait/envs.hpp"

#include <cmath>
#include <string>

#include "nait/error.hpp"

namespace nait {

void RandomWalkConfig::validate() const {
  if (n_states < 1) throw ConfigError("random walk needs at least one state");
  auto in_range = [&](int s) { return s >= 1 && s <= n_states; };
  if (!in_range(start_state) || !in_range(reversed_state) || !in_range(goal_state)) {
    throw ConfigError("start, reversed and goal states must lie in 1..n_states");
  }
  if (frame_size < 1) throw ConfigError("frame size must be >= 1");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("noise must be >= 0");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (rewarding_action != 0 && rewarding_action != 1) throw ConfigError("rewarding action must be 0 or 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
}

double state_intensity(int state, int n_states) {
  if (n_states == 1) return 0.0;
  return 2.0 * static_cast<double>(state - 1) / static_cast<double>(n_states - 1) - 1.0;
}

Frame render(int state, int n_states, std::size_t frame_size, double noise, Rng& rng) {
  const double mean = state_intensity(state, n_states);
  Frame f(frame_size, frame_size, mean);
  if (noise > 0.0) {
    for (double& p : f.pixels()) p = mean + noise * standard_normal(rng);
  }
  return f;
}

RandomWalkEnv::RandomWalkEnv(RandomWalkConfig config)
    : config_(config), rng_(config.seed), state_(config.start_state) {
  config_.validate();
}

RandomWalkEnv::Transition RandomWalkEnv::transition(const RandomWalkConfig& c, int state, int action) {
  if (action != 0 && action != 1) throw InvalidInput("random walk action must be 0 or 1");
  if (state == c.goal_state && action == c.rewarding_action) return {state, 1.0, true};
  bool right = action == 1;
  if (state == c.reversed_state) right = !right;
  int next = state + (right ? 1 : -1);
  if (next < 1 || next > c.n_states) next = state;
  return {next, 0.0, false};
}

Frame RandomWalkEnv::reset() {
  state_ = config_.start_state;
  t_ = 0;
  done_ = false;
  return render(state_, config_.n_states, config_.frame_size, config_.noise, rng_);
}

EnvStep RandomWalkEnv::step(int action) {
  if (done_) throw ProtocolError("step() on a finished episode; call reset()");
  const Transition tr = transition(config_, state_, action);
  state_ = tr.next;
  ++t_;
  done_ = tr.terminal || t_ >= config_.horizon;
  return {render(state_, config_.n_states, config_.frame_size, config_.noise, rng_), tr.reward, done_};
}

ConstantRewardEnv::ConstantRewardEnv(double reward, std::size_t episode_length, std::size_t actions,
                                     FrameShape shape)
    : reward_(reward), length_(episode_length), actions_(actions), shape_(shape) {
  if (episode_length < 1) throw ConfigError("episode length must be >= 1");
  if (actions < 1) throw ConfigError("need at least one action");
  if (shape.height == 0 || shape.width == 0) throw ConfigError("frame shape must be non-empty");
}

Frame ConstantRewardEnv::reset() {
  t_ = 0;
  done_ = false;
  return Frame(shape_.height, shape_.width, 0.0);
}

EnvStep ConstantRewardEnv::step(int action) {
  if (done_) throw ProtocolError("step() on a finished episode; call reset()");
  if (action < 0 || static_cast<std::size_t>(action) >= actions_) throw InvalidInput("action out of range");
  ++t_;
  done_ = t_ >= length_;
  return {Frame(shape_.height, shape_.width, 0.0), reward_, done_};
}

TabularMdp random_walk_mdp(const RandomWalkConfig& config) {
  config.validate();
  TabularMdp mdp;
  mdp.n_states = static_cast<std::size_t>(config.n_states);
  mdp.n_actions = 2;
  mdp.gamma = config.gamma;
  mdp.next.resize(mdp.n_states * 2);
  mdp.reward.resize(mdp.n_states * 2);
  mdp.terminal.resize(mdp.n_states * 2);
  for (int s = 1; s <= config.n_states; ++s) {
    for (int a = 0; a < 2; ++a) {
      const auto tr = RandomWalkEnv::transition(config, s, a);
      const std::size_t i = mdp.at(static_cast<std::size_t>(s - 1), static_cast<std::size_t>(a));
      mdp.next[i] = static_cast<std::size_t>(tr.next - 1);
      mdp.reward[i] = tr.reward;
      mdp.terminal[i] = tr.terminal;
    }
  }
  return mdp;
}

}  // namespace nait
