#pragma once

// Replays a synthetic episode through the same trace/update calls the agent
// makes, with the one-step bootstrap lag.

#include <span>
#include <vector>

#include "nait/agent.hpp"

namespace testing_support {

struct SyntheticEpisode {
  std::vector<nait::StateVec> states;
  std::vector<int> actions;
  std::vector<double> rewards;
};

inline void drive_episode(std::span<nait::ActionMemory> memories, const SyntheticEpisode& ep,
                          const nait::AgentConfig& cfg, bool intertrace = true) {
  for (auto& m : memories) m.begin_episode();
  nait::TraceState trace(cfg.gamma);
  const std::size_t n = ep.states.size();
  for (std::size_t t = 0; t < n; ++t) {
    trace.visit(ep.states[t], ep.actions[t], t);
    if (t + 1 == n) {
      nait::intertrace_step(trace, ep.rewards[t], 0.0);
      break;
    }
    double q_next = 0.0;
    if (intertrace) {
      q_next = memories[static_cast<std::size_t>(ep.actions[t + 1])].estimate_q(ep.states[t + 1], cfg.k, true).value;
    }
    nait::intertrace_step(trace, ep.rewards[t], q_next);
    if (intertrace) nait::maybe_update(trace, memories, cfg.alpha, cfg.r);
  }
  nait::finish_episode(trace, memories, cfg.alpha);
}

// States drawn from a small pool so pairs repeat within and across episodes.
inline SyntheticEpisode random_episode(nait::Rng& rng, std::size_t max_len, std::size_t pool, std::size_t dim,
                                       std::size_t actions, bool integer_rewards) {
  SyntheticEpisode ep;
  const std::size_t len = 1 + static_cast<std::size_t>(nait::uniform01(rng) * static_cast<double>(max_len));
  for (std::size_t t = 0; t < len; ++t) {
    const auto id = static_cast<std::size_t>(nait::uniform01(rng) * static_cast<double>(pool));
    nait::StateVec s(dim);
    for (std::size_t d = 0; d < dim; ++d) s[d] = static_cast<float>((id * 7 + d * 3) % 11) - 5.0f + 0.125f * id;
    ep.states.push_back(std::move(s));
    ep.actions.push_back(static_cast<int>(nait::uniform01(rng) * static_cast<double>(actions)));
    if (integer_rewards) {
      ep.rewards.push_back(static_cast<double>(static_cast<int>(nait::uniform01(rng) * 5.0) - 2));
    } else {
      ep.rewards.push_back(nait::uniform01(rng) * 2.0 - 1.0);
    }
  }
  return ep;
}

}  // namespace testing_support
