#include "nait/agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nait/error.hpp"

namespace nait {

void AgentConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (F < 1) throw ConfigError("F must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (r < 1) throw ConfigError("update period r must be >= 1");
  if (!(tiebreak_temp > 0.0) || !std::isfinite(tiebreak_temp)) throw ConfigError("tiebreak_temp must be > 0");
  if (!(tie_epsilon >= 0.0) || !std::isfinite(tie_epsilon)) throw ConfigError("tie_epsilon must be >= 0");
  if (encoder == EncoderKind::sparse && !(sparsity >= 1.0)) throw ConfigError("sparsity must be >= 1");
  index.validate();
}

std::string to_string(EncoderKind v) {
  switch (v) {
    case EncoderKind::dct: return "dct";
    case EncoderKind::sparse: return "sparse";
    case EncoderKind::very_sparse: return "very_sparse";
  }
  return "?";
}
std::string to_string(BootstrapMode v) { return v == BootstrapMode::next_action ? "next_action" : "greedy_max"; }
std::string to_string(TieBreakMode v) { return v == TieBreakMode::distance ? "distance" : "uniform"; }
std::string to_string(UpdateMode v) { return v == UpdateMode::intertrace ? "intertrace" : "monte_carlo"; }
std::string to_string(KernelKind v) { return v == KernelKind::tricubic ? "tricubic" : "uniform"; }

EncoderKind parse_encoder(const std::string& s) {
  if (s == "dct") return EncoderKind::dct;
  if (s == "sparse") return EncoderKind::sparse;
  if (s == "very_sparse" || s == "very-sparse") return EncoderKind::very_sparse;
  throw ConfigError("unknown encoder '" + s + "' (dct, sparse, very_sparse)");
}
BootstrapMode parse_bootstrap(const std::string& s) {
  if (s == "next_action" || s == "next-action") return BootstrapMode::next_action;
  if (s == "greedy_max" || s == "greedy-max") return BootstrapMode::greedy_max;
  throw ConfigError("unknown bootstrap '" + s + "' (next_action, greedy_max)");
}
TieBreakMode parse_tiebreak(const std::string& s) {
  if (s == "distance") return TieBreakMode::distance;
  if (s == "uniform") return TieBreakMode::uniform;
  throw ConfigError("unknown tiebreak '" + s + "' (distance, uniform)");
}
UpdateMode parse_update_mode(const std::string& s) {
  if (s == "intertrace") return UpdateMode::intertrace;
  if (s == "monte_carlo" || s == "monte-carlo") return UpdateMode::monte_carlo;
  throw ConfigError("unknown update mode '" + s + "' (intertrace, monte_carlo)");
}
KernelKind parse_kernel(const std::string& s) {
  if (s == "tricubic") return KernelKind::tricubic;
  if (s == "uniform") return KernelKind::uniform;
  throw ConfigError("unknown kernel '" + s + "' (tricubic, uniform)");
}

StateEncoder::StateEncoder(const AgentConfig& config, FrameShape frame)
    : kind_(config.encoder), feature_dim_(config.F) {
  if (frame.height == 0 || frame.width == 0) throw ConfigError("frame shape must be non-empty");
  const std::size_t d_in = FrameStack::kDepth * frame.height * frame.width;
  switch (kind_) {
    case EncoderKind::dct:
      dct_.emplace(frame, config.F);
      break;
    case EncoderKind::sparse:
      projection_.emplace(make_projection(d_in, config.F, config.sparsity, config.seed ^ 0x243f6a8885a308d3ULL));
      break;
    case EncoderKind::very_sparse:
      projection_.emplace(make_projection(d_in, config.F, std::sqrt(static_cast<double>(d_in)),
                                          config.seed ^ 0x243f6a8885a308d3ULL));
      break;
  }
}

StateVec StateEncoder::encode(const FrameStack& stack) const {
  if (dct_) return dct_->encode(stack);
  const auto x = stack.flatten();
  return project(x, *projection_);
}

std::vector<double> tiebreak_probabilities(std::span<const double> q, std::span<const double> msd,
                                           const AgentConfig& config) {
  std::vector<double> p(q.size(), 0.0);
  if (q.empty()) return p;
  const double q_max = *std::max_element(q.begin(), q.end());
  std::vector<std::size_t> cand;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (q_max - q[a] <= config.tie_epsilon) cand.push_back(a);
  }
  if (cand.size() == 1 || config.tiebreak == TieBreakMode::uniform) {
    for (auto a : cand) p[a] = 1.0 / static_cast<double>(cand.size());
    return p;
  }
  double top = -std::numeric_limits<double>::infinity();
  for (auto a : cand) top = std::max(top, msd[a] / config.tiebreak_temp);
  double total = 0.0;
  for (auto a : cand) {
    p[a] = std::exp(msd[a] / config.tiebreak_temp - top);
    total += p[a];
  }
  for (auto a : cand) p[a] /= total;
  return p;
}

ActionDecision select_action(std::span<const ActionMemory> memories, std::span<const float> s,
                             const AgentConfig& config, Rng& rng) {
  if (memories.empty()) throw InvalidInput("select_action needs at least one action memory");
  ActionDecision d;
  d.q_values.resize(memories.size());
  d.mean_sq_dists.resize(memories.size());
  for (std::size_t a = 0; a < memories.size(); ++a) {
    const QEstimate e = memories[a].estimate_q(s, config.k, false);
    d.q_values[a] = e.value;
    d.mean_sq_dists[a] = e.mean_sq_dist;
  }
  const auto p = tiebreak_probabilities(d.q_values, d.mean_sq_dists, config);
  std::size_t candidates = 0;
  std::size_t last = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] > 0.0) {
      ++candidates;
      last = a;
    }
  }
  if (candidates <= 1) {
    d.action = static_cast<int>(last);
    return d;
  }
  d.was_tiebreak = true;
  const double u = uniform01(rng);
  double acc = 0.0;
  d.action = static_cast<int>(last);
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    acc += p[a];
    if (u < acc) {
      d.action = static_cast<int>(a);
      break;
    }
  }
  return d;
}

namespace {
const AgentConfig& validated(const AgentConfig& c) {
  c.validate();
  return c;
}
}  // namespace

Agent::Agent(AgentConfig config, std::size_t action_count, FrameShape frame)
    : config_(config), frame_(frame), encoder_(validated(config), frame), trace_(config.gamma),
      rng_(config.seed) {
  if (action_count < 1) throw ConfigError("agent needs at least one action");
  memories_.reserve(action_count);
  for (std::size_t a = 0; a < action_count; ++a) {
    memories_.emplace_back(config_.index, config_.memory_options());
  }
}

double Agent::bootstrap_value(std::span<const float> s, int next_action) const {
  if (config_.bootstrap == BootstrapMode::next_action) {
    return memories_[static_cast<std::size_t>(next_action)].estimate_q(s, config_.k, true).value;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& m : memories_) best = std::max(best, m.estimate_q(s, config_.k, true).value);
  return best;
}

EpisodeResult Agent::run_episode(Environment& env, bool learn, std::size_t step_limit) {
  using clock = std::chrono::steady_clock;
  if (env.action_count() != memories_.size()) throw ConfigError("environment action count does not match agent");
  if (!(env.frame_shape() == frame_)) throw ConfigError("environment frame shape does not match agent");
  if (step_limit == 0) throw InvalidInput("step_limit must be >= 1");

  if (learn) {
    for (auto& m : memories_) m.begin_episode();
  }
  trace_.clear();

  EpisodeResult res;
  FrameStack stack(env.reset());
  StateVec s = encode(stack);
  ActionDecision d = act(s);
  for (std::size_t t = 0;; ++t) {
    const auto start = clock::now();
    if (learn) trace_.visit(s, d.action, t);
    EnvStep out = env.step(d.action);
    res.total_reward += out.reward;
    ++res.steps;
    ++total_steps_;
    if (out.done || res.steps >= step_limit) {
      if (learn) {
        trace_.step(out.reward, 0.0);
        finish_episode(trace_, memories_, config_.alpha);
      }
      res.terminated = out.done;
      res.step_seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
      break;
    }
    stack.push(std::move(out.observation));
    StateVec s_next = encode(stack);
    ActionDecision d_next = act(s_next);
    if (learn) {
      if (config_.update_mode == UpdateMode::intertrace) {
        trace_.step(out.reward, bootstrap_value(s_next, d_next.action));
        maybe_update(trace_, memories_, config_.alpha, config_.r);
      } else {
        trace_.step(out.reward, 0.0);
      }
    }
    s = std::move(s_next);
    d = std::move(d_next);
    res.step_seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
  }
  trace_.clear();
  if (learn) ++episodes_;
  return res;
}

}  // namespace nait
