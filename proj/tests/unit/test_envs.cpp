#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "nait/envs.hpp"
#include "nait/error.hpp"

using namespace nait;

namespace {

RandomWalkConfig quiet() {
  RandomWalkConfig c;
  c.noise = 0.0;
  return c;
}

int walk_to_goal(const RandomWalkConfig& c, const QTable& q, std::size_t& steps) {
  RandomWalkEnv env(c);
  env.reset();
  double total = 0.0;
  steps = 0;
  for (bool done = false; !done;) {
    const auto a = static_cast<int>(q.greedy(static_cast<std::size_t>(env.state() - 1)));
    const EnvStep s = env.step(a);
    total += s.reward;
    done = s.done;
    ++steps;
  }
  return static_cast<int>(total);
}

}  // namespace

TEST_SUITE("envs") {

TEST_CASE("render intensities") {
  Rng rng(1);
  const Frame mid = render(9, 19, 5, 0.0, rng), lo = render(1, 19, 5, 0.0, rng), hi = render(19, 19, 5, 0.0, rng);
  CHECK(mid.size() == 25);
  for (double p : mid.pixels()) CHECK(p == doctest::Approx(-1.0 / 9.0).epsilon(1e-15));
  for (double p : lo.pixels()) CHECK(p == -1.0);
  for (double p : hi.pixels()) CHECK(p == 1.0);
  CHECK(state_intensity(10, 19) == 0.0);
}

TEST_CASE("reset frame statistics") {
  RandomWalkEnv env(RandomWalkConfig{});
  double sum = 0.0;
  std::size_t n = 0;
  for (int i = 0; i < 10000; ++i) {
    const Frame f = env.reset();
    CHECK(env.state() == 9);
    for (double p : f.pixels()) {
      sum += p;
      ++n;
    }
  }
  CHECK(std::abs(sum / static_cast<double>(n) + 1.0 / 9.0) < 0.005);
}

TEST_CASE("render noise has the configured spread") {
  Rng rng(2);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  while (n < 100000) {
    const Frame f = render(10, 19, 5, 0.1, rng);
    for (double p : f.pixels()) {
      sum += p;
      sq += p * p;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double sd = std::sqrt(sq / static_cast<double>(n) - mean * mean);
  CHECK(std::abs(mean) < 0.002);
  CHECK(std::abs(sd - 0.1) < 0.005);
}

TEST_CASE("chain moves") {
  const RandomWalkConfig c;
  CHECK(RandomWalkEnv::transition(c, 14, 1).next == 15);
  CHECK(RandomWalkEnv::transition(c, 15, 0).next == 16);
  CHECK(RandomWalkEnv::transition(c, 15, 1).next == 14);
  CHECK(RandomWalkEnv::transition(c, 9, 0).next == 8);
  CHECK(RandomWalkEnv::transition(c, 1, 0).next == 1);
  const auto g = RandomWalkEnv::transition(c, 19, 1);
  CHECK(g.reward == 1.0);
  CHECK(g.terminal);
  const auto stay = RandomWalkEnv::transition(c, 19, 0);
  CHECK(stay.next == 18);
  CHECK(stay.reward == 0.0);
  CHECK_THROWS_AS(RandomWalkEnv::transition(c, 3, 2), InvalidInput);

  RandomWalkConfig flipped = c;
  flipped.rewarding_action = 0;
  CHECK(RandomWalkEnv::transition(flipped, 19, 0).terminal);
  const auto edge = RandomWalkEnv::transition(flipped, 19, 1);
  CHECK(edge.next == 19);
  CHECK(!edge.terminal);
}

TEST_CASE("seven-state walk, every transition") {
  RandomWalkConfig c;
  c.n_states = 7;
  c.reversed_state = 5;
  c.goal_state = 7;
  c.start_state = 3;
  for (int s = 1; s <= 7; ++s) {
    for (int a = 0; a < 2; ++a) {
      const auto t = RandomWalkEnv::transition(c, s, a);
      if (s == 7 && a == 1) {
        CHECK(t.terminal);
        CHECK(t.reward == 1.0);
        continue;
      }
      const bool right = (a == 1) != (s == 5);
      const int expect = std::clamp(s + (right ? 1 : -1), 1, 7);
      CHECK(t.next == expect);
      CHECK(t.reward == 0.0);
      CHECK(!t.terminal);
    }
  }
  const auto q = value_iteration(random_walk_mdp(c));
  // To reach 7 from 3: 3->4->5 (a1), 5->6 (a0, reversed), 6->7 (a1), then the rewarding a1.
  CHECK(std::abs(q(2, 1) - std::pow(0.9, 4)) < 1e-9);
  CHECK(q.greedy(4) == 0);
}

TEST_CASE("episodes end and refuse further steps") {
  RandomWalkConfig c = quiet();
  c.start_state = 19;
  RandomWalkEnv env(c);
  CHECK_THROWS_AS(env.step(1), ProtocolError);
  env.reset();
  const EnvStep s = env.step(1);
  CHECK(s.reward == 1.0);
  CHECK(s.done);
  CHECK_THROWS_AS(env.step(0), ProtocolError);
  env.reset();
  CHECK(env.state() == 19);

  RandomWalkConfig h = quiet();
  h.horizon = 3;
  RandomWalkEnv short_env(h);
  short_env.reset();
  CHECK(!short_env.step(0).done);
  CHECK(!short_env.step(0).done);
  const EnvStep last = short_env.step(0);
  CHECK(last.done);
  CHECK(last.reward == 0.0);
}

TEST_CASE("rewards are 0 or 1") {
  RandomWalkEnv env(RandomWalkConfig{});
  Rng rng(3);
  for (int e = 0; e < 20; ++e) {
    env.reset();
    for (bool done = false; !done;) {
      const EnvStep s = env.step(static_cast<int>(rng() & 1));
      CHECK((s.reward == 0.0 || s.reward == 1.0));
      CHECK(s.observation.height() == 5);
      done = s.done;
    }
  }
}

TEST_CASE("noise-free observations identify the state") {
  Rng rng(4);
  std::set<double> seen;
  for (int s = 1; s <= 19; ++s) seen.insert(render(s, 19, 5, 0.0, rng).at(0, 0));
  CHECK(seen.size() == 19);
}

TEST_CASE("optimal Q values") {
  const RandomWalkConfig c;
  const auto q = value_iteration(random_walk_mdp(c), 1e-12);
  CHECK(q(18, 1) == 1.0);
  CHECK(std::abs(q(8, 1) - std::pow(0.9, 10)) < 1e-6);
  CHECK(q(8, 1) > q(8, 0));
  CHECK(q.greedy(14) == 0);
  CHECK(q.residual <= 1e-12);
  CHECK(bellman_residual(random_walk_mdp(c), q) <= 1e-12);
  std::size_t steps = 0;
  CHECK(walk_to_goal(quiet(), q, steps) == 1);
  CHECK(steps == 11);
}

TEST_CASE("interface shape") {
  RandomWalkEnv env(RandomWalkConfig{});
  CHECK(env.action_count() == 2);
  CHECK(env.frame_shape() == FrameShape{5, 5});
  ConstantRewardEnv dummy(0.5, 3);
  CHECK(dummy.action_count() == 2);
  dummy.reset();
  CHECK(dummy.step(0).reward == 0.5);
  CHECK(!dummy.step(1).done);
  CHECK(dummy.step(0).done);
  CHECK_THROWS_AS(dummy.step(0), ProtocolError);
}

TEST_CASE("config validation") {
  RandomWalkConfig c;
  c.start_state = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RandomWalkConfig{};
  c.noise = -0.1;
  CHECK_THROWS_AS(RandomWalkEnv{c}, ConfigError);
  c = RandomWalkConfig{};
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(ConstantRewardEnv(1.0, 0), ConfigError);
  TabularMdp bad = random_walk_mdp(RandomWalkConfig{});
  bad.gamma = 1.0;
  CHECK_THROWS_AS(value_iteration(bad), ConfigError);
}

TEST_CASE("same seed, same observations") {
  RandomWalkConfig c;
  c.seed = 11;
  RandomWalkEnv a(c), b(c);
  const Frame fa = a.reset(), fb = b.reset();
  CHECK(std::ranges::equal(fa.pixels(), fb.pixels()));
  const EnvStep sa = a.step(1), sb = b.step(1);
  CHECK(std::ranges::equal(sa.observation.pixels(), sb.observation.pixels()));
}

}  // TEST_SUITE
