#include <algorithm>
#include <cmath>

#include "nait/envs.hpp"
#include "nait/error.hpp"

namespace nait {

namespace {

double backup(const TabularMdp& mdp, const std::vector<double>& q, std::size_t i) {
  if (mdp.terminal[i]) return mdp.reward[i];
  const std::size_t s2 = mdp.next[i];
  double best = q[mdp.at(s2, 0)];
  for (std::size_t a = 1; a < mdp.n_actions; ++a) best = std::max(best, q[mdp.at(s2, a)]);
  return mdp.reward[i] + mdp.gamma * best;
}

}  // namespace

std::size_t QTable::greedy(std::size_t s) const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < n_actions; ++a) {
    if ((*this)(s, a) > (*this)(s, best)) best = a;
  }
  return best;
}

QTable value_iteration(const TabularMdp& mdp, double tol, std::size_t max_iterations) {
  if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0)) throw ConfigError("value iteration needs gamma < 1");
  if (mdp.n_states == 0 || mdp.n_actions == 0) throw ConfigError("empty MDP");
  QTable out;
  out.n_states = mdp.n_states;
  out.n_actions = mdp.n_actions;
  out.q.assign(mdp.n_states * mdp.n_actions, 0.0);
  std::vector<double> next(out.q.size());
  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    double delta = 0.0;
    for (std::size_t i = 0; i < out.q.size(); ++i) {
      next[i] = backup(mdp, out.q, i);
      delta = std::max(delta, std::abs(next[i] - out.q[i]));
    }
    out.q.swap(next);
    if (delta <= tol) {
      ++out.iterations;
      break;
    }
  }
  out.residual = bellman_residual(mdp, out);
  return out;
}

double bellman_residual(const TabularMdp& mdp, const QTable& q) {
  double r = 0.0;
  for (std::size_t i = 0; i < q.q.size(); ++i) r = std::max(r, std::abs(q.q[i] - backup(mdp, q.q, i)));
  return r;
}

}  // namespace nait
