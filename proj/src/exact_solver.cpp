#include "uavnet/exact_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace uavnet {

void TabularMdp::validate() const {
  const std::size_t pairs = static_cast<std::size_t>(states) * actions;
  if (states < 1 || actions < 1) throw std::invalid_argument("mdp: empty state or action set");
  if (row_of.size() != pairs || reward.size() != pairs)
    throw std::invalid_argument("mdp: row_of/reward size must be states * actions");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double sum = 0.0;
    for (const auto& [to, p] : rows[r]) {
      if (to < 0 || to >= states) throw std::invalid_argument("mdp: successor out of range in row " + std::to_string(r));
      if (!(p >= 0.0)) throw std::invalid_argument("mdp: negative probability in row " + std::to_string(r));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("mdp: row " + std::to_string(r) + " sums to " + std::to_string(sum));
  }
  for (auto r : row_of)
    if (r < 0 || r >= static_cast<std::int32_t>(rows.size())) throw std::invalid_argument("mdp: bad row reference");
  for (double x : reward)
    if (!std::isfinite(x)) throw std::invalid_argument("mdp: non-finite reward");
}

namespace {

// E[V(s')] for every shared row.
std::vector<double> row_expectations(const TabularMdp& mdp, const ValueTable& v) {
  std::vector<double> e(mdp.rows.size());
  for (std::size_t r = 0; r < mdp.rows.size(); ++r) {
    double acc = 0.0;
    for (const auto& [to, p] : mdp.rows[r]) acc += p * v[to];
    e[r] = acc;
  }
  return e;
}

struct Greedy {
  int action;
  double value;
};

Greedy greedy_at(const TabularMdp& mdp, const std::vector<double>& ev, double gamma, int s, double tie_eps) {
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t base = mdp.at(s, 0);
  for (int a = 0; a < mdp.actions; ++a) best = std::max(best, mdp.reward[base + a] + gamma * ev[mdp.row_of[base + a]]);
  const double slack = tie_eps * (1.0 + std::abs(best));
  for (int a = 0; a < mdp.actions; ++a) {
    const double q = mdp.reward[base + a] + gamma * ev[mdp.row_of[base + a]];
    if (q >= best - slack) return {a, best};
  }
  return {0, best};
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
}

ValueTable solve_linear(const TabularMdp& mdp, const std::vector<std::vector<std::pair<int, double>>>& weights,
                        double gamma) {
  // weights[s] = list of (action, probability) used by the policy at s.
  const int n = mdp.states;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    trip.emplace_back(s, s, 1.0);
    for (const auto& [a, w] : weights[s]) {
      if (w == 0.0) continue;
      rhs[s] += w * mdp.reward[mdp.at(s, a)];
      for (const auto& [to, p] : mdp.row(s, a)) trip.emplace_back(s, to, -gamma * w * p);
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) throw std::runtime_error("policy evaluation: factorization failed");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw std::runtime_error("policy evaluation: solve failed");
  return ValueTable(x.data(), x.data() + n);
}

}  // namespace

double q_value(const TabularMdp& mdp, const ValueTable& v, double gamma, int s, int a) {
  double acc = 0.0;
  for (const auto& [to, p] : mdp.row(s, a)) acc += p * v[to];
  return mdp.reward[mdp.at(s, a)] + gamma * acc;
}

std::vector<double> q_values(const TabularMdp& mdp, const ValueTable& v, double gamma, int s) {
  std::vector<double> q(mdp.actions);
  for (int a = 0; a < mdp.actions; ++a) q[a] = q_value(mdp, v, gamma, s, a);
  return q;
}

TabularPolicy greedy_policy(const TabularMdp& mdp, const ValueTable& v, double gamma, double tie_eps) {
  const auto ev = row_expectations(mdp, v);
  TabularPolicy pi(mdp.states);
  for (int s = 0; s < mdp.states; ++s) pi[s] = greedy_at(mdp, ev, gamma, s, tie_eps).action;
  return pi;
}

double bellman_residual(const TabularMdp& mdp, const ValueTable& v, double gamma) {
  const auto ev = row_expectations(mdp, v);
  double worst = 0.0;
  for (int s = 0; s < mdp.states; ++s)
    worst = std::max(worst, std::abs(greedy_at(mdp, ev, gamma, s, 0.0).value - v[s]));
  return worst;
}

ValueTable evaluate_policy(const TabularMdp& mdp, const TabularPolicy& policy, double gamma) {
  check_gamma(gamma);
  if (static_cast<int>(policy.size()) != mdp.states) throw std::invalid_argument("policy size mismatch");
  std::vector<std::vector<std::pair<int, double>>> w(mdp.states);
  for (int s = 0; s < mdp.states; ++s) {
    if (policy[s] < 0 || policy[s] >= mdp.actions) throw std::invalid_argument("policy action out of range");
    w[s] = {{policy[s], 1.0}};
  }
  return solve_linear(mdp, w, gamma);
}

ValueTable evaluate_policy(const TabularMdp& mdp, const std::vector<std::vector<double>>& probs, double gamma) {
  check_gamma(gamma);
  if (static_cast<int>(probs.size()) != mdp.states) throw std::invalid_argument("policy size mismatch");
  std::vector<std::vector<std::pair<int, double>>> w(mdp.states);
  for (int s = 0; s < mdp.states; ++s) {
    if (static_cast<int>(probs[s].size()) != mdp.actions) throw std::invalid_argument("policy row size mismatch");
    double sum = 0.0;
    for (int a = 0; a < mdp.actions; ++a) {
      if (probs[s][a] < 0.0) throw std::invalid_argument("negative action probability");
      sum += probs[s][a];
      if (probs[s][a] > 0.0) w[s].emplace_back(a, probs[s][a]);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("action probabilities must sum to 1");
  }
  return solve_linear(mdp, w, gamma);
}

PolicyIterationResult policy_iteration(const TabularMdp& mdp, const SolverOptions& opt) {
  check_gamma(opt.gamma);
  mdp.validate();
  PolicyIterationResult out;
  out.policy.assign(mdp.states, 0);
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.values = evaluate_policy(mdp, out.policy, opt.gamma);
    const auto ev = row_expectations(mdp, out.values);
    bool changed = false;
    for (int s = 0; s < mdp.states; ++s) {
      const auto g = greedy_at(mdp, ev, opt.gamma, s, opt.tie_eps);
      const double cur = mdp.reward[mdp.at(s, out.policy[s])] + opt.gamma * ev[mdp.row_of[mdp.at(s, out.policy[s])]];
      // Switch only on a strict improvement so the loop cannot cycle between tied actions.
      if (g.action != out.policy[s] && g.value > cur + opt.tie_eps * (1.0 + std::abs(cur))) {
        out.policy[s] = g.action;
        changed = true;
      }
    }
    if (!changed) break;
    ++out.improvements;
  }
  // Canonical lowest-index tie-breaking on the converged values.
  out.policy = greedy_policy(mdp, out.values, opt.gamma, opt.tie_eps);
  out.values = evaluate_policy(mdp, out.policy, opt.gamma);
  out.residual = bellman_residual(mdp, out.values, opt.gamma);
  return out;
}

ValueIterationResult value_iteration(const TabularMdp& mdp, const SolverOptions& opt) {
  check_gamma(opt.gamma);
  mdp.validate();
  ValueIterationResult out;
  out.values.assign(mdp.states, 0.0);
  ValueTable next(mdp.states);
  // ||V_{k+1} - V_k|| <= tol (1 - gamma) bounds the distance to V* by tol.
  const double stop = opt.tol * (1.0 - opt.gamma);
  for (; out.sweeps < opt.max_iterations;) {
    const auto ev = row_expectations(mdp, out.values);
    double delta = 0.0;
    for (int s = 0; s < mdp.states; ++s) {
      next[s] = greedy_at(mdp, ev, opt.gamma, s, 0.0).value;
      delta = std::max(delta, std::abs(next[s] - out.values[s]));
    }
    out.values.swap(next);
    ++out.sweeps;
    out.residual_trace.push_back(delta);
    if (delta <= stop) break;
  }
  out.residual = bellman_residual(mdp, out.values, opt.gamma);
  out.policy = greedy_policy(mdp, out.values, opt.gamma, opt.tie_eps);
  return out;
}

void write_policy_csv(const std::string& path, const TabularPolicy& policy, const ValueTable& values) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.precision(17);
  f << "state,action,value\n";
  for (std::size_t s = 0; s < policy.size(); ++s) f << s << ',' << policy[s] << ',' << values[s] << '\n';
}

}  // namespace uavnet
