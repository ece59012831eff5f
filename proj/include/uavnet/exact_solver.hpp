#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace uavnet {

/// Finite MDP with sparse transition rows shared between (state, action)
/// pairs. Many actions differ only in their reward (power splits with the
/// same flight), so each pair points at a row instead of owning one.
struct TabularMdp {
  using Row = std::vector<std::pair<int, double>>;

  int states = 0;
  int actions = 0;
  std::vector<Row> rows;
  std::vector<std::int32_t> row_of;  // states * actions
  std::vector<double> reward;        // states * actions

  std::size_t at(int s, int a) const { return static_cast<std::size_t>(s) * actions + a; }
  const Row& row(int s, int a) const { return rows[row_of[at(s, a)]]; }

  /// Throws std::invalid_argument unless every row is a probability vector
  /// (sum within 1e-12) over valid successor indices.
  void validate() const;
};

using TabularPolicy = std::vector<int>;
using ValueTable = std::vector<double>;

struct SolverOptions {
  double gamma = 0.9;
  double tol = 1e-8;
  /// Q-values within tie_eps * (1 + |Q|) of the best count as ties and go
  /// to the lowest action index.
  double tie_eps = 1e-12;
  int max_iterations = 100000;
};

struct PolicyIterationResult {
  TabularPolicy policy;
  ValueTable values;
  int improvements = 0;
  double residual = 0.0;
};

struct ValueIterationResult {
  ValueTable values;
  TabularPolicy policy;  // greedy w.r.t. values
  int sweeps = 0;
  double residual = 0.0;
  std::vector<double> residual_trace;  // sup-norm change per sweep
};

/// Q(s, a) = r(s, a) + gamma * E[V(s')].
double q_value(const TabularMdp& mdp, const ValueTable& v, double gamma, int s, int a);
std::vector<double> q_values(const TabularMdp& mdp, const ValueTable& v, double gamma, int s);

TabularPolicy greedy_policy(const TabularMdp& mdp, const ValueTable& v, double gamma, double tie_eps = 1e-12);

/// sup_s |max_a Q(s, a) - V(s)|.
double bellman_residual(const TabularMdp& mdp, const ValueTable& v, double gamma);

/// Howard policy iteration with exact (sparse LU) evaluation, starting from
/// action 0 everywhere.
PolicyIterationResult policy_iteration(const TabularMdp& mdp, const SolverOptions& opt = {});

/// Synchronous sweeps from V = 0 until the Bellman residual is below tol.
ValueIterationResult value_iteration(const TabularMdp& mdp, const SolverOptions& opt = {});

/// Exact value of a deterministic policy.
ValueTable evaluate_policy(const TabularMdp& mdp, const TabularPolicy& policy, double gamma);

/// Exact value of a stochastic policy; probs[s][a] sums to 1 per state.
ValueTable evaluate_policy(const TabularMdp& mdp, const std::vector<std::vector<double>>& probs, double gamma);

/// CSV with columns state,action,value.
void write_policy_csv(const std::string& path, const TabularPolicy& policy, const ValueTable& values);

}  // namespace uavnet
