#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "uavnet/exact_solver.hpp"

namespace uavnet {

class TabularModel;

struct QTable {
  int states = 0;
  int actions = 0;
  double alpha = 0.1;
  double epsilon = 1.0;
  std::vector<double> q;

  QTable(int states, int actions, double alpha = 0.1, double epsilon = 1.0);

  double& at(int s, int a) { return q[static_cast<std::size_t>(s) * actions + a]; }
  double at(int s, int a) const { return q[static_cast<std::size_t>(s) * actions + a]; }
  /// Lowest index among the maximal entries of row s.
  int argmax(int s) const;
  double max(int s) const;
  TabularPolicy greedy_policy() const;

  void save_csv(const std::string& path) const;
};

/// Greedy with probability 1 - epsilon, otherwise uniform over all actions.
int select_action(const QTable& q, int s, std::mt19937_64& rng);

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
void update(QTable& q, int s, int a, double r, int s_next, double gamma);

/// A finite environment that Q-learning interacts with.
class TabularEnv {
 public:
  virtual ~TabularEnv() = default;
  virtual int states() const = 0;
  virtual int actions() const = 0;
  virtual int reset(std::mt19937_64& rng) = 0;
  /// Returns (next state, reward).
  virtual std::pair<int, double> step(int s, int a, std::mt19937_64& rng) = 0;
};

/// Samples successors directly from an explicit MDP; resets uniformly.
class MdpSampler : public TabularEnv {
 public:
  explicit MdpSampler(const TabularMdp& mdp) : mdp_(mdp) {}
  int states() const override { return mdp_.states; }
  int actions() const override { return mdp_.actions; }
  int reset(std::mt19937_64& rng) override;
  std::pair<int, double> step(int s, int a, std::mt19937_64& rng) override;

 private:
  const TabularMdp& mdp_;
};

/// Drives the simulator through a TabularModel's state and action indexing;
/// rewards carry the model's scale. Resets to a uniformly drawn state.
class SimulatorEnv : public TabularEnv {
 public:
  explicit SimulatorEnv(const TabularModel& model) : model_(model) {}
  int states() const override;
  int actions() const override;
  int reset(std::mt19937_64& rng) override;
  std::pair<int, double> step(int s, int a, std::mt19937_64& rng) override;

 private:
  const TabularModel& model_;
};

struct QLearningOptions {
  int episodes = 100;
  int slots = 1000;
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Fraction of all updates over which epsilon decays linearly.
  double decay_fraction = 0.5;
  /// Step size alpha_n = max(alpha_min, (1 + n)^-alpha_power) where n counts
  /// earlier visits of (s, a); alpha_power = 0 keeps the constant alpha.
  double alpha = 0.1;
  double alpha_power = 0.0;
  double alpha_min = 0.0;
};

QTable train_q_learning(TabularEnv& env, const QLearningOptions& opt, std::mt19937_64& rng);

}  // namespace uavnet
