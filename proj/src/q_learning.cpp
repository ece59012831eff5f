#include "uavnet/q_learning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "uavnet/tabular_model.hpp"

namespace uavnet {

QTable::QTable(int s, int a, double alpha_, double epsilon_)
    : states(s), actions(a), alpha(alpha_), epsilon(epsilon_), q(static_cast<std::size_t>(s) * a, 0.0) {
  if (s < 1 || a < 1) throw std::invalid_argument("q-table needs states and actions");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
}

int QTable::argmax(int s) const {
  const auto row = q.begin() + static_cast<std::ptrdiff_t>(s) * actions;
  return static_cast<int>(std::max_element(row, row + actions) - row);
}

double QTable::max(int s) const { return at(s, argmax(s)); }

TabularPolicy QTable::greedy_policy() const {
  TabularPolicy pi(states);
  for (int s = 0; s < states; ++s) pi[s] = argmax(s);
  return pi;
}

void QTable::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.precision(17);
  f << "state,action,value\n";
  for (int s = 0; s < states; ++s)
    for (int a = 0; a < actions; ++a) f << s << ',' << a << ',' << at(s, a) << '\n';
}

int select_action(const QTable& q, int s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < q.epsilon) return std::uniform_int_distribution<int>(0, q.actions - 1)(rng);
  return q.argmax(s);
}

void update(QTable& q, int s, int a, double r, int s_next, double gamma) {
  double& v = q.at(s, a);
  v += q.alpha * (r + gamma * q.max(s_next) - v);
}

int MdpSampler::reset(std::mt19937_64& rng) { return std::uniform_int_distribution<int>(0, mdp_.states - 1)(rng); }

std::pair<int, double> MdpSampler::step(int s, int a, std::mt19937_64& rng) {
  const auto& row = mdp_.row(s, a);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  int next = row.back().first;
  for (const auto& [to, p] : row) {
    if (u < p) {
      next = to;
      break;
    }
    u -= p;
  }
  return {next, mdp_.reward[mdp_.at(s, a)]};
}

int SimulatorEnv::states() const { return model_.mdp().states; }
int SimulatorEnv::actions() const { return model_.mdp().actions; }

int SimulatorEnv::reset(std::mt19937_64& rng) { return std::uniform_int_distribution<int>(0, states() - 1)(rng); }

std::pair<int, double> SimulatorEnv::step(int s, int a, std::mt19937_64& rng) {
  const auto& env = model_.environment();
  RandomStreams streams{std::mt19937_64(rng()), std::mt19937_64(rng())};
  const auto res = env.step(model_.space().state(s), model_.action(s, a), streams);
  return {model_.space().index(res.next), res.reward * model_.reward_scale()};
}

QTable train_q_learning(TabularEnv& env, const QLearningOptions& opt, std::mt19937_64& rng) {
  if (opt.episodes < 1 || opt.slots < 1) throw std::invalid_argument("q-learning needs episodes and slots");
  QTable q(env.states(), env.actions(), opt.alpha, opt.epsilon_start);
  std::vector<int> visits(q.q.size(), 0);
  const double total = static_cast<double>(opt.episodes) * opt.slots;
  const double decay = std::max(1.0, opt.decay_fraction * total);
  long long t = 0;
  for (int k = 0; k < opt.episodes; ++k) {
    int s = env.reset(rng);
    for (int i = 0; i < opt.slots; ++i, ++t) {
      const double frac = std::min(1.0, static_cast<double>(t) / decay);
      q.epsilon = opt.epsilon_start + (opt.epsilon_end - opt.epsilon_start) * frac;
      const int a = select_action(q, s, rng);
      const auto [next, r] = env.step(s, a, rng);
      int& n = visits[static_cast<std::size_t>(s) * q.actions + a];
      if (opt.alpha_power > 0.0) q.alpha = std::max(opt.alpha_min, std::pow(1.0 + n, -opt.alpha_power));
      ++n;
      update(q, s, a, r, next, opt.gamma);
      s = next;
    }
  }
  return q;
}

}  // namespace uavnet
