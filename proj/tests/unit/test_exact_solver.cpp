#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>

#include "uavnet/exact_solver.hpp"
#include "uavnet/q_learning.hpp"
#include "uavnet/tabular_model.hpp"

using namespace uavnet;

namespace {

// Two states that alternate deterministically. Action 0 in state 0 pays 1,
// action 1 in state 0 pays 0.5 but stays in state 0.
TabularMdp two_state_chain() {
  TabularMdp m;
  m.states = 2;
  m.actions = 2;
  m.rows = {{{1, 1.0}}, {{0, 1.0}}};
  m.row_of = {0, 1, 1, 1};
  m.reward = {1.0, 0.5, 0.0, 0.0};
  return m;
}

Environment simple_env(double lambda = 0.5) {
  EnvironmentOptions o;
  o.lambda = lambda;
  o.all_los = true;
  FlightLimits f;
  f.allow_vertical = false;
  return Environment(simplified_topology(), ChannelParams{}, ResourceLimits{}, f, o);
}

}  // namespace

TEST_CASE("two-state chain: closed-form values") {
  const auto m = two_state_chain();
  m.validate();
  const double g = 0.9;
  // Alternating: V0 = 1 + g V1, V1 = g V0.
  const double v0 = 1.0 / (1.0 - g * g), v1 = g / (1.0 - g * g);
  const auto alt = evaluate_policy(m, TabularPolicy{0, 0}, g);
  CHECK(alt[0] == doctest::Approx(v0).epsilon(1e-12));
  CHECK(alt[1] == doctest::Approx(v1).epsilon(1e-12));
  // Staying in state 0 is worth 0.5 / (1 - g) = 5 < 5.263.
  const auto stay = evaluate_policy(m, TabularPolicy{1, 0}, g);
  CHECK(stay[0] == doctest::Approx(5.0).epsilon(1e-12));

  const auto pi = policy_iteration(m, {g});
  CHECK(pi.policy == TabularPolicy{0, 0});
  CHECK(pi.values[0] == doctest::Approx(v0).epsilon(1e-12));
  const auto vi = value_iteration(m, {g});
  CHECK(std::abs(vi.values[0] - v0) < 1e-7);
  CHECK(vi.policy == pi.policy);
}

TEST_CASE("two-state chain: a low alternating reward makes staying optimal") {
  // 0.4 / (1 - g^2) < 0.5 / (1 - g) for every g in (0, 1).
  auto m = two_state_chain();
  m.reward[0] = 0.4;
  for (double g : {0.1, 0.5, 0.9}) {
    const auto pi = policy_iteration(m, {g});
    CHECK(pi.policy[0] == 1);
    CHECK(pi.values[0] == doctest::Approx(0.5 / (1.0 - g)).epsilon(1e-10));
  }
}

TEST_CASE("stochastic policy evaluation matches the mixture closed form") {
  const auto m = two_state_chain();
  const double g = 0.5;
  // In state 0 play each action with probability 1/2:
  // V0 = 0.75 + g (0.5 V1 + 0.5 V0), V1 = g V0.
  const double v0 = 0.75 / (1.0 - 0.5 * g * g - 0.5 * g);
  const auto v = evaluate_policy(m, std::vector<std::vector<double>>{{0.5, 0.5}, {1.0, 0.0}}, g);
  CHECK(v[0] == doctest::Approx(v0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(g * v0).epsilon(1e-12));
}

TEST_CASE("greedy ties go to the lowest action") {
  TabularMdp m;
  m.states = 1;
  m.actions = 3;
  m.rows = {{{0, 1.0}}};
  m.row_of = {0, 0, 0};
  m.reward = {1.0, 2.0, 2.0};
  CHECK(greedy_policy(m, {0.0}, 0.9) == TabularPolicy{1});
  CHECK(policy_iteration(m).policy == TabularPolicy{1});
}

TEST_CASE("malformed MDP rows are rejected") {
  auto m = two_state_chain();
  m.rows[0] = {{1, 0.7}};
  CHECK_THROWS(m.validate());
  m = two_state_chain();
  m.rows[0] = {{2, 1.0}};
  CHECK_THROWS(m.validate());
}

TEST_CASE("policy CSV export") {
  const auto path = std::filesystem::temp_directory_path() / "uavnet_policy.csv";
  write_policy_csv(path.string(), {0, 1}, {1.5, 2.5});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "state,action,value");
  std::getline(in, line);
  CHECK(line.rfind("0,0,1.5", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("simplified state space has 3520 states") {
  const auto env = simple_env();
  SimplifiedStateSpace sp(env);
  CHECK(sp.size() == 22 * 5 * 32);
  CHECK(sp.size() == 3520);
  const auto all = sp.enumerate();
  for (int i = 0; i < sp.size(); i += 7) CHECK(sp.index(all[i]) == i);
  CHECK(sp.index(sp.state(3519)) == 3519);
}

TEST_CASE("state space refuses models it cannot enumerate") {
  EnvironmentOptions o;
  o.all_los = false;
  FlightLimits f;
  f.allow_vertical = false;
  const Environment nlos(simplified_topology(), ChannelParams{}, ResourceLimits{}, f, o);
  CHECK_THROWS_AS(SimplifiedStateSpace{nlos}, ConfigError);
  o.all_los = true;
  const Environment big(realistic_topology(), ChannelParams{}, ResourceLimits{}, f, o);
  CHECK_THROWS_AS(SimplifiedStateSpace{big}, ConfigError);
}

TEST_CASE("every kernel row is a probability vector") {
  const auto env = simple_env(0.3);
  SimplifiedStateSpace sp(env);
  for (int s = 0; s < sp.size(); ++s)
    for (int mv = 0; mv < env.moves().count(); ++mv) {
      double sum = 0.0;
      for (const auto& [t, p] : sp.transition_kernel(s, {mv, 0})) {
        CHECK(p > 0.0);
        CHECK(t >= 0);
        CHECK(t < sp.size());
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("kernel agrees with sampled simulator steps") {
  const auto env = simple_env(0.4);
  SimplifiedStateSpace sp(env);
  RandomStreams rng{std::mt19937_64(11), std::mt19937_64(12)};
  const int n = 40000;
  for (int s : {0, 37, 1234, 2900, 3519}) {
    const FlightAction flight{s % 8, 0};
    std::map<int, double> freq;
    const SystemState st = sp.state(s);
    UavAction a{flight, std::vector<double>(5, 0.0), std::vector<int>(5, 0)};
    for (int i = 0; i < n; ++i) freq[sp.index(env.step(st, a, rng).next)] += 1.0 / n;
    const auto kernel = sp.transition_kernel(s, flight);
    for (const auto& [t, p] : kernel) CHECK(std::abs(freq[t] - p) < 0.01);
    CHECK(freq.size() == kernel.size());
  }
}

TEST_CASE("full simplified MDP: solver internal checks") {
  TabularModel model(simple_env());
  const auto& m = model.mdp();
  CHECK(m.states == 3520);
  CHECK(m.actions == 8 * 357);
  m.validate();
  SolverOptions opt;
  const auto pi = policy_iteration(m, opt);
  CHECK(pi.residual <= 1e-8);
  CHECK(bellman_residual(m, pi.values, opt.gamma) <= 1e-8);
  const auto vi = value_iteration(m, opt);
  double gap = 0.0;
  for (int s = 0; s < m.states; ++s) gap = std::max(gap, std::abs(vi.values[s] - pi.values[s]));
  CHECK(gap <= 1e-7);
  // Value iteration residuals shrink at least geometrically, up to the
  // rounding error of one sweep on values of this size.
  double vmax = 0.0;
  for (double v : pi.values) vmax = std::max(vmax, std::abs(v));
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * vmax;
  for (std::size_t k = 1; k < vi.residual_trace.size(); ++k)
    CHECK(vi.residual_trace[k] <= opt.gamma * vi.residual_trace[k - 1] + rounding);
}

TEST_CASE("tabular actions decode to feasible allocations") {
  TabularModel model(simple_env());
  CHECK(model.power_vectors().size() == 357);
  const auto& sp = model.space();
  for (int s : {5, 99, 2048}) {
    const SystemState st = sp.state(s);
    for (int a = 0; a < model.action_count(); a += 13) {
      const auto act = model.action(s, a);
      validate_action(act, 5, model.environment().limits());
      CHECK(model.mdp().reward[model.mdp().at(s, a)] ==
            doctest::Approx(model.environment().throughput(st, act) * 1e-6).epsilon(1e-12));
    }
  }
}

TEST_CASE("descending power gets channels first") {
  TabularModel model(simple_env());
  const int np = static_cast<int>(model.power_vectors().size());
  int found = 0;
  for (int p = 0; p < np; ++p) {
    const auto& w = model.power_vectors()[p];
    if (w != std::vector<double>{1.0, 3.0, 2.0, 0.0, 0.0}) continue;
    const auto act = model.action(7, p);  // blocks 0, 1, 2 occupied
    CHECK(act.channels == std::vector<int>{0, 5, 5, 0, 0});
    ++found;
  }
  CHECK(found == 1);
  // Empty blocks never get channels.
  CHECK(model.action(1, np - 1).channels[1] == 0);
}

TEST_CASE("simulator rollout of an optimal table policy matches its exact average reward") {
  TabularModelOptions to;
  to.power_levels = {0.0, 1.5, 3.0};
  TabularModel model(simple_env(0.5), to);
  const auto& m = model.mdp();
  const auto pi = policy_iteration(m, {0.9});
  const auto& env = model.environment();
  const auto& sp = model.space();

  std::mt19937_64 link_rng(1);
  const SystemState s0 = env.initial_state({0, env.flight_limits().fixed_height_m}, link_rng);
  const int slots = 100000, batch = 1000;

  // Exact expected average over `slots` slots: propagate the state
  // distribution until it repeats with the light cycle, then use the
  // cycle average for the rest.
  std::vector<double> dist(m.states, 0.0), next(m.states);
  dist[sp.index(s0)] = 1.0;
  double head = 0.0;
  const int warm = 2200, cycle = sp.light_states();
  for (int t = 0; t < warm + cycle; ++t) {
    double r = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < m.states; ++s) {
      if (dist[s] == 0.0) continue;
      const int a = pi.policy[s];
      r += dist[s] * m.reward[m.at(s, a)];
      for (const auto& [u, p] : m.row(s, a)) next[u] += dist[s] * p;
    }
    if (t < warm) head += r;
    else head += r * double(slots - warm) / cycle;
    dist.swap(next);
  }
  const double exact = head / slots / model.reward_scale();

  TablePolicy policy(model, pi.policy);
  RandomStreams rng{std::mt19937_64(21), std::mt19937_64(22)};
  SystemState s = s0;
  std::vector<double> means;
  double acc = 0.0;
  for (int t = 0; t < slots; ++t) {
    const auto st = env.step(s, policy.act(s), rng);
    acc += st.throughput_bps;
    s = st.next;
    if ((t + 1) % batch == 0) {
      means.push_back(acc / batch);
      acc = 0.0;
    }
  }
  double mean = 0.0, var = 0.0;
  for (double x : means) mean += x / means.size();
  for (double x : means) var += (x - mean) * (x - mean) / (means.size() - 1);
  const double se = std::sqrt(var / means.size());
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("Q update arithmetic") {
  QTable q(2, 2, 0.5, 0.0);
  q.at(0, 0) = 1.0;
  q.at(1, 1) = 2.0;
  update(q, 0, 0, 0.8, 1, 0.5);  // target 0.8 + 0.5 * 2 = 1.8
  CHECK(q.at(0, 0) == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("Q argmax ties and greedy action selection") {
  QTable q(1, 3, 0.1, 0.0);
  q.at(0, 1) = 1.0;
  q.at(0, 2) = 1.0;
  CHECK(q.argmax(0) == 1);
  CHECK(q.max(0) == 1.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) CHECK(select_action(q, 0, rng) == 1);
  q.epsilon = 1.0;
  std::vector<int> hits(3, 0);
  for (int i = 0; i < 3000; ++i) ++hits[select_action(q, 0, rng)];
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("Q-learning recovers the two-state optimum") {
  auto m = two_state_chain();
  MdpSampler env(m);
  QLearningOptions o;
  o.episodes = 200;
  o.slots = 100;
  o.gamma = 0.9;
  o.alpha_power = 0.6;
  std::mt19937_64 rng(3);
  const auto q = train_q_learning(env, o, rng);
  CHECK(q.greedy_policy()[0] == 0);
  CHECK(q.at(0, 0) == doctest::Approx(1.0 / (1.0 - 0.81)).epsilon(0.05));
}
