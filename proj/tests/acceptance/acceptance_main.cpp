// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
//   acceptance_tests            run everything
//   acceptance_tests AC3 AC4    run a subset
//
// Learning runs are sized for a single desktop core (see kEpisodes). Set
// UAVNET_ACCEPTANCE_CACHE=<dir> to keep finished runs on disk; a cached run
// is reused only when its stored config matches the requested one exactly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavnet/action_codec.hpp"
#include "uavnet/ddpg.hpp"
#include "uavnet/exact_solver.hpp"
#include "uavnet/experiment.hpp"
#include "uavnet/nn.hpp"
#include "uavnet/q_learning.hpp"
#include "uavnet/tabular_model.hpp"

using namespace uavnet;
using nlohmann::json;

namespace {

constexpr int kSeeds = 3;
constexpr int kEpisodes = 128;
constexpr int kSlots = 256;
constexpr int kCapacity = 5000;
constexpr int kBatch = 64;
constexpr int kTestSlots = 10000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct RunRecord {
  MetricsRow row;
  double loss_at_fill = 0.0;
  double loss_at_end = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- run cache ------------------------------------------------------------

class Runner {
 public:
  Runner() {
    if (const char* dir = std::getenv("UAVNET_ACCEPTANCE_CACHE"); dir && *dir) {
      cache_dir_ = dir;
      std::filesystem::create_directories(cache_dir_);
    }
  }

  /// Train-and-test for learning modes, test only for baselines; with
  /// `exact`, policy iteration plus a test of the optimal policy.
  const RunRecord& get(const ExperimentConfig& cfg, const std::string& label, bool exact = false) {
    if (auto it = memo_.find(label); it != memo_.end()) {
      if (it->second.first == cfg.to_json()) return it->second.second;
      throw std::logic_error("run label reused with a different config: " + label);
    }
    RunRecord rec;
    if (!load(cfg, label, rec)) {
      const auto t0 = std::chrono::steady_clock::now();
      rec = compute(cfg, exact);
      std::cerr << "  [run] " << label << " -> " << fmt(rec.row.mean_throughput_bps, 6) << " bps ("
                << fmt(seconds_since(t0), 3) << " s)\n";
      store(cfg, label, rec);
    }
    return memo_.emplace(label, std::make_pair(cfg.to_json(), rec)).first->second.second;
  }

 private:
  static RunRecord compute(const ExperimentConfig& cfg, bool exact) {
    RunRecord rec;
    if (exact) {
      rec.row = run_exact(cfg).row;
    } else if (cfg.mode == "cycle" || cfg.mode == "greedy") {
      rec.row = run_baseline(cfg);
    } else {
      auto tr = run_training(cfg);
      rec.row = run_test(*tr.agent, cfg, tr.row);
      rec.loss_at_fill = tr.loss_at_fill;
      rec.loss_at_end = tr.loss_at_end;
    }
    return rec;
  }

  std::string path(const std::string& label) const { return cache_dir_ + "/" + label + ".json"; }

  bool load(const ExperimentConfig& cfg, const std::string& label, RunRecord& rec) const {
    if (cache_dir_.empty()) return false;
    std::ifstream in(path(label));
    if (!in) return false;
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || j.value("config", json()) != cfg.to_json()) return false;
    rec.row.mean_throughput_bps = j.at("mean_throughput_bps").get<double>();
    rec.row.throughput_per_energy = j.at("throughput_per_energy").get<double>();
    rec.row.flight_time_slots = j.at("flight_time_slots").get<double>();
    rec.loss_at_fill = j.at("loss_at_fill").get<double>();
    rec.loss_at_end = j.at("loss_at_end").get<double>();
    std::cerr << "  [cache] " << label << "\n";
    return true;
  }

  void store(const ExperimentConfig& cfg, const std::string& label, const RunRecord& rec) const {
    if (cache_dir_.empty()) return;
    json j{{"config", cfg.to_json()},
           {"mean_throughput_bps", rec.row.mean_throughput_bps},
           {"throughput_per_energy", rec.row.throughput_per_energy},
           {"flight_time_slots", rec.row.flight_time_slots},
           {"loss_at_fill", rec.loss_at_fill},
           {"loss_at_end", rec.loss_at_end}};
    std::ofstream(path(label)) << j.dump() << "\n";
  }

  std::string cache_dir_;
  std::map<std::string, std::pair<json, RunRecord>> memo_;
};

Runner& runner() {
  static Runner r;
  return r;
}

ExperimentConfig desk(ExperimentConfig c) {
  c.episodes = kEpisodes;
  c.slots = kSlots;
  c.buffer_capacity = kCapacity;
  c.batch_size = kBatch;
  c.test_slots = kTestSlots;
  return c;
}

ExperimentConfig simplified(double lambda, const std::string& mode, int seed) {
  auto c = desk(simplified_config());
  c.lambda = lambda;
  c.mode = mode;
  c.seed = static_cast<std::uint64_t>(seed);
  return c;
}

ExperimentConfig realistic(const std::string& mode, int seed, double power = 6.0, int channels = 200,
                           double lambda = 0.5) {
  auto c = desk(realistic_config());
  c.mode = mode;
  c.seed = static_cast<std::uint64_t>(seed);
  c.total_power_w = power;
  c.channel_count = channels;
  c.lambda = lambda;
  return c;
}

ExperimentConfig energy(double tau_plus, double fraction, int seed) {
  auto c = realistic("joint", seed);
  c.energy_mode = true;
  c.full_energy = 1.0;
  c.tau_plus = tau_plus;
  c.tau_minus = 0.001;
  c.energy_fraction = fraction;
  // Short battery fractions give short episodes; keep training going.
  c.buffer_capacity = 2000;
  return c;
}

std::string label(const ExperimentConfig& c, const std::string& tag) {
  return c.model.substr(0, 4) + "_" + c.mode + "_" + tag + "_s" + std::to_string(c.seed);
}

double throughput(const ExperimentConfig& c, const std::string& tag) {
  return runner().get(c, label(c, tag)).row.mean_throughput_bps;
}

/// Median over seeds 1..kSeeds of f(seed).
double over_seeds(const std::function<double(int)>& f) {
  std::vector<double> v;
  for (int s = 1; s <= kSeeds; ++s) v.push_back(f(s));
  return median(v);
}

const std::vector<double> kLambdas{0.1, 0.3, 0.5, 0.7};

std::string lambda_tag(double l) { return "l" + fmt(l); }

// ---- criteria -------------------------------------------------------------

Outcome ac1() {
  Outcome o{true, ""};
  for (double l : kLambdas) {
    const double joint = over_seeds([&](int s) { return throughput(simplified(l, "joint", s), lambda_tag(l)); });
    const double best = over_seeds([&](int s) {
      const auto c = simplified(l, "joint", s);
      return runner().get(c, "simp_exact_" + lambda_tag(l) + "_s" + std::to_string(s), true).row.mean_throughput_bps;
    });
    const double gap = std::abs(joint - best) / best;
    o.pass = o.pass && gap <= 0.10;
    o.detail += "lambda=" + fmt(l) + " joint/optimum=" + fmt(joint / best) + " ";
  }
  o.detail += "(need |1 - ratio| <= 0.10)";
  return o;
}

Outcome ac2() {
  Outcome o{true, ""};
  for (double l : kLambdas) {
    auto med = [&](const std::string& m) {
      return over_seeds([&](int s) { return throughput(simplified(l, m, s), lambda_tag(l)); });
    };
    const double j = med("joint"), p = med("power"), f = med("flight");
    const bool ok = j >= 0.98 * p && p >= 0.98 * f;
    o.pass = o.pass && ok;
    o.detail += "lambda=" + fmt(l) + " J/P=" + fmt(j / p) + " P/F=" + fmt(p / f) + (ok ? " " : " (violated) ");
  }
  o.detail += "(need each ratio >= 0.98)";
  return o;
}

Outcome ac3() {
  // Pinned UAV over the center, two-slot greens: 6 light states x 32
  // occupancy patterns = 192 states. Power vectors put 0 or 3 W on at most
  // one block, so there are 6 actions.
  auto cfg = simplified_config();
  cfg.green_slots = 2;
  cfg.block_length_m = 20.0;
  cfg.fixed_height_m = 10.0;
  cfg.total_power_w = 3.0;
  cfg.max_power_w = 3.0;
  cfg.channel_count = 5;
  cfg.gamma = 0.5;
  TabularModelOptions opt;
  opt.power_levels = {0.0, 3.0};
  opt.positions = {0};
  opt.horizontal_moves = {0};
  const TabularModel model(make_environment(cfg), opt);
  const auto& mdp = model.mdp();

  SolverOptions so;
  so.gamma = cfg.gamma;
  const auto pi = policy_iteration(mdp, so);
  double qmax = 0.0;
  for (double v : pi.values) qmax = std::max(qmax, std::abs(v));
  const double tie = 1e-3 * qmax;

  SimulatorEnv env(model);
  QLearningOptions qo;
  // Exploring starts: several occupancy patterns cannot follow from one
  // another, so short episodes from uniform resets are what reaches them.
  qo.episodes = 50000;
  qo.slots = 2;  // 1e5 updates
  qo.gamma = cfg.gamma;
  qo.epsilon_start = 1.0;
  qo.epsilon_end = 0.05;
  qo.decay_fraction = 0.5;
  qo.alpha = 1.0;
  qo.alpha_power = 0.6;
  std::mt19937_64 rng(2024);
  const auto q = train_q_learning(env, qo, rng);
  const auto learned = q.greedy_policy();

  int non_tied = 0, mismatched = 0;
  for (int s = 0; s < mdp.states; ++s) {
    auto qs = q_values(mdp, pi.values, cfg.gamma, s);
    std::vector<double> sorted = qs;
    std::sort(sorted.rbegin(), sorted.rend());
    if (sorted.size() > 1 && sorted[0] - sorted[1] <= tie) continue;
    ++non_tied;
    if (learned[s] != pi.policy[s]) ++mismatched;
  }
  Outcome o;
  o.pass = mdp.states <= 200 && non_tied > 0 && mismatched == 0;
  o.detail = std::to_string(mdp.states) + " states, " + std::to_string(mdp.actions) + " actions, " +
             std::to_string(non_tied) + " non-tied states, " + std::to_string(mismatched) +
             " mismatches after 1e5 updates";
  return o;
}

Outcome ac4() {
  auto cfg = simplified_config();
  cfg.test_slots = 10;
  const auto exact = run_exact(cfg);
  const auto& mdp = exact.model->mdp();

  double worst_row = 0.0;
  for (const auto& row : mdp.rows) {
    double sum = 0.0;
    for (const auto& [_, p] : row) sum += p;
    worst_row = std::max(worst_row, std::abs(sum - 1.0));
  }
  const double residual = bellman_residual(mdp, exact.solution.values, cfg.gamma);
  SolverOptions so;
  so.gamma = cfg.gamma;
  so.tol = 1e-10;
  const auto vi = value_iteration(mdp, so);
  double gap = 0.0;
  for (int s = 0; s < mdp.states; ++s) gap = std::max(gap, std::abs(vi.values[s] - exact.solution.values[s]));

  Outcome o;
  o.pass = residual <= 1e-8 && gap <= 1e-7 && worst_row <= 1e-12;
  o.detail = std::to_string(mdp.states) + " states x " + std::to_string(mdp.actions) +
             " actions: residual=" + fmt(residual, 3) + " |VI-PI|=" + fmt(gap, 3) +
             " max|row sum - 1|=" + fmt(worst_row, 3);
  return o;
}

Outcome ac5() {
  double worst = 0.0;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    // A random deep net with a mixed tanh/sigmoid head.
    std::uniform_int_distribution<int> width(2, 12);
    Mlp net({width(rng), width(rng), width(rng), width(rng), width(rng)},
            {Activation::Relu, Activation::Relu, Activation::Tanh, Activation::Identity});
    auto& head = net.layers().back();
    head.unit_activations.assign(head.outputs(), Activation::Sigmoid);
    head.unit_activations[0] = Activation::Tanh;
    net.initialize(rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(net.inputs(), 3);
    auto r = gradient_check(net, x, rng);
    worst = std::max(worst, r.max_relative_error);
    checked += r.checked;

    // The actor and critic the agent actually trains, at a smaller width.
    ExperimentConfig cfg = simplified_config();
    cfg.hidden_units = 8;
    const auto env = make_environment(cfg);
    auto ac = make_agent_config(cfg);
    DdpgAgent agent(env, ac, seed);
    for (const Mlp* m : {&agent.actor(), &agent.critic()}) {
      Eigen::MatrixXd in = Eigen::MatrixXd::Random(m->inputs(), 2);
      r = gradient_check(*m, in, rng);
      worst = std::max(worst, r.max_relative_error);
      checked += r.checked;
    }
  }
  return {worst <= 1e-4, "max relative error " + fmt(worst, 3) + " over " + std::to_string(checked) +
                             " parameters and inputs, 20 seeds"};
}

Outcome ac6() {
  std::map<std::string, double> m;
  for (const std::string mode : {"joint", "power", "flight", "greedy", "cycle"})
    m[mode] = over_seeds([&](int s) { return throughput(realistic(mode, s), "base"); });
  const bool jp = m["joint"] > m["power"], pf = m["power"] > m["flight"], fg = m["flight"] > m["greedy"],
             gc = m["greedy"] >= m["cycle"];
  std::string d;
  for (const char* k : {"joint", "power", "flight", "greedy", "cycle"}) d += std::string(k) + "=" + fmt(m[k], 6) + " ";
  d += std::string("J>P ") + (jp ? "ok" : "no") + ", P>F " + (pf ? "ok" : "no") + ", F>G " + (fg ? "ok" : "no") +
       ", G>=C " + (gc ? "ok" : "no");
  return {jp && pf && fg && gc, d};
}

std::string power_tag(double p, int c) { return "P" + fmt(p) + "C" + std::to_string(c); }

Outcome ac7() {
  Outcome o{true, ""};
  auto point = [&](double p, int c, int s) {
    // P=6, C=200 is the shared base point.
    return p == 6.0 && c == 200 ? throughput(realistic("joint", s), "base")
                                : throughput(realistic("joint", s, p, c), power_tag(p, c));
  };
  auto check = [&](double p0, int c0, double p1, int c1) {
    const double ratio = over_seeds([&](int s) { return point(p1, c1, s) / point(p0, c0, s); });
    const bool ok = ratio >= 0.97;
    o.pass = o.pass && ok;
    o.detail += power_tag(p1, c1) + "/" + power_tag(p0, c0) + "=" + fmt(ratio) + (ok ? " " : " (drop) ");
  };
  for (int p = 1; p < 6; ++p) check(p, 200, p + 1, 200);
  check(6, 100, 6, 150);
  check(6, 150, 6, 200);
  o.detail += "(paired median ratio >= 0.97)";
  return o;
}

Outcome ac8() {
  const double rise = over_seeds([&](int s) {
    const double t6 = throughput(realistic("joint", s, 6.0, 200, 0.6), "l0.6");
    const double t7 = throughput(realistic("joint", s, 6.0, 200, 0.7), "l0.7");
    return (t7 - t6) / t6;
  });
  return {rise <= 0.05, "paired median (T(0.7) - T(0.6)) / T(0.6) = " + fmt(rise) + " (need <= 0.05)"};
}

/// Slots a full battery lasts when the UAV never climbs or descends.
int horizontal_depletion_slots() {
  auto cfg = realistic_config();
  cfg.energy_mode = true;
  const auto env = make_environment(cfg);
  std::mt19937_64 r(1);
  RandomStreams rng{std::mt19937_64(2), std::mt19937_64(3)};
  SystemState s = env.initial_state({env.topology().uav.center, 150.0}, r);
  const int center = s.pose.block;
  for (int slots = 1; slots < 10000; ++slots) {
    const int move = s.pose.block == center ? 1 : env.moves().anticlockwise();
    const auto alloc = equal_allocation(s.occupancy, env.limits());
    const auto st = env.step(s, {{move, 0}, alloc.power_w, alloc.channels}, rng);
    if (st.depleted) return slots;
    s = st.next;
  }
  return -1;
}

Outcome ac9() {
  auto flight = [](double tau_plus, double fraction) {
    return over_seeds([&](int s) {
      const auto c = energy(tau_plus, fraction, s);
      return runner().get(c, label(c, "tp" + fmt(tau_plus) + "_f" + fmt(fraction))).row.flight_time_slots;
    });
  };
  const double lo = flight(0.0008, 1.0), mid = flight(0.001, 1.0), hi = flight(0.0012, 1.0);
  const bool ordered = lo > mid && mid > hi;

  std::vector<double> xs{0.2, 0.4, 0.6, 0.8, 1.0}, ys;
  for (double f : xs) ys.push_back(flight(0.001, f));
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
  const int horizontal = horizontal_depletion_slots();

  std::string d = "flight time tau+ 0.0008/0.001/0.0012 = " + fmt(lo) + "/" + fmt(mid) + "/" + fmt(hi) +
                  (ordered ? " ordered" : " (not ordered)") + "; by fraction";
  for (double y : ys) d += " " + fmt(y);
  d += " R^2=" + fmt(r2, 5) + "; horizontal depletion " + std::to_string(horizontal) + " slots";
  return {ordered && r2 >= 0.99 && horizontal == 210, d};
}

Outcome ac10() {
  Outcome o{true, ""};
  for (const std::string mode : {"power", "flight", "joint"}) {
    double worst = 0.0;
    for (int s = 1; s <= kSeeds; ++s) {
      const auto c = simplified(0.5, mode, s);
      const auto& rec = runner().get(c, label(c, lambda_tag(0.5)));
      worst = std::max(worst, rec.loss_at_end / rec.loss_at_fill);
    }
    o.pass = o.pass && worst < 1.0;
    o.detail += mode + " worst end/fill=" + fmt(worst, 3) + " ";
  }
  o.detail += "(need < 1 for every seed)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
  std::set<std::string> only(argv + 1, argv + argc);

  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << name << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  [" << fmt(seconds_since(t0), 3)
              << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
