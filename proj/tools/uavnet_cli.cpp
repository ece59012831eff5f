#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavnet/experiment.hpp"
#include "uavnet/nn.hpp"

namespace fs = std::filesystem;
using namespace uavnet;

namespace {

struct Common {
  std::string config;
  std::string mode;
  long long seed = -1;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c, bool with_mode = true) {
  cmd->add_option("--config", c.config, "Experiment config (JSON)");
  if (with_mode) cmd->add_option("--mode", c.mode, "power, flight, joint, cycle or greedy");
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--out", c.out, "Output directory");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? simplified_config() : ExperimentConfig::load(c.config);
  if (!c.mode.empty()) cfg.mode = c.mode;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  cfg.validate();
  return cfg;
}

void report(const std::string& dir, const std::vector<MetricsRow>& rows) {
  fs::create_directories(dir);
  write_metrics_csv(dir + "/metrics.csv", rows);
  std::cout << kMetricsHeader << '\n';
  for (const auto& r : rows) std::cout << to_csv_line(r) << '\n';
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--values: cannot parse '" + item + "'");
    }
  }
  if (v.empty()) throw ConfigError("--values needs at least one number");
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int gradcheck(long long seed_arg, int seeds) {
  const std::uint64_t base = seed_arg >= 0 ? static_cast<std::uint64_t>(seed_arg) : 1;
  double worst = 0.0;
  int checked = 0, skipped = 0;
  for (int k = 0; k < seeds; ++k) {
    std::mt19937_64 rng(base + k);
    std::uniform_int_distribution<int> width(2, 7);
    std::vector<int> sizes{width(rng), width(rng), width(rng), width(rng), width(rng)};
    Mlp net(sizes, {Activation::Relu, Activation::Tanh, Activation::Sigmoid, Activation::Identity});
    auto& head = net.layers().back();
    head.unit_activations.assign(head.outputs(), Activation::Sigmoid);
    head.unit_activations[0] = Activation::Tanh;
    net.initialize(rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(sizes.front(), 3);
    const auto r = gradient_check(net, x, rng);
    worst = std::max(worst, r.max_relative_error);
    checked += r.checked;
    skipped += r.skipped;
  }
  std::printf("seeds=%d checked=%d skipped=%d max_relative_error=%.3e %s\n", seeds, checked, skipped, worst,
              worst <= 1e-4 ? "PASS" : "FAIL");
  return worst <= 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV relay control: simulation, exact solver, DDPG training and baselines"};
  app.require_subcommand(1);

  Common exact_opt, train_opt, test_opt, base_opt, sweep_opt;
  auto* exact = app.add_subcommand("solve-exact", "Policy iteration on the 5-block model");
  add_common(exact, exact_opt, false);

  auto* train = app.add_subcommand("train", "Train a DDPG agent, then test it");
  add_common(train, train_opt);

  std::string checkpoint;
  auto* test = app.add_subcommand("test", "Noiseless test of a saved agent");
  add_common(test, test_opt);
  test->add_option("--checkpoint", checkpoint, "Checkpoint directory (default <out>/checkpoint)");

  auto* baseline = app.add_subcommand("baseline", "Run the cycle or greedy baseline");
  add_common(baseline, base_opt);

  std::string axis, values;
  int threads = 1;
  auto* sweep = app.add_subcommand("sweep", "One run per value and mode");
  add_common(sweep, sweep_opt);
  sweep->add_option("--axis", axis, "gamma, power, channels, lambda, tau_plus, tau_minus, energy_fraction, seed")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--threads", threads, "Parallel runs");

  long long gc_seed = -1;
  int gc_seeds = 20;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of backpropagation");
  gc->add_option("--seed", gc_seed, "First seed");
  gc->add_option("--seeds", gc_seeds, "Number of random networks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exact) {
      const auto cfg = resolve(exact_opt);
      auto res = run_exact(cfg);
      fs::create_directories(exact_opt.out);
      write_policy_csv(exact_opt.out + "/optimal_policy.csv", res.solution.policy, res.solution.values);
      std::cout << "states=" << res.model->mdp().states << " actions=" << res.model->mdp().actions
                << " improvements=" << res.solution.improvements << " residual=" << res.solution.residual << '\n';
      report(exact_opt.out, {res.row});
    } else if (*train) {
      const auto cfg = resolve(train_opt);
      auto tr = run_training(cfg, train_opt.out);
      const auto row = run_test(*tr.agent, cfg, tr.row);
      std::cout << "env_steps=" << tr.env_steps << " train_steps=" << tr.train_steps
                << " loss_at_fill=" << tr.loss_at_fill << " loss_at_end=" << tr.loss_at_end << '\n';
      report(train_opt.out, {row});
    } else if (*test) {
      const auto cfg = resolve(test_opt);
      report(test_opt.out, {run_test(checkpoint.empty() ? test_opt.out + "/checkpoint" : checkpoint, cfg)});
    } else if (*baseline) {
      const auto cfg = resolve(base_opt);
      report(base_opt.out, {run_baseline(cfg)});
    } else if (*sweep) {
      // --mode takes a comma-separated list here; each entry is checked below.
      Common single = sweep_opt;
      single.mode.clear();
      const auto cfg = resolve(single);
      const auto modes = sweep_opt.mode.empty() ? std::vector<std::string>{cfg.mode} : split(sweep_opt.mode);
      for (const auto& m : modes) run_mode_from_string(m);
      const auto res = run_sweep(cfg, axis, parse_values(values), modes, threads);
      write_sweep_outputs(sweep_opt.out, axis, res);
      std::cout << kMetricsHeader << '\n';
      for (const auto& r : res.rows) std::cout << to_csv_line(r) << '\n';
      for (const auto& e : res.errors) std::cerr << "run failed: " << e << '\n';
      return res.errors.empty() ? 0 : 3;
    } else if (*gc) {
      return gradcheck(gc_seed, gc_seeds);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
