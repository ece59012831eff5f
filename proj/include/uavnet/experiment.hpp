#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavnet/ddpg.hpp"
#include "uavnet/exact_solver.hpp"
#include "uavnet/tabular_model.hpp"

namespace uavnet {

enum class RunMode { Power, Flight, Joint, Cycle, Greedy };

std::string to_string(RunMode m);
RunMode run_mode_from_string(const std::string& s);
bool is_learning(RunMode m);
ControlMode control_mode(RunMode m);

/// Everything a run needs. JSON keys equal the field names.
struct ExperimentConfig {
  // Road and radio
  std::string model = "simplified";  // "simplified" or "realistic"
  std::string topology_path;         // empty: built-in geometry
  double block_length_m = 3.0;
  std::array<double, 3> turn_probabilities{0.4, 0.3, 0.3};
  int green_slots = 10;
  double lambda = 0.5;
  double alpha1 = 9.6;
  double alpha2 = 0.28;
  double beta1 = 3.0;
  double beta2 = 0.01;
  double noise_dbm_per_hz = -130.0;
  double bandwidth_hz = 1e5;
  bool all_los = true;
  // Resources and flight
  double total_power_w = 6.0;
  int channel_count = 10;
  double max_power_w = 3.0;
  int max_channels = 5;
  double z_min_m = 10.0;
  double z_max_m = 200.0;
  double vertical_step_m = 5.0;
  bool allow_vertical = false;
  double fixed_height_m = 150.0;
  // Learning
  std::string mode = "joint";
  double gamma = 0.9;
  double tau = 0.001;
  int batch_size = 512;
  int buffer_capacity = 10000;
  int hidden_units = 64;
  int layers = 4;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double final_init_scale = 1e-3;
  double noise_start = 0.2;
  double noise_end = 0.01;
  double reward_scale = 0.0;  // 0: derived from bandwidth and channel count
  int episodes = 256;
  int slots = 256;
  int test_slots = 10000;
  int loss_window = 200;
  std::uint64_t seed = 1;
  // Energy extension
  bool energy_mode = false;
  double tau_plus = 0.001;
  double tau_minus = 0.001;
  double full_energy = 1.0;
  double energy_fraction = 1.0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);

  RunMode run_mode() const { return run_mode_from_string(mode); }
  double effective_reward_scale() const;
};

/// Defaults for the 5-block model and the 33-block model.
ExperimentConfig simplified_config();
ExperimentConfig realistic_config();

TopologyConfig make_topology(const ExperimentConfig& cfg);
Environment make_environment(const ExperimentConfig& cfg);
AgentConfig make_agent_config(const ExperimentConfig& cfg);

/// Independent generator for one named component of a run.
enum class Stream : std::uint64_t { Traffic = 1, Links = 2, Agent = 3, Pose = 4, TestTraffic = 5, TestLinks = 6 };
std::mt19937_64 make_stream(std::uint64_t master_seed, Stream s);

struct MetricsRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string mode;
  double gamma = 0.0;
  double power_budget_w = 0.0;
  int channel_count = 0;
  double lambda = 0.0;
  double tau_plus = 0.0;
  double tau_minus = 0.0;
  double energy_fraction = 0.0;
  double mean_throughput_bps = 0.0;
  double throughput_per_energy = 0.0;
  double flight_time_slots = 0.0;
  double final_critic_loss = 0.0;
};

extern const char* const kMetricsHeader;
std::string to_csv_line(const MetricsRow& r);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

struct TestStats {
  double mean_throughput_bps = 0.0;
  double throughput_per_energy = 0.0;  // energy mode only
  int slots = 0;                       // slots flown
  double throughput_stddev = 0.0;      // per-slot sample standard deviation
};

/// Noiseless rollout from light phase 0, empty roads, the UAV over the
/// center at the fixed height. Stops after `slots` slots or when the battery
/// runs out.
TestStats rollout(const Environment& env, Policy& policy, int slots, std::uint64_t seed);

struct TrainingResult {
  std::unique_ptr<Environment> env;  // referenced by agent
  std::unique_ptr<DdpgAgent> agent;
  MetricsRow row;  // test columns filled by run_test
  long long env_steps = 0;
  long long train_steps = 0;
  std::vector<int> episode_lengths;
  std::vector<double> critic_losses;  // one per train step
  double loss_at_fill = 0.0;          // mean of the first loss_window losses
  double loss_at_end = 0.0;           // mean of the last loss_window losses
  int positive_branch_steps = 0;      // energy mode
};

/// Trains a DDPG agent (power, flight or joint mode). Training starts once
/// the replay buffer is full. Writes a checkpoint when out_dir is set.
TrainingResult run_training(const ExperimentConfig& cfg, const std::string& out_dir = "");

/// Noiseless test of an agent; fills the test columns of `row`.
MetricsRow run_test(DdpgAgent& agent, const ExperimentConfig& cfg, MetricsRow row);
/// Restores the target actor from a checkpoint directory and tests it.
MetricsRow run_test(const std::string& checkpoint_dir, const ExperimentConfig& cfg);
/// Cycle or Greedy.
MetricsRow run_baseline(const ExperimentConfig& cfg);
/// Train-then-test for learning modes, test only for baselines.
MetricsRow run_once(const ExperimentConfig& cfg, std::string run_id = "");

struct ExactResult {
  std::unique_ptr<TabularModel> model;
  PolicyIterationResult solution;
  MetricsRow row;  // test of the optimal policy in the simulator
};

/// Policy iteration on the enumerated 5-block model (power levels 0..3 W),
/// then a simulator test of the optimal policy.
ExactResult run_exact(const ExperimentConfig& cfg);

struct SweepResult {
  std::vector<MetricsRow> rows;     // submission order
  std::vector<std::string> errors;  // "run_id: message" for failed runs
};

/// Sets a named parameter: gamma, power, channels, lambda, tau_plus,
/// tau_minus, energy_fraction or seed.
void set_axis(ExperimentConfig& cfg, const std::string& axis, double value);

/// One run per (mode, value). Runs execute on `threads` workers; rows come
/// back in submission order whatever the completion order.
SweepResult run_sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<double>& values,
                      const std::vector<std::string>& modes, int threads = 1,
                      const std::function<MetricsRow(const ExperimentConfig&, const std::string&)>& runner = {});

/// Writes sweep_<axis>.csv and sweep_<axis>.svg into dir.
void write_sweep_outputs(const std::string& dir, const std::string& axis, const SweepResult& result);

}  // namespace uavnet
