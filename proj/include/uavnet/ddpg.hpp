#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uavnet/action_codec.hpp"
#include "uavnet/nn.hpp"
#include "uavnet/replay_buffer.hpp"

namespace uavnet {

/// Fixed-length feature vector for a state: light phase one-hot and timer
/// fraction, UAV block one-hot over the UAV blocks, normalized height, per
/// block occupancy, per block LoS flag, and the battery fraction when
/// energy is tracked.
class StateEncoder {
 public:
  explicit StateEncoder(const Environment& env);
  int size() const { return size_; }
  Eigen::VectorXd encode(const SystemState& s) const;
  void encode_into(const SystemState& s, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  std::vector<int> uav_slot_;
  int blocks_;
  double z_min_, z_span_;
  bool energy_;
  int size_;
};

struct AgentConfig {
  ControlMode mode = ControlMode::Joint;
  double gamma = 0.9;
  double tau = 0.001;
  bool energy_mode = false;
  double tau_plus = 0.001;
  double tau_minus = 0.001;
  int batch_size = 512;
  int hidden_units = 64;
  int layers = 4;  // fully-connected layers per network
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double final_init_scale = 1e-3;
  /// Noise standard deviation as a fraction of each output's range,
  /// decayed linearly over `noise_decay_steps` calls to act().
  double noise_start = 0.2;
  double noise_end = 0.01;
  long long noise_decay_steps = 65536;
  /// Multiplies stored rewards before they reach the critic.
  double reward_scale = 1e-7;

  void validate() const;
  nlohmann::json to_json() const;
  static AgentConfig from_json(const nlohmann::json& j);
};

struct ActResult {
  UavAction action;
  std::vector<double> output;  // clipped actor output the critic sees
};

struct TrainDiagnostics {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean Q(s, mu(s)) before the actor step
  double mean_delta = 0.0;       // energy mode: mean (target - Q(s,a))
  double tau_used = 0.0;
  bool positive_branch = false;  // energy mode: tau_plus selected
};

class DdpgAgent {
 public:
  DdpgAgent(const Environment& env, AgentConfig cfg, std::uint64_t seed);

  const AgentConfig& config() const { return cfg_; }
  const ActionCodec& codec() const { return codec_; }
  const StateEncoder& encoder() const { return encoder_; }

  /// Decodes the target actor's output, plus Gaussian noise when exploring.
  ActResult act(const SystemState& s, bool explore);
  /// Current noise fraction of each output range.
  double noise_level() const;

  /// Standard update: y = r + gamma Q'(s', mu'(s')). Throws std::logic_error
  /// when the buffer holds fewer than batch_size records.
  TrainDiagnostics train_step(const ReplayBuffer& buffer);
  /// Energy update: the critic regresses onto the per-energy reward and the
  /// target networks move with tau_plus or tau_minus by the sign of the batch
  /// mean prediction error.
  TrainDiagnostics train_step_energy(const ReplayBuffer& buffer);
  /// Same as above on an explicit batch.
  TrainDiagnostics train_on(const std::vector<const Transition*>& batch);

  /// Rate chosen for a batch with the given mean prediction error.
  double asymmetric_rate(double mean_delta) const;

  /// Critic estimate for a stored transition.
  double q_value(const Transition& t) const;

  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  Mlp& target_actor() { return target_actor_; }
  Mlp& target_critic() { return target_critic_; }
  const Mlp& target_actor() const { return target_actor_; }

  /// Writes actor, critic, their targets, config and noise state to dir.
  void save(const std::string& dir) const;
  /// Restores everything saved by save().
  void load(const std::string& dir);
  /// Restores only the target actor (test stage). Throws on an
  /// architecture mismatch.
  void load_target_actor(const std::string& dir);

 private:
  Eigen::MatrixXd states_matrix(const std::vector<const Transition*>& batch, bool next) const;
  Eigen::MatrixXd actions_matrix(const std::vector<const Transition*>& batch) const;
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a) const;

  AgentConfig cfg_;
  StateEncoder encoder_;
  ActionCodec codec_;
  std::mt19937_64 init_rng_, noise_rng_, replay_rng_;
  Mlp actor_, critic_, target_actor_, target_critic_;
  Adam actor_opt_, critic_opt_;
  long long act_calls_ = 0;
};

}  // namespace uavnet
