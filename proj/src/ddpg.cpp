#include "uavnet/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace uavnet {

namespace fs = std::filesystem;

StateEncoder::StateEncoder(const Environment& env)
    : blocks_(env.blocks()),
      z_min_(env.flight_limits().z_min_m),
      z_span_(std::max(1e-9, env.flight_limits().z_max_m - env.flight_limits().z_min_m)),
      energy_(env.options().energy_mode) {
  uav_slot_.assign(blocks_, -1);
  const auto ub = env.topology().uav_blocks();
  for (std::size_t i = 0; i < ub.size(); ++i) uav_slot_[ub[i]] = static_cast<int>(i);
  size_ = 4 + 1 + static_cast<int>(ub.size()) + 1 + 2 * blocks_ + (energy_ ? 1 : 0);
}

void StateEncoder::encode_into(const SystemState& s, Eigen::Ref<Eigen::VectorXd> x) const {
  x.setZero();
  int k = 0;
  x[k + s.light.phase] = 1.0;
  k += 4;
  x[k++] = static_cast<double>(s.light.slots_in_phase) / std::max(1, s.light.green_slots);
  const int slot = uav_slot_.at(s.pose.block);
  if (slot < 0) throw std::invalid_argument("UAV outside its blocks");
  x[k + slot] = 1.0;
  k += static_cast<int>(std::count_if(uav_slot_.begin(), uav_slot_.end(), [](int v) { return v >= 0; }));
  x[k++] = (s.pose.height_m - z_min_) / z_span_;
  for (int i = 0; i < blocks_; ++i) x[k++] = s.occupancy.n[i];
  for (int i = 0; i < blocks_; ++i) x[k++] = s.links[i] == LinkState::LoS ? 1.0 : 0.0;
  if (energy_) x[k++] = s.energy_fraction();
}

Eigen::VectorXd StateEncoder::encode(const SystemState& s) const {
  Eigen::VectorXd x(size_);
  encode_into(s, x);
  return x;
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("agent: gamma must lie in [0, 1)");
  for (double t : {tau, tau_plus, tau_minus})
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("agent: soft-update rates must lie in [0, 1]");
  if (batch_size < 1) throw ConfigError("agent: batch size must be positive");
  if (hidden_units < 1 || layers < 2) throw ConfigError("agent: need at least two layers with hidden units");
  if (!(actor_lr > 0.0 && critic_lr > 0.0)) throw ConfigError("agent: learning rates must be positive");
  if (noise_start < 0.0 || noise_end < 0.0 || noise_decay_steps < 1) throw ConfigError("agent: bad noise schedule");
  if (!(reward_scale > 0.0)) throw ConfigError("agent: reward scale must be positive");
}

nlohmann::json AgentConfig::to_json() const {
  return {{"mode", to_string(mode)},
          {"gamma", gamma},
          {"tau", tau},
          {"energy_mode", energy_mode},
          {"tau_plus", tau_plus},
          {"tau_minus", tau_minus},
          {"batch_size", batch_size},
          {"hidden_units", hidden_units},
          {"layers", layers},
          {"actor_lr", actor_lr},
          {"critic_lr", critic_lr},
          {"final_init_scale", final_init_scale},
          {"noise_start", noise_start},
          {"noise_end", noise_end},
          {"noise_decay_steps", noise_decay_steps},
          {"reward_scale", reward_scale}};
}

AgentConfig AgentConfig::from_json(const nlohmann::json& j) {
  AgentConfig c;
  c.mode = control_mode_from_string(j.at("mode"));
  c.gamma = j.at("gamma");
  c.tau = j.at("tau");
  c.energy_mode = j.at("energy_mode");
  c.tau_plus = j.at("tau_plus");
  c.tau_minus = j.at("tau_minus");
  c.batch_size = j.at("batch_size");
  c.hidden_units = j.at("hidden_units");
  c.layers = j.at("layers");
  c.actor_lr = j.at("actor_lr");
  c.critic_lr = j.at("critic_lr");
  c.final_init_scale = j.at("final_init_scale");
  c.noise_start = j.at("noise_start");
  c.noise_end = j.at("noise_end");
  c.noise_decay_steps = j.at("noise_decay_steps");
  c.reward_scale = j.at("reward_scale");
  return c;
}

namespace {

Mlp make_net(int in, int out, const AgentConfig& cfg, Activation head) {
  std::vector<int> sizes{in};
  std::vector<Activation> acts;
  for (int i = 0; i + 1 < cfg.layers; ++i) {
    sizes.push_back(cfg.hidden_units);
    acts.push_back(Activation::Relu);
  }
  sizes.push_back(out);
  acts.push_back(head);
  return Mlp(sizes, acts);
}

Mlp make_actor(const StateEncoder& enc, const ActionCodec& codec, const AgentConfig& cfg, std::mt19937_64& rng) {
  Mlp net = make_net(enc.size(), codec.size(), cfg, Activation::Identity);
  auto& head = net.layers().back();
  head.unit_activations.assign(codec.size(), Activation::Sigmoid);
  for (int i = 0; i < codec.flight_size(); ++i) head.unit_activations[i] = Activation::Tanh;
  net.initialize(rng, cfg.final_init_scale);
  return net;
}

Mlp make_critic(const StateEncoder& enc, const ActionCodec& codec, const AgentConfig& cfg, std::mt19937_64& rng) {
  Mlp net = make_net(enc.size() + codec.size(), 1, cfg, Activation::Identity);
  net.initialize(rng, cfg.final_init_scale);
  return net;
}

ActionCodec make_codec(const Environment& env, ControlMode mode) {
  return ActionCodec(mode, env.blocks(), env.moves().count(), env.flight_limits().vertical_moves(), env.limits());
}

}  // namespace

DdpgAgent::DdpgAgent(const Environment& env, AgentConfig cfg, std::uint64_t seed)
    : cfg_((cfg.validate(), cfg)),
      encoder_(env),
      codec_(make_codec(env, cfg.mode)),
      init_rng_(seed),
      noise_rng_(seed ^ 0x9e3779b97f4a7c15ULL),
      replay_rng_(seed ^ 0xc2b2ae3d27d4eb4fULL),
      actor_(make_actor(encoder_, codec_, cfg_, init_rng_)),
      critic_(make_critic(encoder_, codec_, cfg_, init_rng_)),
      target_actor_(actor_),
      target_critic_(critic_),
      actor_opt_(actor_, cfg_.actor_lr),
      critic_opt_(critic_, cfg_.critic_lr) {
  if (cfg_.energy_mode != env.options().energy_mode)
    throw ConfigError("agent and environment disagree on energy mode");
}

double DdpgAgent::noise_level() const {
  const double f = std::min(1.0, static_cast<double>(act_calls_) / static_cast<double>(cfg_.noise_decay_steps));
  return cfg_.noise_start + (cfg_.noise_end - cfg_.noise_start) * f;
}

ActResult DdpgAgent::act(const SystemState& s, bool explore) {
  const Eigen::VectorXd y = target_actor_.forward(encoder_.encode(s));
  ActResult r;
  r.output.assign(y.data(), y.data() + y.size());
  if (explore) {
    std::normal_distribution<double> n01;
    const double level = noise_level();
    for (int i = 0; i < codec_.size(); ++i) r.output[i] += n01(noise_rng_) * level * (codec_.high(i) - codec_.low(i));
    ++act_calls_;
  }
  codec_.clip(r.output);
  r.action = codec_.decode(r.output, s);
  return r;
}

Eigen::MatrixXd DdpgAgent::states_matrix(const std::vector<const Transition*>& batch, bool next) const {
  Eigen::MatrixXd m(encoder_.size(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) encoder_.encode_into(next ? batch[j]->next_state : batch[j]->state, m.col(j));
  return m;
}

Eigen::MatrixXd DdpgAgent::actions_matrix(const std::vector<const Transition*>& batch) const {
  Eigen::MatrixXd m(codec_.size(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto& out = batch[j]->actor_output;
    if (static_cast<int>(out.size()) != codec_.size()) throw std::invalid_argument("transition lacks actor output");
    for (int i = 0; i < codec_.size(); ++i) m(i, j) = out[i];
  }
  return m;
}

Eigen::MatrixXd DdpgAgent::critic_input(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a) const {
  Eigen::MatrixXd x(s.rows() + a.rows(), s.cols());
  x << s, a;
  return x;
}

double DdpgAgent::asymmetric_rate(double mean_delta) const {
  return mean_delta >= 0.0 ? cfg_.tau_plus : cfg_.tau_minus;
}

double DdpgAgent::q_value(const Transition& t) const {
  std::vector<const Transition*> one{&t};
  return critic_.forward(critic_input(states_matrix(one, false), actions_matrix(one)))(0, 0);
}

TrainDiagnostics DdpgAgent::train_on(const std::vector<const Transition*>& batch) {
  const auto m = static_cast<Eigen::Index>(batch.size());
  if (m == 0) throw std::logic_error("empty training batch");
  const Eigen::MatrixXd s = states_matrix(batch, false);
  const Eigen::MatrixXd a = actions_matrix(batch);
  Eigen::RowVectorXd target(m);
  for (Eigen::Index j = 0; j < m; ++j) target[j] = cfg_.reward_scale * batch[j]->reward;
  if (!cfg_.energy_mode && cfg_.gamma > 0.0) {
    const Eigen::MatrixXd s2 = states_matrix(batch, true);
    const Eigen::MatrixXd q2 = target_critic_.forward(critic_input(s2, target_actor_.forward(s2)));
    target += cfg_.gamma * q2.row(0);
  }

  TrainDiagnostics d;
  // Critic regression.
  Tape ct;
  const Eigen::MatrixXd q = critic_.forward(critic_input(s, a), ct);
  const Eigen::RowVectorXd err = q.row(0) - target;
  d.critic_loss = err.squaredNorm() / static_cast<double>(m);
  d.mean_delta = -err.mean();
  if (!std::isfinite(d.critic_loss)) throw std::runtime_error("critic loss is not finite");
  Gradients cg = critic_.zero_gradients();
  critic_.backward(ct, (2.0 / static_cast<double>(m)) * err, cg);
  critic_opt_.step(critic_, cg);

  // Deterministic policy gradient through the updated critic.
  Tape at, qt;
  const Eigen::MatrixXd mu = actor_.forward(s, at);
  const Eigen::MatrixXd qmu = critic_.forward(critic_input(s, mu), qt);
  d.actor_objective = qmu.mean();
  Gradients scratch = critic_.zero_gradients();
  const Eigen::MatrixXd dx =
      critic_.backward(qt, Eigen::MatrixXd::Constant(1, m, -1.0 / static_cast<double>(m)), scratch);
  Gradients ag = actor_.zero_gradients();
  actor_.backward(at, dx.bottomRows(codec_.size()), ag);
  actor_opt_.step(actor_, ag);

  d.tau_used = cfg_.energy_mode ? asymmetric_rate(d.mean_delta) : cfg_.tau;
  d.positive_branch = cfg_.energy_mode && d.mean_delta >= 0.0;
  soft_update(target_critic_, critic_, d.tau_used);
  soft_update(target_actor_, actor_, d.tau_used);
  return d;
}

TrainDiagnostics DdpgAgent::train_step(const ReplayBuffer& buffer) {
  if (cfg_.energy_mode) throw std::logic_error("energy-mode agent must use train_step_energy");
  if (buffer.size() < static_cast<std::size_t>(cfg_.batch_size)) throw std::logic_error("replay buffer not ready");
  return train_on(buffer.sample(cfg_.batch_size, replay_rng_));
}

TrainDiagnostics DdpgAgent::train_step_energy(const ReplayBuffer& buffer) {
  if (!cfg_.energy_mode) throw std::logic_error("train_step_energy needs an energy-mode agent");
  if (buffer.size() < static_cast<std::size_t>(cfg_.batch_size)) throw std::logic_error("replay buffer not ready");
  return train_on(buffer.sample(cfg_.batch_size, replay_rng_));
}

void DdpgAgent::save(const std::string& dir) const {
  fs::create_directories(dir);
  actor_.save(dir + "/actor.bin");
  critic_.save(dir + "/critic.bin");
  target_actor_.save(dir + "/target_actor.bin");
  target_critic_.save(dir + "/target_critic.bin");
  std::ofstream f(dir + "/agent.json");
  if (!f) throw std::runtime_error("cannot write agent state in " + dir);
  f << nlohmann::json{{"version", 1}, {"config", cfg_.to_json()}, {"act_calls", act_calls_}}.dump(2) << '\n';
}

void DdpgAgent::load(const std::string& dir) {
  std::ifstream f(dir + "/agent.json");
  if (!f) throw std::runtime_error("no agent state in " + dir);
  const auto j = nlohmann::json::parse(f);
  act_calls_ = j.at("act_calls").get<long long>();
  auto restore = [&](Mlp& net, const std::string& name) {
    Mlp loaded = Mlp::load(dir + "/" + name);
    if (!loaded.same_shape(net)) throw std::runtime_error(name + ": architecture mismatch");
    net = std::move(loaded);
  };
  restore(actor_, "actor.bin");
  restore(critic_, "critic.bin");
  restore(target_actor_, "target_actor.bin");
  restore(target_critic_, "target_critic.bin");
}

void DdpgAgent::load_target_actor(const std::string& dir) {
  Mlp loaded = Mlp::load(dir + "/target_actor.bin");
  if (!loaded.same_shape(target_actor_)) throw std::runtime_error("target actor: architecture mismatch");
  target_actor_ = std::move(loaded);
}

}  // namespace uavnet
