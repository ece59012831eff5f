#include "uavnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "uavnet/baselines.hpp"
#include "uavnet/plot.hpp"

namespace uavnet {

namespace fs = std::filesystem;

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Power: return "power";
    case RunMode::Flight: return "flight";
    case RunMode::Joint: return "joint";
    case RunMode::Cycle: return "cycle";
    default: return "greedy";
  }
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "power") return RunMode::Power;
  if (s == "flight") return RunMode::Flight;
  if (s == "joint") return RunMode::Joint;
  if (s == "cycle") return RunMode::Cycle;
  if (s == "greedy") return RunMode::Greedy;
  throw ConfigError("unknown mode '" + s + "' (expected power, flight, joint, cycle or greedy)");
}

bool is_learning(RunMode m) { return m == RunMode::Power || m == RunMode::Flight || m == RunMode::Joint; }

ControlMode control_mode(RunMode m) {
  switch (m) {
    case RunMode::Power: return ControlMode::Power;
    case RunMode::Flight: return ControlMode::Flight;
    case RunMode::Joint: return ControlMode::Joint;
    default: throw ConfigError("mode " + to_string(m) + " has no learning agent");
  }
}

// ---------------------------------------------------------------------------
// Config

namespace {

// Binds every field to its JSON key once so that reading, writing and the
// unknown-key check cannot drift apart.
template <class Visitor>
void visit_fields(ExperimentConfig& c, Visitor&& v) {
  v("model", c.model);
  v("topology_path", c.topology_path);
  v("block_length_m", c.block_length_m);
  v("turn_probabilities", c.turn_probabilities);
  v("green_slots", c.green_slots);
  v("lambda", c.lambda);
  v("alpha1", c.alpha1);
  v("alpha2", c.alpha2);
  v("beta1", c.beta1);
  v("beta2", c.beta2);
  v("noise_dbm_per_hz", c.noise_dbm_per_hz);
  v("bandwidth_hz", c.bandwidth_hz);
  v("all_los", c.all_los);
  v("total_power_w", c.total_power_w);
  v("channel_count", c.channel_count);
  v("max_power_w", c.max_power_w);
  v("max_channels", c.max_channels);
  v("z_min_m", c.z_min_m);
  v("z_max_m", c.z_max_m);
  v("vertical_step_m", c.vertical_step_m);
  v("allow_vertical", c.allow_vertical);
  v("fixed_height_m", c.fixed_height_m);
  v("mode", c.mode);
  v("gamma", c.gamma);
  v("tau", c.tau);
  v("batch_size", c.batch_size);
  v("buffer_capacity", c.buffer_capacity);
  v("hidden_units", c.hidden_units);
  v("layers", c.layers);
  v("actor_lr", c.actor_lr);
  v("critic_lr", c.critic_lr);
  v("final_init_scale", c.final_init_scale);
  v("noise_start", c.noise_start);
  v("noise_end", c.noise_end);
  v("reward_scale", c.reward_scale);
  v("episodes", c.episodes);
  v("slots", c.slots);
  v("test_slots", c.test_slots);
  v("loss_window", c.loss_window);
  v("seed", c.seed);
  v("energy_mode", c.energy_mode);
  v("tau_plus", c.tau_plus);
  v("tau_minus", c.tau_minus);
  v("full_energy", c.full_energy);
  v("energy_fraction", c.energy_fraction);
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("config: " + field + " " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(model == "simplified" || model == "realistic", "model", "must be simplified or realistic");
  run_mode_from_string(mode);
  require(block_length_m > 0, "block_length_m", "must be positive");
  double tp = 0;
  for (double p : turn_probabilities) {
    require(p >= 0, "turn_probabilities", "must be non-negative");
    tp += p;
  }
  require(std::abs(tp - 1.0) < 1e-9, "turn_probabilities", "must sum to 1");
  require(green_slots >= 1, "green_slots", "must be at least 1");
  require(lambda >= 0 && lambda <= 1, "lambda", "must lie in [0, 1]");
  require(alpha2 > 0, "alpha2", "must be positive");
  require(beta1 > 0, "beta1", "must be positive");
  require(beta2 > 0 && beta2 <= 1, "beta2", "must lie in (0, 1]");
  require(std::isfinite(noise_dbm_per_hz), "noise_dbm_per_hz", "must be finite");
  require(bandwidth_hz > 0, "bandwidth_hz", "must be positive");
  require(total_power_w > 0, "total_power_w", "must be positive");
  require(channel_count >= 1, "channel_count", "must be at least 1");
  require(max_power_w > 0, "max_power_w", "must be positive");
  require(max_channels >= 1, "max_channels", "must be at least 1");
  require(z_min_m > 0 && z_max_m >= z_min_m, "z_min_m/z_max_m", "must satisfy 0 < z_min <= z_max");
  require(vertical_step_m > 0, "vertical_step_m", "must be positive");
  require(fixed_height_m >= z_min_m && fixed_height_m <= z_max_m, "fixed_height_m", "must lie in [z_min, z_max]");
  require(gamma >= 0 && gamma < 1, "gamma", "must lie in [0, 1)");
  require(tau >= 0 && tau <= 1, "tau", "must lie in [0, 1]");
  require(tau_plus >= 0 && tau_plus <= 1, "tau_plus", "must lie in [0, 1]");
  require(tau_minus >= 0 && tau_minus <= 1, "tau_minus", "must lie in [0, 1]");
  require(batch_size >= 1, "batch_size", "must be at least 1");
  require(buffer_capacity >= batch_size, "buffer_capacity", "must be at least batch_size");
  require(hidden_units >= 1 && layers >= 2, "hidden_units/layers", "must describe at least two layers");
  require(actor_lr > 0 && critic_lr > 0, "actor_lr/critic_lr", "must be positive");
  require(noise_start >= 0 && noise_end >= 0, "noise_start/noise_end", "must be non-negative");
  require(reward_scale >= 0, "reward_scale", "must be non-negative");
  require(episodes >= 1 && slots >= 1, "episodes/slots", "must be at least 1");
  require(test_slots >= 1, "test_slots", "must be at least 1");
  require(loss_window >= 1, "loss_window", "must be at least 1");
  require(full_energy > 0, "full_energy", "must be positive");
  require(energy_fraction > 0 && energy_fraction <= 1, "energy_fraction", "must lie in (0, 1]");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  auto copy = *this;
  visit_fields(copy, [&](const char* key, auto& field) { j[key] = field; });
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  std::set<std::string> known;
  visit_fields(c, [&](const char* key, auto& field) {
    known.insert(key);
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: bad value for ") + key + ": " + e.what());
    }
  });
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return from_json(j);
}

double ExperimentConfig::effective_reward_scale() const {
  if (reward_scale > 0) return reward_scale;
  double s = 1.0 / (bandwidth_hz * channel_count * 20.0);
  if (energy_mode) s *= full_energy * energy::kLevelTicks / energy::kFullTicks;
  return s;
}

ExperimentConfig simplified_config() { return {}; }

ExperimentConfig realistic_config() {
  ExperimentConfig c;
  c.model = "realistic";
  c.all_los = false;
  c.allow_vertical = true;
  c.bandwidth_hz = 5e3;
  c.total_power_w = 6.0;
  c.channel_count = 200;
  c.max_power_w = 0.9;
  c.max_channels = 50;
  return c;
}

TopologyConfig make_topology(const ExperimentConfig& cfg) {
  if (!cfg.topology_path.empty()) {
    auto t = TopologyConfig::load(cfg.topology_path);
    const auto want = cfg.model == "simplified" ? TrafficModel::Simplified : TrafficModel::Realistic;
    if (t.model != want) throw ConfigError("topology file model does not match config model");
    return t;
  }
  if (cfg.model == "simplified") return simplified_topology(cfg.block_length_m);
  return realistic_topology(cfg.block_length_m, cfg.turn_probabilities);
}

Environment make_environment(const ExperimentConfig& cfg) {
  cfg.validate();
  ChannelParams ch;
  ch.alpha1 = cfg.alpha1;
  ch.alpha2 = cfg.alpha2;
  ch.beta1 = cfg.beta1;
  ch.beta2 = cfg.beta2;
  ch.noise_psd_w_per_hz = dbm_per_hz_to_watts_per_hz(cfg.noise_dbm_per_hz);
  ch.bandwidth_hz = cfg.bandwidth_hz;
  ResourceLimits lim{cfg.total_power_w, cfg.channel_count, cfg.max_power_w, cfg.max_channels};
  FlightLimits fl{cfg.z_min_m, cfg.z_max_m, cfg.vertical_step_m, cfg.allow_vertical, cfg.fixed_height_m};
  EnvironmentOptions opt;
  opt.lambda = cfg.lambda;
  opt.green_slots = cfg.green_slots;
  opt.all_los = cfg.all_los;
  opt.energy_mode = cfg.energy_mode;
  opt.full_energy = cfg.full_energy;
  opt.energy_budget_fraction = cfg.energy_fraction;
  return Environment(make_topology(cfg), ch, lim, fl, opt);
}

AgentConfig make_agent_config(const ExperimentConfig& cfg) {
  AgentConfig a;
  a.mode = control_mode(cfg.run_mode());
  a.gamma = cfg.gamma;
  a.tau = cfg.tau;
  a.energy_mode = cfg.energy_mode;
  a.tau_plus = cfg.tau_plus;
  a.tau_minus = cfg.tau_minus;
  a.batch_size = cfg.batch_size;
  a.hidden_units = cfg.hidden_units;
  a.layers = cfg.layers;
  a.actor_lr = cfg.actor_lr;
  a.critic_lr = cfg.critic_lr;
  a.final_init_scale = cfg.final_init_scale;
  a.noise_start = cfg.noise_start;
  a.noise_end = cfg.noise_end;
  a.noise_decay_steps = static_cast<long long>(cfg.episodes) * cfg.slots;
  a.reward_scale = cfg.effective_reward_scale();
  return a;
}

std::mt19937_64 make_stream(std::uint64_t master_seed, Stream s) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(s)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------
// Metrics CSV

const char* const kMetricsHeader =
    "run_id,seed,mode,gamma,power_budget_w,channel_count,lambda,tau_plus,tau_minus,energy_fraction,"
    "mean_throughput_bps,throughput_per_energy,flight_time_slots,final_critic_loss";

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_csv_line(const MetricsRow& r) {
  std::ostringstream o;
  o << r.run_id << ',' << r.seed << ',' << r.mode << ',' << num(r.gamma) << ',' << num(r.power_budget_w) << ','
    << r.channel_count << ',' << num(r.lambda) << ',' << num(r.tau_plus) << ',' << num(r.tau_minus) << ','
    << num(r.energy_fraction) << ',' << num(r.mean_throughput_bps) << ',' << num(r.throughput_per_energy) << ','
    << num(r.flight_time_slots) << ',' << num(r.final_critic_loss);
  return o.str();
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << kMetricsHeader << '\n';
  for (const auto& r : rows) f << to_csv_line(r) << '\n';
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(f, line);
  if (line != kMetricsHeader) throw std::runtime_error(path + ": unexpected header");
  std::vector<MetricsRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) c.push_back(cell);
    if (c.size() != 14) throw std::runtime_error(path + ": bad row");
    MetricsRow r;
    r.run_id = c[0];
    r.seed = std::stoull(c[1]);
    r.mode = c[2];
    r.gamma = std::stod(c[3]);
    r.power_budget_w = std::stod(c[4]);
    r.channel_count = std::stoi(c[5]);
    r.lambda = std::stod(c[6]);
    r.tau_plus = std::stod(c[7]);
    r.tau_minus = std::stod(c[8]);
    r.energy_fraction = std::stod(c[9]);
    r.mean_throughput_bps = std::stod(c[10]);
    r.throughput_per_energy = std::stod(c[11]);
    r.flight_time_slots = std::stod(c[12]);
    r.final_critic_loss = std::stod(c[13]);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

MetricsRow base_row(const ExperimentConfig& cfg, std::string run_id) {
  MetricsRow r;
  r.run_id = run_id.empty() ? cfg.mode + "/seed" + std::to_string(cfg.seed) : std::move(run_id);
  r.seed = cfg.seed;
  r.mode = cfg.mode;
  r.gamma = cfg.gamma;
  r.power_budget_w = cfg.total_power_w;
  r.channel_count = cfg.channel_count;
  r.lambda = cfg.lambda;
  r.tau_plus = cfg.tau_plus;
  r.tau_minus = cfg.tau_minus;
  r.energy_fraction = cfg.energy_fraction;
  return r;
}

void fill_test(MetricsRow& row, const TestStats& st) {
  row.mean_throughput_bps = st.mean_throughput_bps;
  row.throughput_per_energy = st.throughput_per_energy;
  row.flight_time_slots = st.slots;
}

class AgentPolicy : public Policy {
 public:
  explicit AgentPolicy(DdpgAgent& a) : agent_(a) {}
  UavAction act(const SystemState& s) override { return agent_.act(s, false).action; }

 private:
  DdpgAgent& agent_;
};

double window_mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  if (begin >= end) return 0.0;
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += v[i];
  return s / static_cast<double>(end - begin);
}

}  // namespace

TestStats rollout(const Environment& env, Policy& policy, int slots, std::uint64_t seed) {
  RandomStreams rng{make_stream(seed, Stream::TestTraffic), make_stream(seed, Stream::TestLinks)};
  policy.reset();
  SystemState s = env.initial_state({env.topology().uav.center, env.flight_limits().fixed_height_m}, rng.links);
  TestStats st;
  double mean = 0.0, m2 = 0.0, per_energy = 0.0;
  for (int t = 0; t < slots; ++t) {
    const auto res = env.step(s, policy.act(s), rng);
    ++st.slots;
    const double delta = res.throughput_bps - mean;
    mean += delta / st.slots;
    m2 += delta * (res.throughput_bps - mean);
    per_energy += res.reward;
    s = res.next;
    if (res.depleted) break;
  }
  st.mean_throughput_bps = mean;
  st.throughput_stddev = st.slots > 1 ? std::sqrt(m2 / (st.slots - 1)) : 0.0;
  st.throughput_per_energy = env.options().energy_mode ? per_energy / st.slots : 0.0;
  return st;
}

TrainingResult run_training(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const RunMode mode = cfg.run_mode();
  if (!is_learning(mode)) throw ConfigError("training needs mode power, flight or joint");
  TrainingResult out;
  out.env = std::make_unique<Environment>(make_environment(cfg));
  const Environment& env = *out.env;
  auto agent_rng = make_stream(cfg.seed, Stream::Agent);
  out.agent = std::make_unique<DdpgAgent>(env, make_agent_config(cfg), agent_rng());
  DdpgAgent& agent = *out.agent;
  ReplayBuffer buffer(cfg.buffer_capacity);
  RandomStreams rng{make_stream(cfg.seed, Stream::Traffic), make_stream(cfg.seed, Stream::Links)};
  auto pose_rng = make_stream(cfg.seed, Stream::Pose);
  const UavPose home{env.topology().uav.center, cfg.fixed_height_m};

  for (int k = 0; k < cfg.episodes; ++k) {
    const UavPose pose = mode == RunMode::Power ? home : env.random_pose(pose_rng);
    SystemState s = env.initial_state(pose, rng.links);
    int t = 0;
    for (; t < cfg.slots; ++t) {
      auto a = agent.act(s, true);
      auto res = env.step(s, a.action, rng);
      ++out.env_steps;
      const bool depleted = res.depleted;
      buffer.store({std::move(s), std::move(a.action), std::move(a.output), res.reward, res.next});
      s = std::move(res.next);
      if (buffer.full()) {
        const auto d = cfg.energy_mode ? agent.train_step_energy(buffer) : agent.train_step(buffer);
        if (!std::isfinite(d.critic_loss)) throw std::runtime_error("critic loss diverged");
        out.critic_losses.push_back(d.critic_loss);
        out.positive_branch_steps += d.positive_branch ? 1 : 0;
        ++out.train_steps;
      }
      if (depleted) {
        ++t;
        break;
      }
    }
    out.episode_lengths.push_back(t);
  }
  const std::size_t n = out.critic_losses.size(), w = std::min<std::size_t>(cfg.loss_window, n);
  out.loss_at_fill = window_mean(out.critic_losses, 0, w);
  out.loss_at_end = window_mean(out.critic_losses, n - w, n);
  out.row = base_row(cfg, "");
  out.row.final_critic_loss = out.loss_at_end;

  if (!out_dir.empty()) {
    agent.save(out_dir + "/checkpoint");
    std::ofstream(out_dir + "/config.json") << cfg.to_json().dump(2) << '\n';
    std::ofstream losses(out_dir + "/critic_loss.csv");
    losses << "step,loss\n";
    for (std::size_t i = 0; i < n; ++i) losses << i << ',' << out.critic_losses[i] << '\n';
  }
  return out;
}

MetricsRow run_test(DdpgAgent& agent, const ExperimentConfig& cfg, MetricsRow row) {
  const Environment env = make_environment(cfg);
  AgentPolicy policy(agent);
  fill_test(row, rollout(env, policy, cfg.test_slots, cfg.seed));
  return row;
}

MetricsRow run_test(const std::string& checkpoint_dir, const ExperimentConfig& cfg) {
  const Environment env = make_environment(cfg);
  DdpgAgent agent(env, make_agent_config(cfg), 0);
  agent.load_target_actor(checkpoint_dir);
  AgentPolicy policy(agent);
  MetricsRow row = base_row(cfg, "");
  fill_test(row, rollout(env, policy, cfg.test_slots, cfg.seed));
  return row;
}

MetricsRow run_baseline(const ExperimentConfig& cfg) {
  const Environment env = make_environment(cfg);
  std::unique_ptr<Policy> policy;
  switch (cfg.run_mode()) {
    case RunMode::Cycle: policy = std::make_unique<CyclePolicy>(env); break;
    case RunMode::Greedy: policy = std::make_unique<GreedyPolicy>(env); break;
    default: throw ConfigError("baseline needs mode cycle or greedy");
  }
  MetricsRow row = base_row(cfg, "");
  fill_test(row, rollout(env, *policy, cfg.test_slots, cfg.seed));
  return row;
}

MetricsRow run_once(const ExperimentConfig& cfg, std::string run_id) {
  MetricsRow row;
  if (is_learning(cfg.run_mode())) {
    auto tr = run_training(cfg);
    row = run_test(*tr.agent, cfg, tr.row);
  } else {
    row = run_baseline(cfg);
  }
  if (!run_id.empty()) row.run_id = std::move(run_id);
  return row;
}

ExactResult run_exact(const ExperimentConfig& cfg) {
  if (cfg.model != "simplified") throw ConfigError("the exact solver needs the simplified model");
  ExactResult out;
  TabularModelOptions opt;
  opt.power_levels.clear();
  for (double p = 0.0; p <= cfg.max_power_w + 1e-9; p += 1.0) opt.power_levels.push_back(p);
  out.model = std::make_unique<TabularModel>(make_environment(cfg), opt);
  SolverOptions so;
  so.gamma = cfg.gamma;
  out.solution = policy_iteration(out.model->mdp(), so);
  TablePolicy policy(*out.model, out.solution.policy);
  out.row = base_row(cfg, "exact/seed" + std::to_string(cfg.seed));
  out.row.mode = "exact";
  fill_test(out.row, rollout(out.model->environment(), policy, cfg.test_slots, cfg.seed));
  return out;
}

void set_axis(ExperimentConfig& cfg, const std::string& axis, double v) {
  if (axis == "gamma") cfg.gamma = v;
  else if (axis == "power") cfg.total_power_w = v;
  else if (axis == "channels") cfg.channel_count = static_cast<int>(std::lround(v));
  else if (axis == "lambda") cfg.lambda = v;
  else if (axis == "tau_plus") cfg.tau_plus = v;
  else if (axis == "tau_minus") cfg.tau_minus = v;
  else if (axis == "energy_fraction") cfg.energy_fraction = v;
  else if (axis == "seed") cfg.seed = static_cast<std::uint64_t>(std::llround(v));
  else throw ConfigError("unknown sweep axis '" + axis + "'");
}

SweepResult run_sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<double>& values,
                      const std::vector<std::string>& modes, int threads,
                      const std::function<MetricsRow(const ExperimentConfig&, const std::string&)>& runner) {
  struct Job {
    ExperimentConfig cfg;
    std::string id;
  };
  std::vector<Job> jobs;
  for (const auto& m : modes)
    for (double v : values) {
      ExperimentConfig c = base;
      c.mode = m;
      set_axis(c, axis, v);
      std::ostringstream id;
      id << axis << '=' << v << '/' << m << "/seed" << c.seed;
      jobs.push_back({c, id.str()});
    }
  std::vector<std::optional<MetricsRow>> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      try {
        jobs[i].cfg.validate();
        rows[i] = runner ? runner(jobs[i].cfg, jobs[i].id) : run_once(jobs[i].cfg, jobs[i].id);
      } catch (const std::exception& e) {
        errors[i] = jobs[i].id + ": " + e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepResult out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (rows[i]) out.rows.push_back(*rows[i]);
    if (!errors[i].empty()) out.errors.push_back(errors[i]);
  }
  return out;
}

void write_sweep_outputs(const std::string& dir, const std::string& axis, const SweepResult& result) {
  fs::create_directories(dir);
  write_metrics_csv(dir + "/sweep_" + axis + ".csv", result.rows);
  if (!result.errors.empty()) {
    std::ofstream f(dir + "/sweep_" + axis + "_errors.txt");
    for (const auto& e : result.errors) f << e << '\n';
  }
  std::map<std::string, Series> by_mode;
  for (const auto& r : result.rows) {
    double x = 0.0;
    if (axis == "gamma") x = r.gamma;
    else if (axis == "power") x = r.power_budget_w;
    else if (axis == "channels") x = r.channel_count;
    else if (axis == "lambda") x = r.lambda;
    else if (axis == "tau_plus") x = r.tau_plus;
    else if (axis == "tau_minus") x = r.tau_minus;
    else if (axis == "energy_fraction") x = r.energy_fraction;
    else x = static_cast<double>(r.seed);
    auto& s = by_mode[r.mode];
    s.name = r.mode;
    s.x.push_back(x);
    s.y.push_back(axis == "energy_fraction" ? r.flight_time_slots : r.mean_throughput_bps);
  }
  std::vector<Series> series;
  for (auto& [_, s] : by_mode) series.push_back(std::move(s));
  write_line_chart(dir + "/sweep_" + axis + ".svg", "Sweep over " + axis, axis,
                   axis == "energy_fraction" ? "flight time (slots)" : "mean throughput (bit/s)", series);
}

}  // namespace uavnet
