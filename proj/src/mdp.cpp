#include "uavnet/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uavnet {

using nlohmann::json;

double SystemState::energy_fraction() const {
  if (!energy_ticks) return 1.0;
  return static_cast<double>(*energy_ticks) / static_cast<double>(energy::kFullTicks);
}

void ResourceLimits::validate() const {
  if (!(total_power_w > 0.0)) throw ConfigError("limits: total power must be positive");
  if (!(max_power_w > 0.0)) throw ConfigError("limits: per-vehicle power cap must be positive");
  if (total_channels < 1) throw ConfigError("limits: need at least one channel");
  if (max_channels < 1) throw ConfigError("limits: per-vehicle channel cap must be at least 1");
}

void FlightLimits::validate() const {
  if (!(z_min_m > 0.0)) throw ConfigError("flight: z_min must be positive");
  if (!(z_max_m >= z_min_m)) throw ConfigError("flight: z_max below z_min");
  if (!(vertical_step_m > 0.0)) throw ConfigError("flight: vertical step must be positive");
  if (fixed_height_m < z_min_m || fixed_height_m > z_max_m)
    throw ConfigError("flight: fixed height outside [z_min, z_max]");
}

std::vector<int> FlightLimits::vertical_moves() const {
  const int s = static_cast<int>(std::lround(vertical_step_m));
  if (!allow_vertical) return {0};
  return {-s, 0, s};
}

FlightMoves::FlightMoves(const UavLayout& layout) : center_(layout.center), ring_(layout.ring) {
  ring_sorted_ = ring_;
  std::sort(ring_sorted_.begin(), ring_sorted_.end());
}

int FlightMoves::ring_position(int block) const {
  auto it = std::find(ring_.begin(), ring_.end(), block);
  return it == ring_.end() ? -1 : static_cast<int>(it - ring_.begin());
}

int FlightMoves::destination(int from, int move) const {
  const int r = static_cast<int>(ring_.size());
  if (move < 0 || move >= count()) throw InvalidAction("horizontal move index out of range");
  if (move == 0) return from;
  if (move <= r) return from == center_ ? ring_sorted_[move - 1] : from;
  const int pos = ring_position(from);
  if (pos < 0) return from;
  if (move == anticlockwise()) return ring_[(pos + 1) % r];
  if (move == to_center()) return center_;
  return ring_[(pos + r - 1) % r];
}

std::string FlightMoves::name(int move) const {
  const int r = static_cast<int>(ring_.size());
  if (move == 0) return "stay";
  if (move >= 1 && move <= r) return "to-" + std::to_string(ring_sorted_[move - 1]);
  if (move == anticlockwise()) return "anticlockwise";
  if (move == to_center()) return "to-center";
  if (move == clockwise()) return "clockwise";
  return "invalid";
}

int FlightMoves::to_ring(int block) const {
  auto it = std::find(ring_sorted_.begin(), ring_sorted_.end(), block);
  if (it == ring_sorted_.end()) return -1;
  return 1 + static_cast<int>(it - ring_sorted_.begin());
}

int FlightMoves::move_between(int from, int to) const {
  for (int m = 0; m < count(); ++m)
    if (destination(from, m) == to) return m;
  return -1;
}

UavPose apply_flight(const UavPose& pose, const FlightAction& flight, const FlightMoves& moves,
                     const FlightLimits& limits) {
  const int step = static_cast<int>(std::lround(limits.vertical_step_m));
  if (flight.vertical_m != 0 && std::abs(flight.vertical_m) != step)
    throw InvalidAction("vertical move must be -step, 0 or +step");
  UavPose next{moves.destination(pose.block, flight.horizontal), pose.height_m};
  if (limits.allow_vertical && flight.vertical_m != 0) {
    const double z = pose.height_m + flight.vertical_m;
    if (z >= limits.z_min_m - 1e-9 && z <= limits.z_max_m + 1e-9) next.height_m = z;
  }
  return next;
}

std::int64_t energy_cost_ticks(int effective_vertical_m) {
  if (effective_vertical_m < 0) return energy::kDescendTicks;
  if (effective_vertical_m > 0) return energy::kAscendTicks;
  return energy::kLevelTicks;
}

double energy_cost(const FlightAction& flight, double full_energy) {
  return full_energy * static_cast<double>(energy_cost_ticks(flight.vertical_m)) /
         static_cast<double>(energy::kFullTicks);
}

void validate_action(const UavAction& a, int blocks, const ResourceLimits& limits) {
  constexpr double kSlack = 1e-9;
  if (static_cast<int>(a.power_w.size()) != blocks || static_cast<int>(a.channels.size()) != blocks)
    throw InvalidAction("action vectors must have one entry per block");
  double total_p = 0.0;
  int total_c = 0;
  for (int i = 0; i < blocks; ++i) {
    if (!(a.power_w[i] >= 0.0) || a.power_w[i] > limits.max_power_w + kSlack)
      throw InvalidAction("power of block " + std::to_string(i) + " outside [0, max]");
    if (a.channels[i] < 0 || a.channels[i] > limits.max_channels)
      throw InvalidAction("channels of block " + std::to_string(i) + " outside [0, max]");
    total_p += a.power_w[i];
    total_c += a.channels[i];
  }
  if (total_p > limits.total_power_w + kSlack) throw InvalidAction("total power exceeds budget");
  if (total_c > limits.total_channels) throw InvalidAction("total channels exceed budget");
}

double reward(const SystemState& state, const UavAction& action, const std::vector<double>& gains,
              const ResourceLimits& limits, const ChannelParams& channel) {
  const int n = state.occupancy.blocks();
  validate_action(action, n, limits);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!state.occupancy.n[i]) continue;
    total += block_throughput(action.power_w[i], action.channels[i], gains[i], channel);
  }
  return total;
}

Environment::Environment(TopologyConfig topo, ChannelParams channel, ResourceLimits limits, FlightLimits flight,
                         EnvironmentOptions options)
    : topo_(std::move(topo)),
      channel_(channel),
      limits_(limits),
      flight_(flight),
      options_(options),
      moves_(topo_.uav) {
  topo_.validate();
  channel_.validate();
  limits_.validate();
  flight_.validate();
  if (options_.lambda < 0.0 || options_.lambda > 1.0) throw ConfigError("environment: lambda outside [0,1]");
  if (options_.green_slots < 1) throw ConfigError("environment: green phase needs at least one slot");
  if (options_.energy_mode && !(options_.full_energy > 0.0))
    throw ConfigError("environment: full battery energy must be positive");
  if (!(options_.energy_budget_fraction > 0.0 && options_.energy_budget_fraction <= 1.0))
    throw ConfigError("environment: energy budget fraction outside (0,1]");
}

std::vector<double> Environment::height_grid() const {
  std::vector<double> zs;
  for (double z = flight_.z_min_m; z <= flight_.z_max_m + 1e-9; z += flight_.vertical_step_m) zs.push_back(z);
  return zs;
}

UavPose Environment::random_pose(std::mt19937_64& rng) const {
  const auto blocks = topo_.uav_blocks();
  UavPose pose;
  pose.block = blocks[std::uniform_int_distribution<std::size_t>(0, blocks.size() - 1)(rng)];
  if (flight_.allow_vertical) {
    const auto zs = height_grid();
    pose.height_m = zs[std::uniform_int_distribution<std::size_t>(0, zs.size() - 1)(rng)];
  } else {
    pose.height_m = flight_.fixed_height_m;
  }
  return pose;
}

SystemState Environment::initial_state(const UavPose& pose, std::mt19937_64& link_rng) const {
  if (!topo_.is_uav_block(pose.block)) throw ConfigError("initial pose is not a UAV block");
  SystemState s;
  s.light = {0, 0, options_.green_slots};
  s.pose = pose;
  s.occupancy = Occupancy(blocks());
  s.links = sample_link_states(pose, link_rng);
  if (options_.energy_mode)
    s.energy_ticks = std::llround(options_.energy_budget_fraction * static_cast<double>(energy::kFullTicks));
  return s;
}

std::vector<double> Environment::los_probabilities(const UavPose& pose) const {
  std::vector<double> p(blocks());
  for (int i = 0; i < blocks(); ++i)
    p[i] = los_probability({topo_.horizontal_distance(pose.block, i), pose.height_m}, channel_);
  return p;
}

std::vector<LinkState> Environment::sample_link_states(const UavPose& pose, std::mt19937_64& rng) const {
  if (options_.all_los) return std::vector<LinkState>(blocks(), LinkState::LoS);
  return uavnet::sample_link_states(los_probabilities(pose), rng);
}

std::vector<double> Environment::gains(const SystemState& s) const {
  std::vector<double> g(blocks());
  for (int i = 0; i < blocks(); ++i) {
    const LinkGeometry geom{topo_.horizontal_distance(s.pose.block, i), s.pose.height_m};
    g[i] = channel_gain(geom.distance_m(), s.links[i], channel_);
  }
  return g;
}

double Environment::throughput(const SystemState& s, const UavAction& a) const {
  return reward(s, a, gains(s), limits_, channel_);
}

UavPose Environment::fly(const UavPose& pose, const FlightAction& flight) const {
  return apply_flight(pose, flight, moves_, flight_);
}

Occupancy Environment::step_occupancy(const SystemState& s, std::mt19937_64& rng) const {
  if (topo_.model == TrafficModel::Simplified) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    ArrivalDraws draws;
    draws.flow1 = uniform(rng);
    draws.flow2 = uniform(rng);
    const std::array<double, 2> lambda{entrance_lambda(topo_.entrances[0], options_.lambda),
                                       entrance_lambda(topo_.entrances[1], options_.lambda)};
    return step_occupancy_simplified(s.occupancy, s.light, lambda, draws);
  }
  return step_occupancy_realistic(s.occupancy, s.light, topo_, options_.lambda, rng);
}

StepResult Environment::step(const SystemState& s, const UavAction& a, RandomStreams& rng) const {
  StepResult out;
  out.throughput_bps = throughput(s, a);
  out.reward = out.throughput_bps;

  SystemState& next = out.next;
  next.light = step_light(s.light);
  next.occupancy = step_occupancy(s, rng.traffic);
  next.pose = fly(s.pose, a.flight);
  next.links = sample_link_states(next.pose, rng.links);
  next.energy_ticks = s.energy_ticks;

  if (options_.energy_mode) {
    if (!s.energy_ticks) throw ConfigError("energy mode state carries no battery level");
    const int effective = static_cast<int>(std::lround(next.pose.height_m - s.pose.height_m));
    out.energy_used_ticks = energy_cost_ticks(effective);
    next.energy_ticks = std::max<std::int64_t>(*s.energy_ticks - out.energy_used_ticks, 0);
    const double used = options_.full_energy * static_cast<double>(out.energy_used_ticks) /
                        static_cast<double>(energy::kFullTicks);
    out.reward = out.throughput_bps / used;
    out.depleted = *next.energy_ticks <= 0;
  }
  return out;
}

json to_json(const SystemState& s) {
  json j;
  j["light"] = {{"phase", s.light.phase}, {"slots_in_phase", s.light.slots_in_phase},
                {"green_slots", s.light.green_slots}};
  j["uav"] = {{"block", s.pose.block}, {"height_m", s.pose.height_m}};
  std::vector<int> n(s.occupancy.n.begin(), s.occupancy.n.end());
  j["occupancy"] = n;
  j["plans"] = s.occupancy.plan;
  std::vector<int> links;
  for (auto l : s.links) links.push_back(static_cast<int>(l));
  j["los"] = links;
  j["energy_ticks"] = s.energy_ticks ? json(*s.energy_ticks) : json(nullptr);
  return j;
}

json to_json(const UavAction& a) {
  return {{"horizontal", a.flight.horizontal},
          {"vertical_m", a.flight.vertical_m},
          {"power_w", a.power_w},
          {"channels", a.channels}};
}

json to_json(const Transition& t) {
  return {{"state", to_json(t.state)},
          {"action", to_json(t.action)},
          {"actor_output", t.actor_output},
          {"reward", t.reward},
          {"next_state", to_json(t.next_state)}};
}

SystemState state_from_json(const json& j) {
  SystemState s;
  const auto& l = j.at("light");
  s.light = {l.at("phase").get<int>(), l.at("slots_in_phase").get<int>(), l.at("green_slots").get<int>()};
  s.pose = {j.at("uav").at("block").get<int>(), j.at("uav").at("height_m").get<double>()};
  const auto n = j.at("occupancy").get<std::vector<int>>();
  s.occupancy = Occupancy(static_cast<int>(n.size()));
  for (std::size_t i = 0; i < n.size(); ++i) s.occupancy.n[i] = static_cast<std::uint8_t>(n[i]);
  s.occupancy.plan = j.at("plans").get<std::vector<std::vector<int>>>();
  for (int v : j.at("los").get<std::vector<int>>()) s.links.push_back(v ? LinkState::LoS : LinkState::NLoS);
  if (!j.at("energy_ticks").is_null()) s.energy_ticks = j["energy_ticks"].get<std::int64_t>();
  return s;
}

UavAction action_from_json(const json& j) {
  UavAction a;
  a.flight = {j.at("horizontal").get<int>(), j.at("vertical_m").get<int>()};
  a.power_w = j.at("power_w").get<std::vector<double>>();
  a.channels = j.at("channels").get<std::vector<int>>();
  return a;
}

Transition transition_from_json(const json& j) {
  Transition t;
  t.state = state_from_json(j.at("state"));
  t.action = action_from_json(j.at("action"));
  t.actor_output = j.at("actor_output").get<std::vector<double>>();
  t.reward = j.at("reward").get<double>();
  t.next_state = state_from_json(j.at("next_state"));
  return t;
}

}  // namespace uavnet
