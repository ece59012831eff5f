#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavnet/radio.hpp"
#include "uavnet/topology.hpp"
#include "uavnet/traffic.hpp"

namespace uavnet {

struct UavPose {
  int block = 0;
  double height_m = 150.0;
  bool operator==(const UavPose&) const = default;
};

/// Energy is counted in integer ticks so that the three flight rates divide
/// a full battery exactly: 32130 = lcm(270, 210, 170).
namespace energy {
inline constexpr std::int64_t kFullTicks = 32130;
inline constexpr std::int64_t kDescendTicks = kFullTicks / 270;
inline constexpr std::int64_t kLevelTicks = kFullTicks / 210;
inline constexpr std::int64_t kAscendTicks = kFullTicks / 170;
}  // namespace energy

struct SystemState {
  TrafficLight light;
  UavPose pose;
  Occupancy occupancy;
  std::vector<LinkState> links;
  std::optional<std::int64_t> energy_ticks;  // energy extension only

  double energy_fraction() const;
  bool operator==(const SystemState&) const = default;
};

struct FlightAction {
  int horizontal = 0;   // index into FlightMoves
  int vertical_m = 0;   // -5, 0 or +5
  bool operator==(const FlightAction&) const = default;
};

struct UavAction {
  FlightAction flight;
  std::vector<double> power_w;
  std::vector<int> channels;
  bool operator==(const UavAction&) const = default;
};

/// One replay record. `actor_output` is the (noisy) actor vector the critic
/// was trained on; it is empty for transitions produced by other policies.
struct Transition {
  SystemState state;
  UavAction action;
  std::vector<double> actor_output;
  double reward = 0.0;
  SystemState next_state;
  bool operator==(const Transition&) const = default;
};

struct ResourceLimits {
  double total_power_w = 6.0;
  int total_channels = 10;
  double max_power_w = 3.0;
  int max_channels = 5;

  void validate() const;
};

struct FlightLimits {
  double z_min_m = 10.0;
  double z_max_m = 200.0;
  double vertical_step_m = 5.0;
  bool allow_vertical = true;
  // Height used when vertical flight is disabled and by fixed-pose policies.
  double fixed_height_m = 150.0;

  void validate() const;
  std::vector<int> vertical_moves() const;
};

/// Horizontal move catalogue derived from a UAV layout with R ring blocks:
/// 0 stay, 1..R fly from the center to the ring block with the k-th smallest
/// id, R+1 anticlockwise, R+2 back to the center, R+3 clockwise. A move not
/// available from the current block leaves it unchanged.
class FlightMoves {
 public:
  explicit FlightMoves(const UavLayout& layout);

  int count() const { return static_cast<int>(ring_.size()) + 4; }
  int destination(int from_block, int move) const;
  std::string name(int move) const;
  int stay() const { return 0; }
  int to_ring(int block) const;
  int anticlockwise() const { return static_cast<int>(ring_.size()) + 1; }
  int to_center() const { return static_cast<int>(ring_.size()) + 2; }
  int clockwise() const { return static_cast<int>(ring_.size()) + 3; }
  /// Move that reaches `to` from `from` in one slot, or -1.
  int move_between(int from, int to) const;

 private:
  int center_;
  std::vector<int> ring_;         // anticlockwise order
  std::vector<int> ring_sorted_;  // ascending block id
  int ring_position(int block) const;
};

UavPose apply_flight(const UavPose& pose, const FlightAction& flight, const FlightMoves& moves,
                     const FlightLimits& limits);

/// Energy drawn by the flight actually flown: descending, level (hover
/// included) or ascending.
std::int64_t energy_cost_ticks(int effective_vertical_m);
double energy_cost(const FlightAction& flight, double full_energy);

/// Total throughput in bits/s at the pre-flight geometry. Blocks with no
/// vehicle or no channels contribute nothing. Throws InvalidAction on
/// constraint violations.
double reward(const SystemState& state, const UavAction& action, const std::vector<double>& gains,
              const ResourceLimits& limits, const ChannelParams& channel);

class InvalidAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate_action(const UavAction& action, int blocks, const ResourceLimits& limits);

struct RandomStreams {
  std::mt19937_64 traffic;
  std::mt19937_64 links;
};

struct EnvironmentOptions {
  double lambda = 0.5;
  int green_slots = 10;
  bool all_los = false;
  bool energy_mode = false;
  double full_energy = 1.0;
  double energy_budget_fraction = 1.0;
};

struct StepResult {
  SystemState next;
  double throughput_bps = 0.0;
  /// Throughput, or throughput per energy unit in the energy extension.
  double reward = 0.0;
  std::int64_t energy_used_ticks = 0;
  bool depleted = false;
};

class Environment {
 public:
  Environment(TopologyConfig topo, ChannelParams channel, ResourceLimits limits, FlightLimits flight,
              EnvironmentOptions options);

  const TopologyConfig& topology() const { return topo_; }
  const ChannelParams& channel() const { return channel_; }
  const ResourceLimits& limits() const { return limits_; }
  const FlightLimits& flight_limits() const { return flight_; }
  const EnvironmentOptions& options() const { return options_; }
  const FlightMoves& moves() const { return moves_; }
  int blocks() const { return topo_.block_count(); }

  /// Light at phase 0, empty roads, links drawn at `pose`, battery at the
  /// configured budget fraction.
  SystemState initial_state(const UavPose& pose, std::mt19937_64& link_rng) const;
  UavPose random_pose(std::mt19937_64& rng) const;
  std::vector<double> los_probabilities(const UavPose& pose) const;
  std::vector<LinkState> sample_link_states(const UavPose& pose, std::mt19937_64& rng) const;
  std::vector<double> gains(const SystemState& state) const;
  double throughput(const SystemState& state, const UavAction& action) const;
  UavPose fly(const UavPose& pose, const FlightAction& flight) const;
  Occupancy step_occupancy(const SystemState& state, std::mt19937_64& rng) const;

  /// Reward at s_t, then light, traffic, flight, link resampling and energy.
  StepResult step(const SystemState& state, const UavAction& action, RandomStreams& rng) const;

  /// Heights the UAV can occupy: z_min, z_min + step, ..., z_max.
  std::vector<double> height_grid() const;

 private:
  TopologyConfig topo_;
  ChannelParams channel_;
  ResourceLimits limits_;
  FlightLimits flight_;
  EnvironmentOptions options_;
  FlightMoves moves_;
};

/// Canonical JSON forms used for checkpoints and fixtures. Doubles are written
/// with round-trip precision.
nlohmann::json to_json(const SystemState& s);
nlohmann::json to_json(const UavAction& a);
nlohmann::json to_json(const Transition& t);
SystemState state_from_json(const nlohmann::json& j);
UavAction action_from_json(const nlohmann::json& j);
Transition transition_from_json(const nlohmann::json& j);

/// Anything that picks an action from a state during a rollout.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual UavAction act(const SystemState& state) = 0;
  virtual void reset() {}
};

}  // namespace uavnet
