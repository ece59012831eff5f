#pragma once

#include <utility>
#include <vector>

#include "uavnet/mdp.hpp"

namespace uavnet {

/// Enumerates the simplified model at a fixed height with every link in LoS.
/// A state is (light phase and timer, UAV block, occupancy); height and link
/// states are constant and left out of the index.
///
/// index = (light_index * positions + position) * 32 + occupancy bits, where
/// bit i is set when block i holds a vehicle.
class SimplifiedStateSpace {
 public:
  /// `positions` lists the UAV blocks to enumerate; empty means all UAV
  /// blocks of the topology. Throws ConfigError unless the environment is
  /// the 5-block model with all-LoS links and vertical flight disabled.
  explicit SimplifiedStateSpace(const Environment& env, std::vector<int> positions = {});

  int size() const { return light_states_ * static_cast<int>(positions_.size()) * kOccupancies; }
  int light_states() const { return light_states_; }
  const std::vector<int>& positions() const { return positions_; }

  int index(const SystemState& s) const;
  SystemState state(int index) const;
  std::vector<SystemState> enumerate() const;

  /// Exact successor distribution of Environment::step for (s, a), merged by
  /// successor index. Throws ConfigError if the flight leaves the enumerated
  /// positions.
  std::vector<std::pair<int, double>> transition_kernel(int s, const FlightAction& flight) const;

  const Environment& environment() const { return env_; }

  static constexpr int kBlocks = 5;
  static constexpr int kOccupancies = 32;

 private:
  const Environment& env_;
  std::vector<int> positions_;
  std::vector<int> position_slot_;  // block -> slot in positions_, or -1
  int light_states_;
};

}  // namespace uavnet
