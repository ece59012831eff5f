#include "uavnet/state_space.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace uavnet {

SimplifiedStateSpace::SimplifiedStateSpace(const Environment& env, std::vector<int> positions)
    : env_(env), positions_(std::move(positions)) {
  const auto& topo = env.topology();
  if (topo.model != TrafficModel::Simplified || topo.block_count() != kBlocks)
    throw ConfigError("state enumeration needs the 5-block model");
  if (!env.options().all_los) throw ConfigError("state enumeration needs all-LoS links");
  if (env.flight_limits().allow_vertical) throw ConfigError("state enumeration needs a fixed height");
  if (env.options().energy_mode) throw ConfigError("state enumeration does not track energy");
  if (positions_.empty()) positions_ = topo.uav_blocks();
  position_slot_.assign(kBlocks, -1);
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const int b = positions_[i];
    if (!topo.is_uav_block(b)) throw ConfigError("enumerated position " + std::to_string(b) + " is not a UAV block");
    if (position_slot_[b] >= 0) throw ConfigError("duplicate enumerated position");
    position_slot_[b] = static_cast<int>(i);
  }
  light_states_ = light_state_count(env.options().green_slots);
}

int SimplifiedStateSpace::index(const SystemState& s) const {
  if (s.light.green_slots != env_.options().green_slots) throw ConfigError("light period mismatch");
  const int slot = (s.pose.block >= 0 && s.pose.block < kBlocks) ? position_slot_[s.pose.block] : -1;
  if (slot < 0) throw ConfigError("UAV block outside the enumerated positions");
  int bits = 0;
  for (int i = 0; i < kBlocks; ++i)
    if (s.occupancy.n[i]) bits |= 1 << i;
  return (light_state_index(s.light) * static_cast<int>(positions_.size()) + slot) * kOccupancies + bits;
}

SystemState SimplifiedStateSpace::state(int index) const {
  if (index < 0 || index >= size()) throw ConfigError("state index out of range");
  const int bits = index % kOccupancies;
  const int rest = index / kOccupancies;
  const int npos = static_cast<int>(positions_.size());
  SystemState s;
  s.light = light_from_index(rest / npos, env_.options().green_slots);
  s.pose = {positions_[rest % npos], env_.flight_limits().fixed_height_m};
  s.occupancy = Occupancy(kBlocks);
  for (int i = 0; i < kBlocks; ++i) s.occupancy.n[i] = (bits >> i) & 1;
  s.links.assign(kBlocks, LinkState::LoS);
  return s;
}

std::vector<SystemState> SimplifiedStateSpace::enumerate() const {
  std::vector<SystemState> out;
  out.reserve(size());
  for (int i = 0; i < size(); ++i) out.push_back(state(i));
  return out;
}

std::vector<std::pair<int, double>> SimplifiedStateSpace::transition_kernel(int s, const FlightAction& flight) const {
  const SystemState cur = state(s);
  SystemState next;
  next.light = step_light(cur.light);
  next.pose = env_.fly(cur.pose, flight);
  next.links = cur.links;
  const auto& entrances = env_.topology().entrances;
  const std::array<double, 2> lambda{entrance_lambda(entrances[0], env_.options().lambda),
                                     entrance_lambda(entrances[1], env_.options().lambda)};
  std::map<int, double> merged;
  for (auto& [occ, p] : occupancy_distribution_simplified(cur.occupancy, cur.light, lambda)) {
    next.occupancy = occ;
    merged[index(next)] += p;
  }
  return {merged.begin(), merged.end()};
}

}  // namespace uavnet
