#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "uavnet/topology.hpp"

namespace uavnet {

/// Four-phase signal. Phase 0: flow group B green (flow 2 in the simplified
/// model); 1: B yellow; 2: group A green (flow 1); 3: A yellow. Green/red
/// phases last `green_slots` slots, yellow phases one slot.
struct TrafficLight {
  int phase = 0;
  int slots_in_phase = 0;
  int green_slots = 10;

  int duration() const;
  bool operator==(const TrafficLight&) const = default;
};

int phase_duration(int phase, int green_slots);
TrafficLight step_light(const TrafficLight& light);

/// Number of distinct (phase, timer) pairs: 2N + 2.
int light_state_count(int green_slots);
int light_state_index(const TrafficLight& light);
TrafficLight light_from_index(int index, int green_slots);

/// Per-block vehicle presence. `plan` holds the hops still ahead of the
/// vehicle in each block once it has committed to a turn; it stays empty in
/// the simplified model.
struct Occupancy {
  std::vector<std::uint8_t> n;
  std::vector<std::vector<int>> plan;

  Occupancy() = default;
  explicit Occupancy(int blocks) : n(blocks, 0), plan(blocks) {}

  int blocks() const { return static_cast<int>(n.size()); }
  int vehicles() const;
  bool operator==(const Occupancy&) const = default;
};

/// Uniform draws consumed by one simplified-model step, one per entrance
/// (flow 1 at block 1, flow 2 at block 2). A vehicle arrives when u < lambda.
struct ArrivalDraws {
  double flow1 = 1.0;
  double flow2 = 1.0;
};

/// Deterministic flow update for blocks 0, 3, 4 plus capacity-one queues at the entrances.
Occupancy step_occupancy_simplified(const Occupancy& occ, const TrafficLight& light,
                                    std::array<double, 2> lambda, const ArrivalDraws& draws);

/// Exact successor distribution of step_occupancy_simplified.
std::vector<std::pair<Occupancy, double>> occupancy_distribution_simplified(
    const Occupancy& occ, const TrafficLight& light, std::array<double, 2> lambda);

struct TrafficStepStats {
  int arrivals = 0;
  int departures = 0;
  std::array<int, 3> turns{0, 0, 0};
};

/// One slot of the data-driven model. Vehicles move downstream first so a
/// queue advances as a unit; contention for a block goes to the lowest source
/// index. Draw order is fixed: turn samples in ascending block order, then
/// one arrival draw per entrance in listing order.
Occupancy step_occupancy_realistic(const Occupancy& occ, const TrafficLight& light, const TopologyConfig& topo,
                                   double default_lambda, std::mt19937_64& rng,
                                   TrafficStepStats* stats = nullptr);

double entrance_lambda(const Entrance& e, double default_lambda);

}  // namespace uavnet
