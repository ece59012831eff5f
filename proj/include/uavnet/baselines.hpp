#pragma once

#include <vector>

#include "uavnet/mdp.hpp"

namespace uavnet {

/// Flies one ring block anticlockwise per slot at a fixed height and splits
/// power and channels equally among occupied blocks. From the center it
/// first moves to the lowest-numbered ring block.
class CyclePolicy : public Policy {
 public:
  explicit CyclePolicy(const Environment& env);
  UavAction act(const SystemState& s) override;

 private:
  const Environment& env_;
};

/// Heads for the UAV block whose catchment holds the most vehicles (ties to
/// the lowest block id). Each block belongs to the catchment of its nearest
/// UAV block. A target that is not one move away is reached through the
/// center. Stays put when the road is empty.
class GreedyPolicy : public Policy {
 public:
  explicit GreedyPolicy(const Environment& env);
  UavAction act(const SystemState& s) override;
  int target_block(const Occupancy& occ) const;

 private:
  const Environment& env_;
  std::vector<int> catchment_;  // block -> UAV block
};

/// Vertical step that moves the UAV toward `height` (0 when already there).
int vertical_toward(const Environment& env, double current, double height);

}  // namespace uavnet
