#pragma once

#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "uavnet/exact_solver.hpp"
#include "uavnet/state_space.hpp"

namespace uavnet {

struct TabularModelOptions {
  /// Discrete per-block power levels; every vector with components from
  /// this set and sum <= P is one power action.
  std::vector<double> power_levels{0.0, 1.0, 2.0, 3.0};
  /// UAV blocks to enumerate (empty: all) and horizontal moves to offer
  /// (empty: all). Moves must keep the UAV inside the enumerated blocks.
  std::vector<int> positions;
  std::vector<int> horizontal_moves;
  /// Rewards are stored in bits/s times this factor (Mbit/s by default).
  double reward_scale = 1e-6;
};

/// The simplified model as an explicit finite MDP. Action index
/// a = move_slot * power_vectors + power_slot; channels follow the
/// descending-power assignment.
class TabularModel {
 public:
  TabularModel(Environment env, TabularModelOptions opt = {});
  TabularModel(const TabularModel&) = delete;
  TabularModel& operator=(const TabularModel&) = delete;

  const Environment& environment() const { return *env_; }
  const SimplifiedStateSpace& space() const { return *space_; }
  const TabularMdp& mdp() const { return mdp_; }
  const std::vector<std::vector<double>>& power_vectors() const { return power_; }
  const std::vector<int>& horizontal_moves() const { return moves_; }
  double reward_scale() const { return opt_.reward_scale; }

  int action_count() const { return mdp_.actions; }
  UavAction action(int state, int action) const;

 private:
  std::unique_ptr<Environment> env_;
  std::unique_ptr<SimplifiedStateSpace> space_;
  TabularModelOptions opt_;
  std::vector<std::vector<double>> power_;
  std::vector<int> moves_;
  TabularMdp mdp_;
};

/// Plays a tabular policy in the simulator.
class TablePolicy : public Policy {
 public:
  TablePolicy(const TabularModel& model, TabularPolicy policy) : model_(model), policy_(std::move(policy)) {}
  UavAction act(const SystemState& s) override;

 private:
  const TabularModel& model_;
  TabularPolicy policy_;
};

}  // namespace uavnet
