#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace uavnet {

/// Raised for malformed configuration or topology files and for inputs that
/// do not fit the configured model.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TrafficModel { Simplified, Realistic };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// A permitted vehicle move between two blocks, gated by light phases.
struct Route {
  int from = 0;
  int to = 0;
  std::vector<int> phases;

  bool permits(int phase) const;
};

struct Entrance {
  int block = 0;
  // Overrides the experiment-wide arrival probability when set.
  std::optional<double> arrival_probability;
};

enum class Turn { Straight = 0, Left = 1, Right = 2 };

/// Turn distribution at a decision block. paths[t] lists the blocks a vehicle
/// visits after leaving the decision block when it takes turn t.
struct TurnRule {
  int block = 0;
  std::array<double, 3> probabilities{1.0, 0.0, 0.0};
  std::array<std::vector<int>, 3> paths;
};

/// Blocks the UAV may hover over. Ring blocks are listed in anticlockwise
/// order around the center block.
struct UavLayout {
  int center = 0;
  std::vector<int> ring;
};

/// Road geometry and vehicle routing for one intersection.
///
/// The JSON form mirrors these fields one-to-one; see data/README.md for the
/// schema. `schema_version` is bumped on incompatible changes.
struct TopologyConfig {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  TrafficModel model = TrafficModel::Simplified;
  double block_length_m = 3.0;
  std::vector<Vec2> coordinates;
  std::vector<std::vector<int>> adjacency;
  std::vector<Route> routes;
  std::vector<Entrance> entrances;
  std::vector<int> exits;
  std::vector<TurnRule> turn_rules;
  UavLayout uav;

  int block_count() const { return static_cast<int>(coordinates.size()); }
  std::vector<int> uav_blocks() const;
  bool is_uav_block(int block) const;
  bool is_exit(int block) const;
  const TurnRule* turn_rule(int block) const;
  const Route* find_route(int from, int to) const;
  double horizontal_distance(int a, int b) const;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;

  nlohmann::json to_json() const;
  static TopologyConfig from_json(const nlohmann::json& j);
  static TopologyConfig load(const std::string& path);
  void save(const std::string& path) const;
};

/// One-way two-flow intersection: flow 1 is 1 -> 0 -> 3, flow 2 is 2 -> 0 -> 4.
TopologyConfig simplified_topology(double block_length_m = 3.0);

/// 33-block four-arm intersection. Entrances 26/28/30/32, exits
/// 25/27/29/31, decision blocks 2/4/6/8, UAV blocks 0-8.
TopologyConfig realistic_topology(double block_length_m = 3.0,
                                  std::array<double, 3> turn_probabilities = {0.4, 0.3, 0.3});

}  // namespace uavnet
