#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "uavnet/topology.hpp"

using namespace uavnet;

TEST_CASE("shipped topology files equal the built-in geometry") {
  const std::string dir = UAVNET_DATA_DIR;
  CHECK(TopologyConfig::load(dir + "/simplified_5block.json").to_json() == simplified_topology().to_json());
  CHECK(TopologyConfig::load(dir + "/realistic_33block.json").to_json() == realistic_topology().to_json());
}

TEST_CASE("simplified topology layout") {
  const auto t = simplified_topology();
  CHECK(t.block_count() == 5);
  CHECK(t.uav_blocks() == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(t.horizontal_distance(0, 3) == doctest::Approx(3.0));
  CHECK(t.horizontal_distance(1, 2) == doctest::Approx(3.0 * std::sqrt(2.0)));
  REQUIRE(t.find_route(1, 0));
  CHECK(t.find_route(1, 0)->permits(2));
  CHECK_FALSE(t.find_route(1, 0)->permits(0));
  CHECK(t.find_route(0, 1) == nullptr);
}

TEST_CASE("realistic topology layout") {
  const auto t = realistic_topology();
  CHECK(t.block_count() == 33);
  CHECK(t.exits == std::vector<int>{25, 27, 29, 31});
  CHECK(t.entrances.size() == 4);
  CHECK(t.uav.ring.size() == 8);
  for (int b : {2, 4, 6, 8}) CHECK(t.turn_rule(b) != nullptr);
  CHECK(t.turn_rule(1) == nullptr);
  // Every block lies on a square grid of block_length spacing or half of it.
  for (int b = 1; b < 33; ++b) CHECK(t.horizontal_distance(0, b) > 0.0);
  // Ring neighbours are close to each other and to the center.
  for (std::size_t i = 0; i < 8; ++i) {
    const int a = t.uav.ring[i], c = t.uav.ring[(i + 1) % 8];
    CHECK(t.horizontal_distance(a, c) < 2.0 * t.block_length_m);
  }
}

TEST_CASE("ring is anticlockwise around the center") {
  for (const auto& t : {simplified_topology(), realistic_topology()}) {
    double total = 0.0;
    const auto& c = t.coordinates[t.uav.center];
    for (std::size_t i = 0; i < t.uav.ring.size(); ++i) {
      const auto& p = t.coordinates[t.uav.ring[i]];
      const auto& q = t.coordinates[t.uav.ring[(i + 1) % t.uav.ring.size()]];
      total += (p.x - c.x) * (q.y - c.y) - (p.y - c.y) * (q.x - c.x);
    }
    CHECK(total > 0.0);
  }
}

TEST_CASE("JSON round trip preserves the topology") {
  const auto t = realistic_topology(4.0, {0.5, 0.25, 0.25});
  const auto back = TopologyConfig::from_json(t.to_json());
  CHECK(back.to_json() == t.to_json());
  CHECK(back.turn_rules[0].probabilities[0] == 0.5);
}

TEST_CASE("entrance override survives the round trip") {
  auto t = simplified_topology();
  t.entrances[0].arrival_probability = 0.2;
  const auto back = TopologyConfig::from_json(t.to_json());
  REQUIRE(back.entrances[0].arrival_probability);
  CHECK(*back.entrances[0].arrival_probability == 0.2);
  CHECK_FALSE(back.entrances[1].arrival_probability);
}

TEST_CASE("malformed topologies are rejected") {
  const auto base = simplified_topology().to_json();

  auto j = base;
  j["schema_version"] = 2;
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);

  j = base;
  j["routes"].push_back({{"from", 1}, {"to", 3}, {"phases", {0}}});
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);  // 1 and 3 are not adjacent

  j = base;
  j["routes"][0]["to"] = 9;
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);

  j = base;
  j["routes"][0]["phases"] = {4};
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);

  j = base;
  j["block_count"] = 6;
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);

  j = base;
  j["entrances"][0]["arrival_probability"] = 1.5;
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);

  j = base;
  j.erase("uav");
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);

  j = base;
  j["uav"]["ring_anticlockwise"] = {1, 1};
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);
}

TEST_CASE("turn probabilities must sum to one") {
  auto j = realistic_topology().to_json();
  j["turn_rules"][0]["left"] = 0.5;
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);
}

TEST_CASE("turn paths must follow declared routes") {
  auto j = realistic_topology().to_json();
  j["turn_rules"][0]["paths"]["right"] = {0, 25};
  CHECK_THROWS_AS(TopologyConfig::from_json(j), ConfigError);
}

TEST_CASE("missing and unparsable files are configuration errors") {
  CHECK_THROWS_AS(TopologyConfig::load("/nonexistent/topology.json"), ConfigError);
  const auto path = std::filesystem::temp_directory_path() / "uavnet_bad_topology.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(TopologyConfig::load(path.string()), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("save then load") {
  const auto path = std::filesystem::temp_directory_path() / "uavnet_topology_roundtrip.json";
  realistic_topology().save(path.string());
  CHECK(TopologyConfig::load(path.string()).to_json() == realistic_topology().to_json());
  std::filesystem::remove(path);
}
