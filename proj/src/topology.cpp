#include "uavnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace uavnet {

namespace {

using nlohmann::json;

const char* model_name(TrafficModel m) {
  return m == TrafficModel::Simplified ? "simplified" : "realistic";
}

TrafficModel parse_model(const std::string& s) {
  if (s == "simplified") return TrafficModel::Simplified;
  if (s == "realistic") return TrafficModel::Realistic;
  throw ConfigError("topology: unknown model '" + s + "'");
}

std::string block_str(int b) { return "block " + std::to_string(b); }

}  // namespace

bool Route::permits(int phase) const {
  return std::find(phases.begin(), phases.end(), phase) != phases.end();
}

std::vector<int> TopologyConfig::uav_blocks() const {
  std::vector<int> blocks;
  blocks.push_back(uav.center);
  blocks.insert(blocks.end(), uav.ring.begin(), uav.ring.end());
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

bool TopologyConfig::is_uav_block(int block) const {
  return block == uav.center ||
         std::find(uav.ring.begin(), uav.ring.end(), block) != uav.ring.end();
}

bool TopologyConfig::is_exit(int block) const {
  return std::find(exits.begin(), exits.end(), block) != exits.end();
}

const TurnRule* TopologyConfig::turn_rule(int block) const {
  for (const auto& r : turn_rules)
    if (r.block == block) return &r;
  return nullptr;
}

const Route* TopologyConfig::find_route(int from, int to) const {
  for (const auto& r : routes)
    if (r.from == from && r.to == to) return &r;
  return nullptr;
}

double TopologyConfig::horizontal_distance(int a, int b) const {
  const Vec2& p = coordinates.at(a);
  const Vec2& q = coordinates.at(b);
  return std::hypot(p.x - q.x, p.y - q.y);
}

void TopologyConfig::validate() const {
  const int n = block_count();
  auto check_block = [&](int b, const std::string& where) {
    if (b < 0 || b >= n)
      throw ConfigError("topology: " + where + " references missing " + block_str(b));
  };
  if (n == 0) throw ConfigError("topology: no blocks");
  if (!(block_length_m > 0.0)) throw ConfigError("topology: block_length_m must be positive");
  if (static_cast<int>(adjacency.size()) != n)
    throw ConfigError("topology: adjacency must have one entry per block");
  for (int b = 0; b < n; ++b)
    for (int nb : adjacency[b]) check_block(nb, "adjacency of " + block_str(b));
  if (model == TrafficModel::Simplified && n != 5)
    throw ConfigError("topology: simplified model needs exactly 5 blocks, got " + std::to_string(n));

  for (const auto& r : routes) {
    check_block(r.from, "route");
    check_block(r.to, "route");
    const auto& adj = adjacency[r.from];
    if (std::find(adj.begin(), adj.end(), r.to) == adj.end())
      throw ConfigError("topology: route " + std::to_string(r.from) + "->" + std::to_string(r.to) +
                        " joins non-adjacent blocks");
    if (r.phases.empty()) throw ConfigError("topology: route without permitted phases");
    for (int p : r.phases)
      if (p < 0 || p > 3) throw ConfigError("topology: light phase out of range in route");
  }
  if (entrances.empty()) throw ConfigError("topology: no entrances");
  for (const auto& e : entrances) {
    check_block(e.block, "entrance");
    if (e.arrival_probability && (*e.arrival_probability < 0.0 || *e.arrival_probability > 1.0))
      throw ConfigError("topology: entrance arrival probability outside [0,1]");
  }
  for (int x : exits) check_block(x, "exit");
  for (const auto& t : turn_rules) {
    check_block(t.block, "turn rule");
    double sum = 0.0;
    for (double p : t.probabilities) {
      if (p < 0.0) throw ConfigError("topology: negative turn probability at " + block_str(t.block));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("topology: turn probabilities at " + block_str(t.block) + " do not sum to 1");
    for (std::size_t k = 0; k < 3; ++k) {
      if (t.probabilities[k] == 0.0 && t.paths[k].empty()) continue;
      if (t.paths[k].empty())
        throw ConfigError("topology: turn with positive probability has no path at " + block_str(t.block));
      int prev = t.block;
      for (int hop : t.paths[k]) {
        check_block(hop, "turn path");
        if (!find_route(prev, hop))
          throw ConfigError("topology: turn path hop " + std::to_string(prev) + "->" + std::to_string(hop) +
                            " is not a declared route");
        prev = hop;
      }
    }
  }
  if (model == TrafficModel::Realistic) {
    for (int b = 0; b < n; ++b) {
      if (is_exit(b)) continue;
      bool has_out = std::any_of(routes.begin(), routes.end(), [&](const Route& r) { return r.from == b; });
      if (!has_out) throw ConfigError("topology: non-exit " + block_str(b) + " has no outgoing route");
    }
  }

  check_block(uav.center, "uav center");
  if (uav.ring.size() < 2) throw ConfigError("topology: uav ring needs at least two blocks");
  std::set<int> seen{uav.center};
  for (int b : uav.ring) {
    check_block(b, "uav ring");
    if (!seen.insert(b).second) throw ConfigError("topology: duplicate uav block " + std::to_string(b));
  }
}

json TopologyConfig::to_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = name;
  j["model"] = model_name(model);
  j["block_length_m"] = block_length_m;
  j["block_count"] = block_count();
  json blocks = json::array();
  for (int b = 0; b < block_count(); ++b)
    blocks.push_back({{"id", b}, {"x", coordinates[b].x}, {"y", coordinates[b].y}, {"adjacent", adjacency[b]}});
  j["blocks"] = blocks;
  json rs = json::array();
  for (const auto& r : routes) rs.push_back({{"from", r.from}, {"to", r.to}, {"phases", r.phases}});
  j["routes"] = rs;
  json es = json::array();
  for (const auto& e : entrances) {
    json ej{{"block", e.block}};
    ej["arrival_probability"] = e.arrival_probability ? json(*e.arrival_probability) : json(nullptr);
    es.push_back(ej);
  }
  j["entrances"] = es;
  j["exits"] = exits;
  json ts = json::array();
  for (const auto& t : turn_rules) {
    ts.push_back({{"block", t.block},
                  {"straight", t.probabilities[0]},
                  {"left", t.probabilities[1]},
                  {"right", t.probabilities[2]},
                  {"paths", {{"straight", t.paths[0]}, {"left", t.paths[1]}, {"right", t.paths[2]}}}});
  }
  j["turn_rules"] = ts;
  j["uav"] = {{"center", uav.center}, {"ring_anticlockwise", uav.ring}};
  return j;
}

TopologyConfig TopologyConfig::from_json(const json& j) {
  TopologyConfig t;
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion)
      throw ConfigError("topology: unsupported schema_version " + std::to_string(version));
    t.name = j.value("name", "");
    t.model = parse_model(j.at("model").get<std::string>());
    t.block_length_m = j.at("block_length_m").get<double>();
    const auto& blocks = j.at("blocks");
    t.coordinates.resize(blocks.size());
    t.adjacency.resize(blocks.size());
    for (const auto& b : blocks) {
      const int id = b.at("id").get<int>();
      if (id < 0 || id >= static_cast<int>(blocks.size()))
        throw ConfigError("topology: block ids must be 0..block_count-1");
      t.coordinates[id] = {b.at("x").get<double>(), b.at("y").get<double>()};
      t.adjacency[id] = b.at("adjacent").get<std::vector<int>>();
    }
    if (j.contains("block_count") && j["block_count"].get<int>() != t.block_count())
      throw ConfigError("topology: block_count disagrees with the block list");
    for (const auto& r : j.at("routes"))
      t.routes.push_back({r.at("from").get<int>(), r.at("to").get<int>(), r.at("phases").get<std::vector<int>>()});
    for (const auto& e : j.at("entrances")) {
      Entrance en{e.at("block").get<int>(), std::nullopt};
      if (e.contains("arrival_probability") && !e["arrival_probability"].is_null())
        en.arrival_probability = e["arrival_probability"].get<double>();
      t.entrances.push_back(en);
    }
    t.exits = j.at("exits").get<std::vector<int>>();
    for (const auto& tr : j.value("turn_rules", json::array())) {
      TurnRule rule;
      rule.block = tr.at("block").get<int>();
      rule.probabilities = {tr.at("straight").get<double>(), tr.at("left").get<double>(),
                            tr.at("right").get<double>()};
      const auto& paths = tr.at("paths");
      rule.paths[0] = paths.value("straight", std::vector<int>{});
      rule.paths[1] = paths.value("left", std::vector<int>{});
      rule.paths[2] = paths.value("right", std::vector<int>{});
      t.turn_rules.push_back(rule);
    }
    t.uav.center = j.at("uav").at("center").get<int>();
    t.uav.ring = j.at("uav").at("ring_anticlockwise").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("topology: malformed JSON: ") + e.what());
  }
  t.validate();
  return t;
}

TopologyConfig TopologyConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("topology: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("topology: " + path + ": " + e.what());
  }
  return from_json(j);
}

void TopologyConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("topology: cannot write " + path);
  out << to_json().dump(2) << "\n";
}

TopologyConfig simplified_topology(double d) {
  TopologyConfig t;
  t.name = "simplified-5";
  t.model = TrafficModel::Simplified;
  t.block_length_m = d;
  // 1 west, 2 south, 3 east, 4 north: 1 -> 2 -> 3 -> 4 runs anticlockwise.
  t.coordinates = {{0, 0}, {-d, 0}, {0, -d}, {d, 0}, {0, d}};
  t.adjacency = {{1, 2, 3, 4}, {0, 2, 4}, {0, 1, 3}, {0, 2, 4}, {0, 1, 3}};
  t.routes = {{1, 0, {2}}, {0, 3, {2, 3}}, {2, 0, {0}}, {0, 4, {0, 1}}};
  t.entrances = {{1, std::nullopt}, {2, std::nullopt}};
  t.exits = {3, 4};
  t.uav = {0, {1, 2, 3, 4}};
  t.validate();
  return t;
}

TopologyConfig realistic_topology(double d, std::array<double, 3> turn_probabilities) {
  TopologyConfig t;
  t.name = "realistic-33";
  t.model = TrafficModel::Realistic;
  t.block_length_m = d;
  t.coordinates.resize(33);
  const double w = d / 2.0;
  const std::vector<int> all_phases{0, 1, 2, 3};

  // Arm k points along angle k*90 degrees (east, north, west, south).
  auto incoming = [](int k, int m) {  // m = 1 next to the intersection .. 4 entrance
    switch (m) {
      case 1: return 2 + 2 * k;
      case 2: return 10 + 4 * k;
      case 3: return 9 + 4 * k;
      default: return 26 + 2 * k;
    }
  };
  auto outgoing = [](int k, int m) {
    switch (m) {
      case 1: return 1 + 2 * k;
      case 2: return 11 + 4 * k;
      case 3: return 12 + 4 * k;
      default: return 25 + 2 * k;
    }
  };
  t.coordinates[0] = {0.0, 0.0};
  for (int k = 0; k < 4; ++k) {
    const double ang = k * M_PI / 2.0;
    const double ax = std::round(std::cos(ang)), ay = std::round(std::sin(ang));
    const double px = -ay, py = ax;  // left of the outward axis
    for (int m = 1; m <= 4; ++m) {
      // Right-hand traffic: inbound vehicles keep to the left of the outward axis.
      t.coordinates[incoming(k, m)] = {ax * m * d + px * w, ay * m * d + py * w};
      t.coordinates[outgoing(k, m)] = {ax * m * d - px * w, ay * m * d - py * w};
    }
  }

  const int group_green[4] = {2, 0, 2, 0};  // east-west arms move in phase 2, north-south in 0
  for (int k = 0; k < 4; ++k) {
    t.routes.push_back({incoming(k, 4), incoming(k, 3), all_phases});
    t.routes.push_back({incoming(k, 3), incoming(k, 2), all_phases});
    t.routes.push_back({incoming(k, 2), incoming(k, 1), all_phases});
    t.routes.push_back({incoming(k, 1), 0, {group_green[k]}});
    t.routes.push_back({incoming(k, 1), outgoing((k + 1) % 4, 1), {group_green[k]}});
    t.routes.push_back({0, outgoing(k, 1), all_phases});
    t.routes.push_back({outgoing(k, 1), outgoing(k, 2), all_phases});
    t.routes.push_back({outgoing(k, 2), outgoing(k, 3), all_phases});
    t.routes.push_back({outgoing(k, 3), outgoing(k, 4), all_phases});
    t.entrances.push_back({incoming(k, 4), std::nullopt});
    t.exits.push_back(outgoing(k, 4));

    TurnRule rule;
    rule.block = incoming(k, 1);
    rule.probabilities = turn_probabilities;
    rule.paths[static_cast<int>(Turn::Straight)] = {0, outgoing((k + 2) % 4, 1)};
    rule.paths[static_cast<int>(Turn::Left)] = {0, outgoing((k + 3) % 4, 1)};
    rule.paths[static_cast<int>(Turn::Right)] = {outgoing((k + 1) % 4, 1)};
    t.turn_rules.push_back(rule);
  }
  std::sort(t.exits.begin(), t.exits.end());

  t.uav.center = 0;
  for (int b = 1; b <= 8; ++b) t.uav.ring.push_back(b);

  std::vector<std::set<int>> adj(33);
  for (const auto& r : t.routes) {
    adj[r.from].insert(r.to);
    adj[r.to].insert(r.from);
  }
  for (std::size_t i = 0; i < t.uav.ring.size(); ++i) {
    const int a = t.uav.ring[i], b = t.uav.ring[(i + 1) % t.uav.ring.size()];
    adj[a].insert(b);
    adj[b].insert(a);
    adj[a].insert(0);
    adj[0].insert(a);
  }
  t.adjacency.resize(33);
  for (int b = 0; b < 33; ++b) t.adjacency[b].assign(adj[b].begin(), adj[b].end());
  t.validate();
  return t;
}

}  // namespace uavnet
