#include "uavnet/traffic.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace uavnet {

int phase_duration(int phase, int green_slots) {
  return (phase == 0 || phase == 2) ? green_slots : 1;
}

int TrafficLight::duration() const { return phase_duration(phase, green_slots); }

TrafficLight step_light(const TrafficLight& light) {
  TrafficLight next = light;
  if (++next.slots_in_phase >= next.duration()) {
    next.phase = (next.phase + 1) % 4;
    next.slots_in_phase = 0;
  }
  return next;
}

int light_state_count(int green_slots) { return 2 * green_slots + 2; }

int light_state_index(const TrafficLight& light) {
  const int n = light.green_slots;
  switch (light.phase) {
    case 0: return light.slots_in_phase;
    case 1: return n;
    case 2: return n + 1 + light.slots_in_phase;
    default: return 2 * n + 1;
  }
}

TrafficLight light_from_index(int index, int green_slots) {
  const int n = green_slots;
  if (index < 0 || index >= light_state_count(n)) throw ConfigError("light index out of range");
  if (index < n) return {0, index, n};
  if (index == n) return {1, 0, n};
  if (index < 2 * n + 1) return {2, index - n - 1, n};
  return {3, 0, n};
}

int Occupancy::vehicles() const {
  int c = 0;
  for (auto v : n) c += v;
  return c;
}

namespace {

void require_simplified(const Occupancy& occ) {
  if (occ.blocks() != 5)
    throw ConfigError("simplified traffic step needs 5 blocks, got " + std::to_string(occ.blocks()));
}

// Deterministic part for blocks 0, 3 and 4.
void advance_core(const Occupancy& occ, int phase, Occupancy& next) {
  const auto& n = occ.n;
  next.n[0] = phase == 0 ? n[2] : (phase == 2 ? n[1] : 0);
  next.n[3] = (phase == 2 || phase == 3) ? n[0] : 0;
  next.n[4] = (phase == 0 || phase == 1) ? n[0] : 0;
}

// An entrance keeps its vehicle unless its flow is green; an empty slot fills
// with probability lambda. Returns the probability the entrance ends occupied.
double entrance_occupied_probability(std::uint8_t occupied, bool green, double lambda) {
  if (!green && occupied) return 1.0;
  return lambda;
}

}  // namespace

Occupancy step_occupancy_simplified(const Occupancy& occ, const TrafficLight& light, std::array<double, 2> lambda,
                                    const ArrivalDraws& draws) {
  require_simplified(occ);
  Occupancy next(5);
  advance_core(occ, light.phase, next);
  const bool green1 = light.phase == 2, green2 = light.phase == 0;
  next.n[1] = (!green1 && occ.n[1]) ? 1 : (draws.flow1 < lambda[0] ? 1 : 0);
  next.n[2] = (!green2 && occ.n[2]) ? 1 : (draws.flow2 < lambda[1] ? 1 : 0);
  return next;
}

std::vector<std::pair<Occupancy, double>> occupancy_distribution_simplified(const Occupancy& occ,
                                                                            const TrafficLight& light,
                                                                            std::array<double, 2> lambda) {
  require_simplified(occ);
  Occupancy base(5);
  advance_core(occ, light.phase, base);
  const double p1 = entrance_occupied_probability(occ.n[1], light.phase == 2, lambda[0]);
  const double p2 = entrance_occupied_probability(occ.n[2], light.phase == 0, lambda[1]);
  std::vector<std::pair<Occupancy, double>> out;
  for (int a = 0; a < 2; ++a) {
    const double pa = a ? p1 : 1.0 - p1;
    if (pa == 0.0) continue;
    for (int b = 0; b < 2; ++b) {
      const double pb = b ? p2 : 1.0 - p2;
      if (pb == 0.0) continue;
      Occupancy o = base;
      o.n[1] = static_cast<std::uint8_t>(a);
      o.n[2] = static_cast<std::uint8_t>(b);
      out.emplace_back(std::move(o), pa * pb);
    }
  }
  return out;
}

double entrance_lambda(const Entrance& e, double default_lambda) {
  return e.arrival_probability.value_or(default_lambda);
}

Occupancy step_occupancy_realistic(const Occupancy& occ, const TrafficLight& light, const TopologyConfig& topo,
                                   double default_lambda, std::mt19937_64& rng, TrafficStepStats* stats) {
  const int nb = topo.block_count();
  if (occ.blocks() != nb)
    throw ConfigError("occupancy has " + std::to_string(occ.blocks()) + " blocks, topology has " +
                      std::to_string(nb));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  constexpr int kLeave = -2, kWait = -1;
  std::vector<std::vector<int>> plan = occ.plan;
  plan.resize(nb);
  std::vector<int> target(nb, kWait);

  for (int b = 0; b < nb; ++b) {
    if (!occ.n[b]) continue;
    if (topo.is_exit(b) && plan[b].empty()) {
      target[b] = kLeave;
      continue;
    }
    if (plan[b].empty()) {
      if (const TurnRule* rule = topo.turn_rule(b)) {
        const double u = uniform(rng);
        int turn = 0;
        double acc = rule->probabilities[0];
        while (turn < 2 && u >= acc) acc += rule->probabilities[++turn];
        plan[b] = rule->paths[turn];
        if (stats) ++stats->turns[turn];
      } else {
        const Route* only = nullptr;
        for (const auto& r : topo.routes) {
          if (r.from != b) continue;
          if (only) throw ConfigError("traffic: block " + std::to_string(b) + " has several routes but no turn rule");
          only = &r;
        }
        if (!only) throw ConfigError("traffic: vehicle stranded at block " + std::to_string(b));
        plan[b] = {only->to};
      }
    }
    const Route* route = topo.find_route(b, plan[b].front());
    if (!route) throw ConfigError("traffic: planned hop is not a declared route");
    if (route->permits(light.phase)) target[b] = plan[b].front();
  }

  // winner[t]: lowest source block bidding for t.
  std::vector<int> winner(nb, std::numeric_limits<int>::max());
  for (int b = 0; b < nb; ++b)
    if (target[b] >= 0) winner[target[b]] = std::min(winner[target[b]], b);

  // 0 = unknown, 1 = in progress, 2 = moves, 3 = stays
  std::vector<int> status(nb, 0);
  auto moves = [&](auto&& self, int b) -> bool {
    if (status[b] >= 2) return status[b] == 2;
    if (status[b] == 1) return false;  // cycle: nobody moves
    status[b] = 1;
    bool ok = false;
    if (target[b] == kLeave) {
      ok = true;
    } else if (target[b] >= 0 && winner[target[b]] == b) {
      const int t = target[b];
      ok = !occ.n[t] || self(self, t);
    }
    status[b] = ok ? 2 : 3;
    return ok;
  };

  Occupancy next(nb);
  for (int b = 0; b < nb; ++b) {
    if (!occ.n[b]) continue;
    if (moves(moves, b)) {
      if (target[b] == kLeave) {
        if (stats) ++stats->departures;
        continue;
      }
      const int t = target[b];
      next.n[t] = 1;
      next.plan[t].assign(plan[b].begin() + 1, plan[b].end());
    } else {
      next.n[b] = 1;
      next.plan[b] = plan[b];
    }
  }
  for (const auto& e : topo.entrances) {
    const double u = uniform(rng);
    if (!next.n[e.block] && u < entrance_lambda(e, default_lambda)) {
      next.n[e.block] = 1;
      next.plan[e.block].clear();
      if (stats) ++stats->arrivals;
    }
  }
  return next;
}

}  // namespace uavnet
