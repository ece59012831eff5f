#include "uavnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavnet/action_codec.hpp"

namespace uavnet {

namespace {

UavAction equal_action(const Environment& env, const SystemState& s, FlightAction f) {
  auto alloc = equal_allocation(s.occupancy, env.limits());
  return {f, std::move(alloc.power_w), std::move(alloc.channels)};
}

}  // namespace

int vertical_toward(const Environment& env, double current, double height) {
  const auto& fl = env.flight_limits();
  if (!fl.allow_vertical || std::abs(current - height) < 1e-9) return 0;
  const int step = static_cast<int>(std::lround(fl.vertical_step_m));
  return current < height ? step : -step;
}

CyclePolicy::CyclePolicy(const Environment& env) : env_(env) {}

UavAction CyclePolicy::act(const SystemState& s) {
  const auto& moves = env_.moves();
  const auto& uav = env_.topology().uav;
  int h = moves.anticlockwise();
  if (s.pose.block == uav.center) h = moves.to_ring(*std::min_element(uav.ring.begin(), uav.ring.end()));
  const int v = vertical_toward(env_, s.pose.height_m, env_.flight_limits().fixed_height_m);
  return equal_action(env_, s, {h, v});
}

GreedyPolicy::GreedyPolicy(const Environment& env) : env_(env) {
  const auto& topo = env.topology();
  const auto ub = topo.uav_blocks();
  catchment_.assign(topo.block_count(), -1);
  for (int b = 0; b < topo.block_count(); ++b) {
    double best = std::numeric_limits<double>::infinity();
    for (int u : ub) {
      const double d = topo.horizontal_distance(b, u);
      if (d < best - 1e-9) {
        best = d;
        catchment_[b] = u;
      }
    }
  }
}

int GreedyPolicy::target_block(const Occupancy& occ) const {
  std::vector<int> count(occ.blocks(), 0);
  for (int b = 0; b < occ.blocks(); ++b) count[catchment_[b]] += occ.n[b];
  int target = -1, best = 0;
  for (int u : env_.topology().uav_blocks())
    if (count[u] > best) {
      best = count[u];
      target = u;
    }
  return target;
}

UavAction GreedyPolicy::act(const SystemState& s) {
  const auto& moves = env_.moves();
  const int target = target_block(s.occupancy);
  int h = moves.stay();
  if (target >= 0 && target != s.pose.block) {
    const int direct = moves.move_between(s.pose.block, target);
    h = direct >= 0 ? direct : moves.to_center();
  }
  const int v = vertical_toward(env_, s.pose.height_m, env_.flight_limits().fixed_height_m);
  return equal_action(env_, s, {h, v});
}

}  // namespace uavnet
