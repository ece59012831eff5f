#include "uavnet/action_codec.hpp"

#include <algorithm>
#include <numeric>

namespace uavnet {

std::vector<int> allocate_channels(const std::vector<double>& power_w, const Occupancy& occ, int max_channels,
                                   int total_channels) {
  const int n = occ.blocks();
  if (static_cast<int>(power_w.size()) != n) throw InvalidAction("power vector size mismatch");
  std::vector<double> avg(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (occ.n[i]) avg[i] = power_w[i] / occ.n[i];
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return avg[a] > avg[b]; });
  std::vector<int> c(n, 0);
  int remaining = total_channels;
  for (int j : order) {
    c[j] = std::min(remaining, occ.n[j] * max_channels);
    remaining -= c[j];
  }
  return c;
}

Allocation equal_allocation(const Occupancy& occ, const ResourceLimits& limits) {
  const int n = occ.blocks();
  Allocation a{std::vector<double>(n, 0.0), std::vector<int>(n, 0)};
  const int v = occ.vehicles();
  if (v == 0) return a;
  const double p = std::min(limits.total_power_w / v, limits.max_power_w);
  const int base = std::min(limits.total_channels / v, limits.max_channels);
  int leftover = limits.total_channels - base * v;
  for (int i = 0; i < n; ++i) {
    if (!occ.n[i]) continue;
    a.power_w[i] = p;
    a.channels[i] = base;
    if (leftover > 0 && base < limits.max_channels) {
      ++a.channels[i];
      --leftover;
    }
  }
  return a;
}

std::string to_string(ControlMode m) {
  switch (m) {
    case ControlMode::Power: return "power";
    case ControlMode::Flight: return "flight";
    default: return "joint";
  }
}

ControlMode control_mode_from_string(const std::string& s) {
  if (s == "power") return ControlMode::Power;
  if (s == "flight") return ControlMode::Flight;
  if (s == "joint") return ControlMode::Joint;
  throw ConfigError("unknown control mode '" + s + "'");
}

ActionCodec::ActionCodec(ControlMode mode, int blocks, int horizontal_moves, std::vector<int> vertical_moves,
                         ResourceLimits limits)
    : mode_(mode), blocks_(blocks), horizontal_(horizontal_moves), vertical_(std::move(vertical_moves)),
      limits_(limits) {
  if (blocks_ < 1 || horizontal_ < 1 || vertical_.empty()) throw ConfigError("codec: empty action component");
  limits_.validate();
}

double ActionCodec::low(int i) const { return i < flight_size() ? -1.0 : 0.0; }
double ActionCodec::high(int) const { return 1.0; }

void ActionCodec::clip(std::vector<double>& out) const {
  for (int i = 0; i < size(); ++i) out[i] = std::clamp(out[i], low(i), high(i));
}

UavAction ActionCodec::decode(const std::vector<double>& out, const SystemState& state) const {
  if (static_cast<int>(out.size()) != size()) throw InvalidAction("actor output size mismatch");
  if (state.occupancy.blocks() != blocks_) throw InvalidAction("state block count mismatch");
  UavAction a;
  if (has_flight()) {
    const auto h = std::max_element(out.begin(), out.begin() + horizontal_);
    const auto v = std::max_element(out.begin() + horizontal_, out.begin() + flight_size());
    a.flight.horizontal = static_cast<int>(h - out.begin());
    a.flight.vertical_m = vertical_[v - (out.begin() + horizontal_)];
  }
  if (has_power()) {
    a.power_w.assign(blocks_, 0.0);
    double sum = 0.0;
    for (int i = 0; i < blocks_; ++i) {
      if (!state.occupancy.n[i]) continue;
      a.power_w[i] = limits_.max_power_w * std::clamp(out[power_offset() + i], 0.0, 1.0);
      sum += a.power_w[i];
    }
    if (sum > limits_.total_power_w) {
      const double k = limits_.total_power_w / sum;
      for (auto& p : a.power_w) p *= k;
    }
    a.channels = allocate_channels(a.power_w, state.occupancy, limits_.max_channels, limits_.total_channels);
  } else {
    auto eq = equal_allocation(state.occupancy, limits_);
    a.power_w = std::move(eq.power_w);
    a.channels = std::move(eq.channels);
  }
  return a;
}

}  // namespace uavnet
