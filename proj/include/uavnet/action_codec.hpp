#pragma once

#include <string>
#include <vector>

#include "uavnet/mdp.hpp"

namespace uavnet {

/// Channel assignment by descending average power per vehicle: each block in
/// turn receives min(remaining, n_i * c_max) channels. Ties keep block order.
std::vector<int> allocate_channels(const std::vector<double>& power_w, const Occupancy& occ, int max_channels,
                                   int total_channels);

/// Equal split among occupied blocks: power P/V capped at rho_max, channels
/// floor(C/V) capped at c_max, leftover channels one each to the lowest
/// occupied indices while the cap allows.
struct Allocation {
  std::vector<double> power_w;
  std::vector<int> channels;
};
Allocation equal_allocation(const Occupancy& occ, const ResourceLimits& limits);

enum class ControlMode { Power, Flight, Joint };

std::string to_string(ControlMode m);
ControlMode control_mode_from_string(const std::string& s);

/// Maps actor outputs to constrained actions.
///
/// Output layout: [horizontal logits | vertical logits | power fractions].
/// The flight part is present for Flight and Joint modes and the power part
/// for Power and Joint. Logits lie in [-1, 1] (tanh head) and power fractions
/// in [0, 1] (sigmoid head). The horizontal and vertical moves are chosen by
/// separate argmaxes.
class ActionCodec {
 public:
  ActionCodec(ControlMode mode, int blocks, int horizontal_moves, std::vector<int> vertical_moves,
              ResourceLimits limits);

  ControlMode mode() const { return mode_; }
  int size() const { return flight_size() + power_size(); }
  int horizontal_size() const { return has_flight() ? horizontal_ : 0; }
  int vertical_size() const { return has_flight() ? static_cast<int>(vertical_.size()) : 0; }
  int flight_size() const { return horizontal_size() + vertical_size(); }
  int power_size() const { return has_power() ? blocks_ : 0; }
  int power_offset() const { return flight_size(); }
  bool has_flight() const { return mode_ != ControlMode::Power; }
  bool has_power() const { return mode_ != ControlMode::Flight; }

  /// Lower and upper bound of output component i.
  double low(int i) const;
  double high(int i) const;
  /// Clamp every component into its range.
  void clip(std::vector<double>& out) const;

  /// Power mode always stays put. Power fractions of empty blocks are
  /// dropped before the budget rescale min(1, P / sum).
  UavAction decode(const std::vector<double>& out, const SystemState& state) const;

 private:
  ControlMode mode_;
  int blocks_;
  int horizontal_;
  std::vector<int> vertical_;
  ResourceLimits limits_;
};

}  // namespace uavnet
