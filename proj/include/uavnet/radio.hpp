#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace uavnet {

/// Air-to-ground channel constants. The noise density is stored in W/Hz;
/// use dbm_per_hz_to_watts_per_hz for values quoted in dBm/Hz.
struct ChannelParams {
  double alpha1 = 9.6;
  double alpha2 = 0.28;
  double beta1 = 3.0;    // path-loss exponent
  double beta2 = 0.01;   // extra NLoS attenuation
  double noise_psd_w_per_hz = 1e-16;
  double bandwidth_hz = 1e5;  // per channel

  void validate() const;
};

double dbm_per_hz_to_watts_per_hz(double dbm_per_hz);

enum class LinkState : std::uint8_t { NLoS = 0, LoS = 1 };

struct LinkGeometry {
  double horizontal_m = 0.0;
  double height_m = 0.0;

  double distance_m() const;
};

/// Raised for non-physical geometry (z <= 0, D <= 0).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Elevation angle in degrees, 90 directly above the vehicle.
double elevation_deg(const LinkGeometry& geom);

/// Sigmoid in elevation angle; NLoS probability is the complement.
double los_probability(const LinkGeometry& geom, const ChannelParams& params);

double channel_gain(double distance_m, LinkState state, const ChannelParams& params);

/// Interference-free SNR over c channels of bandwidth b each.
double sinr(double power_w, double gain, int channels, const ChannelParams& params);

/// b * c * log2(1 + sinr); zero when no channels are allocated.
double link_throughput(int channels, double sinr_value, const ChannelParams& params);

/// Throughput of one block's link for the given allocation. Zero when the
/// block has no channels, so callers need not special-case c = 0.
double block_throughput(double power_w, int channels, double gain, const ChannelParams& params);

/// Independent LoS draws, one uniform per block consumed in block order.
std::vector<LinkState> sample_link_states(const std::vector<double>& los_probabilities, std::mt19937_64& rng);

}  // namespace uavnet
