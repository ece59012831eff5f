#include "uavnet/radio.hpp"

#include <cmath>
#include <stdexcept>

#include "uavnet/topology.hpp"

namespace uavnet {

void ChannelParams::validate() const {
  if (!(alpha2 > 0.0)) throw ConfigError("channel: alpha2 must be positive");
  if (!(beta1 > 0.0)) throw ConfigError("channel: beta1 must be positive");
  if (!(beta2 > 0.0 && beta2 <= 1.0)) throw ConfigError("channel: beta2 must lie in (0, 1]");
  if (!(noise_psd_w_per_hz > 0.0)) throw ConfigError("channel: noise density must be positive");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("channel: bandwidth must be positive");
}

double dbm_per_hz_to_watts_per_hz(double dbm_per_hz) { return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0); }

double LinkGeometry::distance_m() const { return std::hypot(horizontal_m, height_m); }

double elevation_deg(const LinkGeometry& geom) {
  if (!(geom.height_m > 0.0)) throw GeometryError("UAV height must be positive");
  if (geom.horizontal_m < 0.0) throw GeometryError("horizontal distance must be non-negative");
  if (geom.horizontal_m == 0.0) return 90.0;
  return 180.0 / M_PI * std::atan(geom.height_m / geom.horizontal_m);
}

double los_probability(const LinkGeometry& geom, const ChannelParams& p) {
  const double theta = elevation_deg(geom);
  return 1.0 / (1.0 + p.alpha1 * std::exp(-p.alpha2 * (theta - p.alpha1)));
}

double channel_gain(double distance_m, LinkState state, const ChannelParams& p) {
  if (!(distance_m > 0.0)) throw GeometryError("link distance must be positive");
  const double los = std::pow(distance_m, -p.beta1);
  return state == LinkState::LoS ? los : p.beta2 * los;
}

double sinr(double power_w, double gain, int channels, const ChannelParams& p) {
  if (channels < 1) throw std::invalid_argument("sinr needs at least one channel");
  if (power_w < 0.0) throw std::invalid_argument("transmit power must be non-negative");
  return power_w * gain / (p.bandwidth_hz * channels * p.noise_psd_w_per_hz);
}

double link_throughput(int channels, double sinr_value, const ChannelParams& p) {
  if (channels < 0) throw std::invalid_argument("channel count must be non-negative");
  if (channels == 0) return 0.0;
  return p.bandwidth_hz * channels * std::log2(1.0 + sinr_value);
}

double block_throughput(double power_w, int channels, double gain, const ChannelParams& p) {
  if (channels == 0) return 0.0;
  return link_throughput(channels, sinr(power_w, gain, channels, p), p);
}

std::vector<LinkState> sample_link_states(const std::vector<double>& los_probabilities, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<LinkState> out(los_probabilities.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = uniform(rng) < los_probabilities[i] ? LinkState::LoS : LinkState::NLoS;
  return out;
}

}  // namespace uavnet
