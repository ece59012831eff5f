#include <doctest.h>

#include <random>

#include "uavnet/radio.hpp"

using namespace uavnet;

// Reference numbers below were computed once, independently of this code,
// with double-precision Python and frozen here.

TEST_CASE("LoS probability straight above the vehicle is essentially one") {
  ChannelParams p;
  CHECK(los_probability({0.0, 150.0}, p) == doctest::Approx(0.9999999983951522).epsilon(1e-12));
}

TEST_CASE("LoS probability at low elevation") {
  ChannelParams p;
  CHECK(los_probability({30.0, 10.0}, p) == doctest::Approx(0.5528079654914805).epsilon(1e-12));
  CHECK(los_probability({3.0, 150.0}, p) == doctest::Approx(0.9999999977881207).epsilon(1e-12));
}

TEST_CASE("LoS probability grows with elevation") {
  ChannelParams p;
  double prev = 0.0;
  for (double z = 10.0; z <= 200.0; z += 5.0) {
    const double q = los_probability({12.0, z}, p);
    CHECK(q > prev);
    CHECK(q < 1.0);
    prev = q;
  }
}

TEST_CASE("elevation angle") {
  CHECK(elevation_deg({0.0, 10.0}) == 90.0);
  CHECK(elevation_deg({10.0, 10.0}) == doctest::Approx(45.0));
}

TEST_CASE("non-physical geometry is rejected") {
  ChannelParams p;
  CHECK_THROWS_AS(elevation_deg({5.0, 0.0}), GeometryError);
  CHECK_THROWS_AS(elevation_deg({-1.0, 5.0}), GeometryError);
  CHECK_THROWS_AS(channel_gain(0.0, LinkState::LoS, p), GeometryError);
}

TEST_CASE("channel gain at 150 m") {
  ChannelParams p;
  CHECK(channel_gain(150.0, LinkState::LoS, p) == doctest::Approx(2.962962962962963e-07).epsilon(1e-12));
  CHECK(channel_gain(150.0, LinkState::NLoS, p) == doctest::Approx(2.962962962962963e-09).epsilon(1e-12));
}

TEST_CASE("SNR and throughput for 3 W over 5 channels at 150 m") {
  ChannelParams p;
  const double g = channel_gain(150.0, LinkState::LoS, p);
  const double s = sinr(3.0, g, 5, p);
  CHECK(s == doctest::Approx(17777.777777777777).epsilon(1e-12));
  CHECK(link_throughput(5, s, p) == doctest::Approx(7058934.263710442).epsilon(1e-12));
  CHECK(block_throughput(3.0, 5, g, p) == doctest::Approx(7058934.263710442).epsilon(1e-12));
}

TEST_CASE("zero channels give zero throughput") {
  ChannelParams p;
  CHECK(block_throughput(3.0, 0, 1e-7, p) == 0.0);
  CHECK(link_throughput(0, 100.0, p) == 0.0);
  CHECK_THROWS(sinr(1.0, 1e-7, 0, p));
}

TEST_CASE("throughput is monotone in power and channels") {
  ChannelParams p;
  const double g = channel_gain(150.0, LinkState::LoS, p);
  for (int c = 1; c <= 5; ++c)
    for (double w = 0.5; w <= 3.0; w += 0.5) {
      CHECK(block_throughput(w + 0.5, c, g, p) > block_throughput(w, c, g, p));
      CHECK(block_throughput(w, c + 1, g, p) > block_throughput(w, c, g, p));
    }
}

TEST_CASE("dBm/Hz conversion") {
  CHECK(dbm_per_hz_to_watts_per_hz(-130.0) == doctest::Approx(1e-16).epsilon(1e-12));
  CHECK(dbm_per_hz_to_watts_per_hz(30.0) == doctest::Approx(1.0));
}

TEST_CASE("channel parameters are validated") {
  ChannelParams p;
  p.validate();
  p.bandwidth_hz = 0.0;
  CHECK_THROWS(p.validate());
}

TEST_CASE("link sampling frequencies follow the probabilities") {
  std::mt19937_64 rng(3);
  const std::vector<double> probs{0.0, 0.25, 1.0};
  std::vector<int> los(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_link_states(probs, rng);
    for (int b = 0; b < 3; ++b) los[b] += s[b] == LinkState::LoS;
  }
  CHECK(los[0] == 0);
  CHECK(los[2] == n);
  CHECK(std::abs(los[1] / double(n) - 0.25) < 0.01);
}
