#include "wfbh/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "wfbh/errors.hpp"

namespace wfbh {
namespace {

TEST(EffectiveNoise, Quotient) {
  EXPECT_DOUBLE_EQ(effective_noise(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(effective_noise(1e-4, 1e-13), 1e-9);
  EXPECT_DOUBLE_EQ(effective_noise(2.0, 3.0), 1.5);
}

TEST(EffectiveNoise, RejectsNonPositive) {
  EXPECT_THROW(effective_noise(0.0, 1.0), InvalidParameter);
  EXPECT_THROW(effective_noise(1.0, -1.0), InvalidParameter);
  EXPECT_THROW(UplinkChannel(1e6, 0.0, 1.0), InvalidParameter);
  EXPECT_THROW(UplinkChannel(0.0, 1.0, 1.0), InvalidParameter);
}

TEST(UplinkRate, Examples) {
  EXPECT_DOUBLE_EQ(uplink_rate(0.0, 0.1, 1e6), 0.0);
  EXPECT_DOUBLE_EQ(uplink_rate(0.1, 0.1, 1e6), 1e6);
  EXPECT_DOUBLE_EQ(uplink_rate(0.15, 0.05, 2e6), 4e6);
  EXPECT_THROW(uplink_rate(-1e-3, 0.1, 1e6), InvalidParameter);
}

TEST(UplinkRate, StrictlyIncreasingAndConcave) {
  const double e = 0.05, w = 2e6, h = 1e-3;
  double prev = uplink_rate(0.0, e, w);
  for (int i = 1; i < 1000; ++i) {
    const double p = i * h;
    const double r = uplink_rate(p, e, w);
    EXPECT_GT(r, prev);
    const double second = uplink_rate(p + h, e, w) - 2.0 * r + uplink_rate(p - h, e, w);
    EXPECT_LE(second, 1e-6) << "p=" << p;
    prev = r;
  }
}

TEST(ChannelModel, PathGainAndNoise) {
  EXPECT_DOUBLE_EQ(path_gain(1.0, 1.0, 4.0), 1.0);
  EXPECT_DOUBLE_EQ(path_gain(1.0, 10.0, 4.0), 1e-4);
  EXPECT_NEAR(noise_power(-190.0, 1e6), 1e-13, 1e-27);
}

TEST(GenerateScenario, SameSeedSameChannels) {
  ScenarioConfig config;
  config.rng_seed = 42;
  const auto a = generate_scenario(config);
  const auto b = generate_scenario(config);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a, b);
  config.rng_seed = 43;
  EXPECT_NE(a, generate_scenario(config));
}

TEST(GenerateScenario, ChannelsRespectModel) {
  ScenarioConfig config;
  config.num_aps = 200;
  config.cluster_radius_m = 50.0;
  const auto channels = generate_scenario(config);
  for (const auto& c : channels) {
    EXPECT_EQ(c.effective_noise_w(), effective_noise(c.gain(), c.noise_w()));
    EXPECT_TRUE(c.bandwidth_hz() == 1e6 || c.bandwidth_hz() == 2e6 || c.bandwidth_hz() == 5e6);
    EXPECT_NEAR(c.noise_w(), 1e-19 * c.bandwidth_hz(), 1e-30);
    EXPECT_GT(c.gain(), 0.0);
  }
}

TEST(GenerateScenario, ShadowingStatistics) {
  // Without shadowing the gain pins the distance, which must stay in [1, D]
  // with E[d^2] = D^2 / 2 for an area-uniform drop.
  ScenarioConfig config;
  config.num_aps = 20000;
  config.cluster_radius_m = 100.0;
  config.shadowing_stddev_db = 0.0;
  double mean_d2 = 0.0;
  for (const auto& c : generate_scenario(config)) {
    const double d = std::pow(c.gain(), -1.0 / config.path_loss_exponent);
    EXPECT_GE(d, 1.0 - 1e-9);
    EXPECT_LE(d, 100.0 + 1e-9);
    mean_d2 += d * d / config.num_aps;
  }
  EXPECT_NEAR(mean_d2, 5000.0, 100.0);
}

TEST(GenerateScenario, RejectsBadConfig) {
  ScenarioConfig config;
  config.num_aps = 0;
  EXPECT_THROW(generate_scenario(config), InvalidParameter);
  config = {};
  config.bandwidth_choices_hz = {};
  EXPECT_THROW(generate_scenario(config), InvalidParameter);
  config = {};
  config.cluster_radius_m = -1.0;
  EXPECT_THROW(generate_scenario(config), InvalidParameter);
}

}  // namespace
}  // namespace wfbh
