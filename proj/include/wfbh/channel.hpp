#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace wfbh {

using Rng = std::mt19937_64;

// One orthogonal narrowband uplink from the UE to an access point.
// The effective noise n/g is fixed at construction.
class UplinkChannel {
 public:
  UplinkChannel(double bandwidth_hz, double gain, double noise_w);

  // Channel described directly by its effective noise (gain = 1).
  static UplinkChannel from_effective_noise(double bandwidth_hz, double effective_noise_w);

  double bandwidth_hz() const noexcept { return bandwidth_hz_; }
  double gain() const noexcept { return gain_; }
  double noise_w() const noexcept { return noise_w_; }
  double effective_noise_w() const noexcept { return effective_noise_w_; }

  // Noise power spectral density referred through the gain, E/W in W/Hz.
  double noise_level() const noexcept { return effective_noise_w_ / bandwidth_hz_; }

  double snr(double power_w) const;
  double rate_bps(double power_w) const;

  friend bool operator==(const UplinkChannel&, const UplinkChannel&) = default;

 private:
  double bandwidth_hz_;
  double gain_;
  double noise_w_;
  double effective_noise_w_;
};

double effective_noise(double gain, double noise_w);

// W log2(1 + P/E).
double uplink_rate(double power_w, double effective_noise_w, double bandwidth_hz);

// Per-channel Shannon rates for a power vector.
std::vector<double> uplink_rates(std::span<const UplinkChannel> channels,
                                 std::span<const double> powers_w);

double total_bandwidth(std::span<const UplinkChannel> channels);
std::vector<double> bandwidths(std::span<const UplinkChannel> channels);

// Randomized single-UE geometry: APs dropped uniformly over a disk
// centred on the UE, distance-based path loss with lognormal shadowing.
struct ScenarioConfig {
  int num_aps = 5;
  double cluster_radius_m = 100.0;
  double path_loss_exponent = 4.0;
  // dB-domain standard deviation of the shadowing; sqrt(5) reads the
  // "5 dB variance" figure as a variance in dB^2.
  double shadowing_stddev_db = 2.2360679774997896;
  double noise_psd_dbw_per_hz = -190.0;
  std::vector<double> bandwidth_choices_hz = {1e6, 2e6, 5e6};
  double p_max_w = 1.0;
  std::uint64_t rng_seed = 1;
  // Distances are clamped from below to keep the path gain finite.
  double min_distance_m = 1.0;

  void validate() const;
};

double path_gain(double shadowing_gain, double distance_m, double path_loss_exponent);
double noise_power(double noise_psd_dbw_per_hz, double bandwidth_hz);

std::vector<UplinkChannel> generate_scenario(const ScenarioConfig& config, Rng& rng);

// Seeds a fresh generator from `config.rng_seed`.
std::vector<UplinkChannel> generate_scenario(const ScenarioConfig& config);

}  // namespace wfbh
