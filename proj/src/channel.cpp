#include "wfbh/channel.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "wfbh/errors.hpp"

namespace wfbh {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || std::isnan(value)) {
    throw InvalidParameter(std::string(name) + " must be positive, got " + std::to_string(value));
  }
}

}  // namespace

UplinkChannel::UplinkChannel(double bandwidth_hz, double gain, double noise_w)
    : bandwidth_hz_(bandwidth_hz), gain_(gain), noise_w_(noise_w), effective_noise_w_(0.0) {
  require_positive(bandwidth_hz, "bandwidth_hz");
  require_positive(gain, "gain");
  require_positive(noise_w, "noise_w");
  effective_noise_w_ = noise_w / gain;
  require_positive(effective_noise_w_, "effective_noise_w");
}

UplinkChannel UplinkChannel::from_effective_noise(double bandwidth_hz, double effective_noise_w) {
  return UplinkChannel(bandwidth_hz, 1.0, effective_noise_w);
}

double UplinkChannel::snr(double power_w) const {
  if (power_w < 0.0) throw InvalidParameter("power_w must be non-negative");
  return power_w / effective_noise_w_;
}

double UplinkChannel::rate_bps(double power_w) const {
  return uplink_rate(power_w, effective_noise_w_, bandwidth_hz_);
}

double effective_noise(double gain, double noise_w) {
  require_positive(gain, "gain");
  require_positive(noise_w, "noise_w");
  return noise_w / gain;
}

double uplink_rate(double power_w, double effective_noise_w, double bandwidth_hz) {
  if (!(power_w >= 0.0)) throw InvalidParameter("power_w must be non-negative");
  require_positive(effective_noise_w, "effective_noise_w");
  require_positive(bandwidth_hz, "bandwidth_hz");
  return bandwidth_hz * std::log2(1.0 + power_w / effective_noise_w);
}

std::vector<double> uplink_rates(std::span<const UplinkChannel> channels,
                                 std::span<const double> powers_w) {
  if (channels.size() != powers_w.size()) {
    throw InvalidParameter("power vector length does not match channel count");
  }
  std::vector<double> rates(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    rates[k] = channels[k].rate_bps(powers_w[k]);
  }
  return rates;
}

double total_bandwidth(std::span<const UplinkChannel> channels) {
  return std::accumulate(channels.begin(), channels.end(), 0.0,
                         [](double acc, const UplinkChannel& c) { return acc + c.bandwidth_hz(); });
}

std::vector<double> bandwidths(std::span<const UplinkChannel> channels) {
  std::vector<double> out;
  out.reserve(channels.size());
  for (const auto& c : channels) out.push_back(c.bandwidth_hz());
  return out;
}

void ScenarioConfig::validate() const {
  if (num_aps < 1) throw InvalidParameter("num_aps must be at least 1");
  require_positive(cluster_radius_m, "cluster_radius_m");
  require_positive(path_loss_exponent, "path_loss_exponent");
  if (!(shadowing_stddev_db >= 0.0)) throw InvalidParameter("shadowing_stddev_db must be >= 0");
  if (!std::isfinite(noise_psd_dbw_per_hz)) throw InvalidParameter("noise_psd_dbw_per_hz must be finite");
  if (bandwidth_choices_hz.empty()) throw InvalidParameter("bandwidth_choices_hz must not be empty");
  for (double w : bandwidth_choices_hz) require_positive(w, "bandwidth choice");
  require_positive(p_max_w, "p_max_w");
  require_positive(min_distance_m, "min_distance_m");
}

double path_gain(double shadowing_gain, double distance_m, double path_loss_exponent) {
  require_positive(shadowing_gain, "shadowing_gain");
  require_positive(distance_m, "distance_m");
  return shadowing_gain * std::pow(distance_m, -path_loss_exponent);
}

double noise_power(double noise_psd_dbw_per_hz, double bandwidth_hz) {
  require_positive(bandwidth_hz, "bandwidth_hz");
  return std::pow(10.0, noise_psd_dbw_per_hz / 10.0) * bandwidth_hz;
}

std::vector<UplinkChannel> generate_scenario(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> shadow_db(0.0, config.shadowing_stddev_db);
  std::uniform_int_distribution<std::size_t> pick(0, config.bandwidth_choices_hz.size() - 1);

  std::vector<UplinkChannel> channels;
  channels.reserve(static_cast<std::size_t>(config.num_aps));
  for (int k = 0; k < config.num_aps; ++k) {
    // Area-uniform drop: radius ~ D sqrt(u), u in (0, 1].
    const double u = 1.0 - unit(rng);
    const double distance = std::max(config.min_distance_m, config.cluster_radius_m * std::sqrt(u));
    const double kappa = std::pow(10.0, shadow_db(rng) / 10.0);
    const double bandwidth = config.bandwidth_choices_hz[pick(rng)];
    channels.emplace_back(bandwidth, path_gain(kappa, distance, config.path_loss_exponent),
                          noise_power(config.noise_psd_dbw_per_hz, bandwidth));
  }
  return channels;
}

std::vector<UplinkChannel> generate_scenario(const ScenarioConfig& config) {
  Rng rng(config.rng_seed);
  return generate_scenario(config, rng);
}

}  // namespace wfbh
