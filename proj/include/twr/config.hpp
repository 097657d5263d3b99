#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "twr/channel_model.hpp"
#include "twr/design.hpp"

namespace twr {

enum class TemporalKind { ar1, white };

struct MacConfig {
  Index length = 6;
  double d_t1 = 1.5;
  double d_t2 = 1.8;
  double d_r = 1.3;  // receive-side spacing at the relay
  TemporalKind temporal = TemporalKind::ar1;
  double eta = 0.9;
  double interference = 1.0;
  SpatialDisturbanceKind spatial = SpatialDisturbanceKind::noise_plus_interference;
  double mu = 1.0;
  double nu = 1.0;
};

struct BcConfig {
  Index length = 3;
  double d_t = 1.9;
  double d_r1 = 1.95;
  double d_r2 = 0.3;
  TemporalKind temporal1 = TemporalKind::ar1;
  TemporalKind temporal2 = TemporalKind::ar1;
  double eta1 = 0.9;
  double eta2 = -0.9;
  double interference1 = 1.0;
  double interference2 = 1.0;
  SpatialDisturbanceKind spatial1 = SpatialDisturbanceKind::noise_plus_interference;
  SpatialDisturbanceKind spatial2 = SpatialDisturbanceKind::noise_plus_interference;
  double mu1 = 1.0, nu1 = 1.0;
  double mu2 = 1.0, nu2 = 1.0;
  bool uncorrelated_relay = false;  // Z_t = a I instead of the Bessel profile
};

struct ScenarioConfig {
  Index n1 = 3, n2 = 3, m = 3;
  double power = 3.0;      // P; tau1 + tau2 = 2P
  double tau_split = 0.5;  // tau1 = split * 2P
  double tau_r = -1.0;     // < 0 means 2P
  double tau1 = -1.0;      // explicit overrides; < 0 derives from power/split
  double tau2 = -1.0;
  MacConfig mac;
  BcConfig bc;
};

struct InitSpec {
  bool identity = true;
  int random_count = 0;  // > 0: pick the best of this many random starts
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  Phase phase = Phase::mac;
  std::vector<DesignMethod> methods;
  std::vector<double> snr_db;
  int trials = 1000;
  std::uint64_t seed = 1;
  InitSpec init;

  void validate() const;  // throws ConfigError
};

// Parameter values used throughout the experiments section.
ScenarioConfig default_scenario_config();

// SNR(dB) = 10 log10(P / mu_noise); the whole disturbance covariance is
// scaled through its temporal factor by mu_noise = P * 10^(-SNR/10).
TwrScenario build_scenario(const ScenarioConfig& cfg, double snr_db);

// Key/value text with [section] headers, '#' or ';' comments. Unknown
// keys are rejected with line diagnostics.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin = "<string>");

}  // namespace twr
