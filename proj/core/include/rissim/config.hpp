#pragma once

#include <filesystem>
#include <string>

#include "rissim/baselines.hpp"
#include "rissim/channel.hpp"
#include "rissim/ddpg.hpp"

namespace rissim {

struct ScenarioConfig {
  Vec3 bs_position{0.0, 0.0, 30.0};
  Vec3 ris_position{100.0, 20.0, 10.0};
  Vec3 user_disk_center{150.0, 0.0, 1.5};
  double user_disk_radius = 20.0;
  int m = 8;        // BS antennas
  int n = 80;       // RIS elements
  int k = 10;       // users
  int i_paths = 2;  // BS-RIS paths
  double p_t = 1.0; // max transmit power [W]
  RicianFactors rician;  // delta, epsilon, eta
  int t_ccti = 150;      // offline CCTIs (T)
  int tau_c = 150;       // time slots per CCTI
};

struct AgentBlock {
  AgentConfig rl;
  NetworkConfig net;
  double smooth_weight = 0.9;
};

struct RunBlock {
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";
  int n_mc = 1000;  // Monte-Carlo draws for ergodic evaluation
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  PathLossParams pathloss;
  AgentBlock agent;
  LocalSearchConfig baseline;
  RunBlock run;
};

/// The simulation parameters of the studied setup: geometry (0,0,30) /
/// (100,20,10) / disk at (150,0,1.5) radius 20 m, PL0 = -30 dB at 1 m,
/// M = 8, Rician factors (2.2, 3.75, 2.2), T = 150, tau_c = 150, noise
/// -174 dBm/Hz over 1 MHz, N = 80, K = 10, I = 2, 1000 episodes.
ExperimentConfig default_paper_config();

/// Reduced problem that trains in minutes: M = 4, N = 16, K = 4, 300
/// episodes, 64x64 networks. Geometry and fading parameters as above.
ExperimentConfig desk_scale_config();

/// Throws std::invalid_argument describing the first violated constraint.
void validate_config(const ExperimentConfig& cfg);

/// Parses the plain-text sectioned key-value format, applying values on top
/// of `base`. Unknown sections or keys are rejected.
ExperimentConfig parse_config(const std::string& text,
                              const ExperimentConfig& base = desk_scale_config());

ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  const ExperimentConfig& base = desk_scale_config());

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace rissim
