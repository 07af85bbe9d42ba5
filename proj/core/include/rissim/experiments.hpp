#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rissim/config.hpp"

namespace rissim {

/// Everything derived from a config that the experiments need: geometry and
/// long-term CSI under the scenario seed, noise power, and the offline
/// dataset under the training seed.
struct ScenarioBundle {
  ScenarioGeometry geometry;
  LongTermCsi csi;
  double sigma2 = 0.0;
  std::vector<ChannelRealization> dataset;
  std::uint64_t train_seed = 0;
  std::uint64_t compare_seed = 0;
};

/// Builds the scenario for the config, optionally overriding the RIS element
/// count (used by sweeps; geometry, user drop and angles stay fixed because
/// they come from the scenario seed alone).
ScenarioBundle build_scenario(const ExperimentConfig& cfg,
                              std::optional<int> n_override = std::nullopt);

struct ConvergenceArtifacts {
  TrainResult result;
  std::filesystem::path convergence_csv;
  std::filesystem::path training_log_csv;
  std::filesystem::path actor_checkpoint;
  std::filesystem::path manifest;
};

/// Trains the agent and writes convergence.csv (per episode), the per-step
/// training_log.csv, the actor checkpoint and a run manifest into out_dir.
/// Optionally dumps the offline dataset in the binary format.
ConvergenceArtifacts run_convergence(
    const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
    const std::optional<std::filesystem::path>& dump_dataset = std::nullopt);

struct RateSweepRow {
  int n = 0;
  double maur_longterm = 0.0;
  double maur_instantaneous = 0.0;
  double pilot_factor = 0.0;
};

/// For each N: fresh scenario (same master seed), long-term agent training,
/// scheme comparison. Writes rate_vs_elements.csv and a manifest.
std::vector<RateSweepRow> run_rate_vs_elements(const ExperimentConfig& cfg,
                                               const std::vector<int>& n_list,
                                               const std::filesystem::path& out_dir);

struct ComplexityRow {
  int n = 0;
  long solver_calls_longterm = 1;
  long solver_calls_instantaneous = 0;
  double wallclock_longterm_s = 0.0;      // one DDPG training run
  double wallclock_instantaneous_s = 0.0; // T per-CCTI solves
};

/// Solver-invocation counts and wall-clock per scheme for each N. Writes
/// complexity.csv and a manifest.
std::vector<ComplexityRow> run_complexity(const ExperimentConfig& cfg,
                                          const std::vector<int>& n_list,
                                          const std::filesystem::path& out_dir);

struct CheckpointEvaluation {
  TxConfig tx;
  double greedy_min_rate = 0.0;   // on the extraction evaluation set
  double ergodic_min_rate = 0.0;  // fresh-draw estimate with run.n_mc draws
};

/// Loads an actor checkpoint, re-derives the scenario and dataset from the
/// config, extracts the greedy configuration and reports its ergodic
/// minimum rate. Writes eval.csv into out_dir.
CheckpointEvaluation run_eval_checkpoint(const ExperimentConfig& cfg,
                                         const std::filesystem::path& checkpoint,
                                         const std::filesystem::path& out_dir);

/// Config echo, seed derivations and version, for reproducibility.
void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const std::filesystem::path& path);

}  // namespace rissim
