// Command line front end: scenario setup, DDPG training, scheme comparison
// sweeps and checkpoint evaluation, all reproducible from a master seed.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rissim/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Config file (sectioned key = value text)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Master seed override");
  cmd->add_option("--out", args.out_dir, "Output directory (default: run.out_dir from config)");
  cmd->add_flag("--paper-scale", args.paper_scale,
                "Start from the published full-scale parameters instead of desk-scale defaults");
}

rissim::ExperimentConfig resolve_config(const CommonArgs& args) {
  rissim::ExperimentConfig base =
      args.paper_scale ? rissim::default_paper_config() : rissim::desk_scale_config();
  rissim::ExperimentConfig cfg =
      args.config_path.empty() ? base : rissim::load_config_file(args.config_path, base);
  if (args.seed) cfg.run.master_seed = *args.seed;
  return cfg;
}

std::filesystem::path resolve_out(const CommonArgs& args, const rissim::ExperimentConfig& cfg) {
  return args.out_dir.empty() ? std::filesystem::path(cfg.run.out_dir)
                              : std::filesystem::path(args.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided multiuser MISO downlink: long-term-CSI DDPG design vs "
               "instantaneous-CSI baseline under pilot overhead"};
  app.require_subcommand(1);

  CommonArgs conv_args;
  std::string dump_dataset;
  auto* conv = app.add_subcommand("convergence", "Train the agent and log reward curves");
  add_common(conv, conv_args);
  conv->add_option("--dump-dataset", dump_dataset,
                   "Also write the offline channel dataset to this file (binary format)");

  CommonArgs sweep_args;
  std::vector<int> sweep_elements{4, 8, 16, 24, 32, 48};
  auto* sweep = app.add_subcommand("rate-sweep",
                                   "Min average user rate vs number of RIS elements");
  add_common(sweep, sweep_args);
  sweep->add_option("--elements", sweep_elements, "RIS element counts to sweep")
      ->delimiter(',');

  CommonArgs cx_args;
  std::vector<int> cx_elements{4, 8, 16, 24, 32, 48};
  auto* cx = app.add_subcommand("complexity",
                                "Solver invocation counts and wall-clock per scheme");
  add_common(cx, cx_args);
  cx->add_option("--elements", cx_elements, "RIS element counts to sweep")->delimiter(',');

  CommonArgs eval_args;
  std::string checkpoint;
  auto* eval = app.add_subcommand("eval-checkpoint",
                                  "Evaluate a trained actor checkpoint on its scenario");
  add_common(eval, eval_args);
  eval->add_option("--checkpoint", checkpoint, "Actor checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      const auto cfg = resolve_config(conv_args);
      const auto out = resolve_out(conv_args, cfg);
      std::optional<std::filesystem::path> dump;
      if (!dump_dataset.empty()) dump = dump_dataset;
      const auto artifacts = rissim::run_convergence(cfg, out, dump);
      std::printf("trained %d episodes; greedy config min-average rate %.6f bits/s/Hz\n",
                  cfg.agent.rl.episodes, artifacts.result.greedy_min_rate);
      std::printf("wrote %s\n", artifacts.convergence_csv.string().c_str());
      std::printf("wrote %s\n", artifacts.training_log_csv.string().c_str());
      std::printf("wrote %s\n", artifacts.actor_checkpoint.string().c_str());
    } else if (sweep->parsed()) {
      const auto cfg = resolve_config(sweep_args);
      const auto out = resolve_out(sweep_args, cfg);
      const auto rows = rissim::run_rate_vs_elements(cfg, sweep_elements, out);
      std::printf("%-6s %-16s %-18s %s\n", "n", "maur_longterm", "maur_instantaneous",
                  "pilot_factor");
      for (const auto& row : rows) {
        std::printf("%-6d %-16.6f %-18.6f %.6f\n", row.n, row.maur_longterm,
                    row.maur_instantaneous, row.pilot_factor);
      }
      std::printf("wrote %s\n", (out / "rate_vs_elements.csv").string().c_str());
    } else if (cx->parsed()) {
      const auto cfg = resolve_config(cx_args);
      const auto out = resolve_out(cx_args, cfg);
      const auto rows = rissim::run_complexity(cfg, cx_elements, out);
      std::printf("%-6s %-10s %-10s %-14s %s\n", "n", "calls_lt", "calls_ins", "wall_lt_s",
                  "wall_ins_s");
      for (const auto& row : rows) {
        std::printf("%-6d %-10ld %-10ld %-14.3f %.3f\n", row.n, row.solver_calls_longterm,
                    row.solver_calls_instantaneous, row.wallclock_longterm_s,
                    row.wallclock_instantaneous_s);
      }
      std::printf("wrote %s\n", (out / "complexity.csv").string().c_str());
    } else if (eval->parsed()) {
      const auto cfg = resolve_config(eval_args);
      const auto out = resolve_out(eval_args, cfg);
      const auto result = rissim::run_eval_checkpoint(cfg, checkpoint, out);
      std::printf("greedy min-average rate on extraction set: %.6f bits/s/Hz\n",
                  result.greedy_min_rate);
      std::printf("ergodic min rate (%d fresh draws):         %.6f bits/s/Hz\n", cfg.run.n_mc,
                  result.ergodic_min_rate);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
