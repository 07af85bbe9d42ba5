#include "rissim/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace rissim {

namespace {

// Seed streams hanging off the master seed. The scenario seed fixes geometry
// and angles; the training seed fixes NLoS draws, network init, exploration
// noise and replay sampling, so one physical scenario can be retrained.
constexpr std::uint64_t kScenarioUserStream = 101;
constexpr std::uint64_t kScenarioAngleStream = 102;
constexpr std::uint64_t kTrainStream = 103;
constexpr std::uint64_t kCompareStream = 104;
constexpr std::uint64_t kDatasetStream = 105;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) {
    os_.open(path);
    if (!os_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os_ << header << "\n";
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((os_ << (first ? "" : ",") << format(fields), first = false), ...);
    os_ << "\n";
  }

  void close() { os_.close(); }

 private:
  static std::string format(double v) { return fmt_double(v); }
  static std::string format(int v) { return std::to_string(v); }
  static std::string format(long v) { return std::to_string(v); }
  std::ofstream os_;
};

AgentConfig agent_config_for(const ExperimentConfig& cfg) {
  return cfg.agent.rl;
}

}  // namespace

ScenarioBundle build_scenario(const ExperimentConfig& cfg, std::optional<int> n_override) {
  validate_config(cfg);
  const auto& sc = cfg.scenario;
  const int n = n_override.value_or(sc.n);
  if (n < 1) throw std::invalid_argument("build_scenario: N must be >= 1");

  const std::uint64_t master = cfg.run.master_seed;
  ScenarioBundle bundle;
  Rng user_rng(derive_seed(master, kScenarioUserStream));
  bundle.geometry = make_geometry(sc.bs_position, sc.ris_position, sc.user_disk_center,
                                  sc.user_disk_radius, sc.k, user_rng);
  bundle.csi = make_long_term_csi(bundle.geometry, cfg.pathloss, sc.m, n, sc.i_paths,
                                  sc.rician, derive_seed(master, kScenarioAngleStream));
  bundle.sigma2 = noise_power(cfg.pathloss);
  bundle.train_seed = derive_seed(master, kTrainStream);
  bundle.compare_seed = derive_seed(master, kCompareStream);
  bundle.dataset = generate_offline_dataset(
      bundle.csi, sc.t_ccti,
      derive_seed(bundle.train_seed, derive_seed(kDatasetStream, static_cast<std::uint64_t>(n))));
  return bundle;
}

ConvergenceArtifacts run_convergence(const ExperimentConfig& cfg,
                                     const std::filesystem::path& out_dir,
                                     const std::optional<std::filesystem::path>& dump_dataset) {
  std::filesystem::create_directories(out_dir);
  ScenarioBundle bundle = build_scenario(cfg);
  if (dump_dataset) save_dataset(*dump_dataset, bundle.dataset);

  TrainOptions options;
  options.smooth_weight = cfg.agent.smooth_weight;
  options.eval_n_mc = cfg.run.n_mc;
  TrainResult result = train(bundle.csi, bundle.dataset, bundle.sigma2, cfg.scenario.p_t,
                             agent_config_for(cfg), cfg.agent.net, bundle.train_seed, options);

  ConvergenceArtifacts artifacts;
  artifacts.convergence_csv = out_dir / "convergence.csv";
  artifacts.training_log_csv = out_dir / "training_log.csv";
  artifacts.actor_checkpoint = out_dir / "actor.ckpt";
  artifacts.manifest = out_dir / "run_manifest.txt";

  {
    CsvWriter csv(artifacts.convergence_csv, "episode,reward,evaluation_reward,smoothed_reward");
    for (const auto& row : result.episode_log) {
      csv.row(row.episode, row.reward, row.evaluation_reward, row.smoothed_reward);
    }
  }
  {
    CsvWriter csv(artifacts.training_log_csv,
                  "episode,step,reward,evaluation_reward,smoothed_reward,critic_loss,noise_scale");
    for (const auto& row : result.step_log) {
      csv.row(row.episode, row.step, row.reward, row.evaluation_reward, row.smoothed_reward,
              row.critic_loss, row.noise_scale);
    }
  }
  save_checkpoint(artifacts.actor_checkpoint, result.actor);
  save_checkpoint(out_dir / "critic.ckpt", result.critic);
  write_manifest(cfg, "convergence", artifacts.manifest);

  artifacts.result = std::move(result);
  return artifacts;
}

std::vector<RateSweepRow> run_rate_vs_elements(const ExperimentConfig& cfg,
                                               const std::vector<int>& n_list,
                                               const std::filesystem::path& out_dir) {
  if (n_list.empty()) throw std::invalid_argument("run_rate_vs_elements: empty N list");
  std::filesystem::create_directories(out_dir);

  std::vector<RateSweepRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    ScenarioBundle bundle = build_scenario(cfg, n);
    TrainOptions options;
    options.smooth_weight = cfg.agent.smooth_weight;
    options.eval_n_mc = cfg.run.n_mc;
    const std::uint64_t train_seed = derive_seed(bundle.train_seed, static_cast<std::uint64_t>(n));
    TrainResult trained = train(bundle.csi, bundle.dataset, bundle.sigma2, cfg.scenario.p_t,
                                agent_config_for(cfg), cfg.agent.net, train_seed, options);

    OverheadParams ov{cfg.scenario.tau_c, cfg.scenario.k, n};
    const SchemeComparison cmp =
        compare_schemes(bundle.dataset, bundle.sigma2, trained.greedy_tx, cfg.baseline, ov,
                        derive_seed(bundle.compare_seed, static_cast<std::uint64_t>(n)));
    if (cmp.factor_clamped) {
      std::fprintf(stderr,
                   "note: pilot overhead factor clamped to 0 at N=%d (2K+N-1 >= tau_c)\n", n);
    }
    rows.push_back(RateSweepRow{n, cmp.maur_longterm, cmp.maur_instantaneous, cmp.pilot_factor});
  }

  CsvWriter csv(out_dir / "rate_vs_elements.csv",
                "n,maur_longterm,maur_instantaneous,pilot_factor");
  for (const auto& row : rows) {
    csv.row(row.n, row.maur_longterm, row.maur_instantaneous, row.pilot_factor);
  }
  write_manifest(cfg, "rate-sweep", out_dir / "run_manifest.txt");
  return rows;
}

std::vector<ComplexityRow> run_complexity(const ExperimentConfig& cfg,
                                          const std::vector<int>& n_list,
                                          const std::filesystem::path& out_dir) {
  if (n_list.empty()) throw std::invalid_argument("run_complexity: empty N list");
  std::filesystem::create_directories(out_dir);

  std::vector<ComplexityRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    ScenarioBundle bundle = build_scenario(cfg, n);
    TrainOptions options;
    options.smooth_weight = cfg.agent.smooth_weight;
    options.eval_n_mc = cfg.run.n_mc;
    const std::uint64_t train_seed = derive_seed(bundle.train_seed, static_cast<std::uint64_t>(n));

    const auto train_start = std::chrono::steady_clock::now();
    TrainResult trained = train(bundle.csi, bundle.dataset, bundle.sigma2, cfg.scenario.p_t,
                                agent_config_for(cfg), cfg.agent.net, train_seed, options);
    const double wall_longterm =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - train_start).count();

    OverheadParams ov{cfg.scenario.tau_c, cfg.scenario.k, n};
    const SchemeComparison cmp =
        compare_schemes(bundle.dataset, bundle.sigma2, trained.greedy_tx, cfg.baseline, ov,
                        derive_seed(bundle.compare_seed, static_cast<std::uint64_t>(n)));
    rows.push_back(ComplexityRow{n, cmp.solver_calls_longterm, cmp.solver_calls_instantaneous,
                                 wall_longterm, cmp.wall_instantaneous_s});
  }

  CsvWriter csv(out_dir / "complexity.csv",
                "n,solver_calls_longterm,solver_calls_instantaneous,"
                "wallclock_longterm_s,wallclock_instantaneous_s");
  for (const auto& row : rows) {
    csv.row(row.n, row.solver_calls_longterm, row.solver_calls_instantaneous,
            row.wallclock_longterm_s, row.wallclock_instantaneous_s);
  }
  write_manifest(cfg, "complexity", out_dir / "run_manifest.txt");
  return rows;
}

CheckpointEvaluation run_eval_checkpoint(const ExperimentConfig& cfg,
                                         const std::filesystem::path& checkpoint,
                                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ScenarioBundle bundle = build_scenario(cfg);
  const Mlp actor = load_checkpoint(checkpoint);
  const int expected_state = state_dim(bundle.csi.m, bundle.csi.n, bundle.csi.k);
  const int expected_action = action_dim(bundle.csi.m, bundle.csi.n, bundle.csi.k);
  if (actor.input_dim() != expected_state || actor.output_dim() != expected_action) {
    throw std::invalid_argument("run_eval_checkpoint: checkpoint does not match scenario dims");
  }

  CheckpointEvaluation eval;
  eval.tx = greedy_extract(actor, bundle.csi, bundle.dataset, bundle.sigma2, cfg.scenario.p_t,
                           bundle.train_seed, cfg.run.n_mc, &eval.greedy_min_rate);
  eval.ergodic_min_rate = ergodic_min_rate(bundle.csi, eval.tx, bundle.sigma2, cfg.run.n_mc,
                                           derive_seed(bundle.train_seed, 42));

  CsvWriter csv(out_dir / "eval.csv", "greedy_min_rate,ergodic_min_rate");
  csv.row(eval.greedy_min_rate, eval.ergodic_min_rate);
  write_manifest(cfg, "eval-checkpoint", out_dir / "run_manifest.txt");
  return eval;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open manifest " + path.string());
  os << "rissim 0.1.0\n";
  os << "command: " << command << "\n";
  os << "master_seed: " << cfg.run.master_seed << "\n";
  os << "scenario_seed.users: " << derive_seed(cfg.run.master_seed, kScenarioUserStream) << "\n";
  os << "scenario_seed.angles: " << derive_seed(cfg.run.master_seed, kScenarioAngleStream) << "\n";
  os << "train_seed: " << derive_seed(cfg.run.master_seed, kTrainStream) << "\n";
  os << "compare_seed: " << derive_seed(cfg.run.master_seed, kCompareStream) << "\n";
  os << "noise_power_w: " << fmt_double(noise_power(cfg.pathloss)) << "\n";
  os << "\n# config echo\n";
  os << serialize_config(cfg);
}

}  // namespace rissim
