#pragma once

#include <functional>
#include <vector>

#include "rissim/channel.hpp"
#include "rissim/common.hpp"
#include "rissim/mlp.hpp"
#include "rissim/rate.hpp"
#include "rissim/rng.hpp"

namespace rissim {

struct AgentConfig {
  double gamma = 0.99;              // discount
  std::size_t replay_capacity = 100000;
  int batch_size = 64;              // V
  double eta = 0.005;               // soft-update rate
  double noise_scale = 0.1;         // initial exploration noise std
  double noise_decay = 0.9995;      // multiplicative decay per environment step
  int steps_per_episode = 0;        // 0 = one pass over the offline dataset
  int learning_start = 1000;        // stored experiences before updates begin
  int episodes = 300;
};

struct NetworkConfig {
  std::vector<int> actor_hidden{256, 256};
  std::vector<int> critic_hidden{256, 256};
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
};

/// Action layout: 2MK raw re/im precoder entries followed by N phase
/// increments, all in [-1, 1].
int action_dim(int m, int n, int k);

/// State layout: re/im of W (column-major), re/im of phi, re/im of G
/// (column-major), g[1..K], h[1..K].
int state_dim(int m, int n, int k);

Vector encode_state(const TxConfig& tx, const ChannelRealization& real);

struct DecodedState {
  CMatrix W;
  CVector phase;
  CMatrix G;
  std::vector<CVector> g;
  std::vector<CVector> h;
};

DecodedState decode_state(const Vector& state, int m, int n, int k);

/// Applies one action: rebuild W from the first 2MK entries and normalize to
/// Frobenius norm sqrt(P_t); advance each phase angle by a_i * pi, wrapped to
/// [0, 2*pi). A raw precoder with near-zero norm falls back to the previous
/// W instead of dividing by zero.
TxConfig apply_action(const TxConfig& tx, const Vector& action);

/// Full (non-net) per-user rates used for the training reward.
Vector per_user_rates(const ChannelRealization& real, const TxConfig& tx,
                      double sigma2);

/// min_k R_k under one offline realization.
double reward(const ChannelRealization& real, const TxConfig& tx, double sigma2);

/// Episode-start configuration: phases i.i.d. uniform on [0, 2*pi), W the
/// power-normalized all-equal matrix.
TxConfig initial_tx_config(int m, int n, int k, double p_t, Rng& rng);

struct Experience {
  Vector s;
  Vector a;
  double r = 0.0;
  Vector s_next;
};

/// Fixed-capacity FIFO store; element(0) is the oldest retained experience.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const { return full_ ? storage_.size() : cursor_; }
  std::size_t capacity() const { return storage_.size(); }
  const Experience& element(std::size_t i) const;
  std::vector<std::size_t> sample_indices(int count, Rng& rng) const;

 private:
  std::vector<Experience> storage_;
  std::size_t cursor_ = 0;
  bool full_ = false;
};

struct Batch {
  Matrix s;       // state_dim x V
  Matrix a;       // action_dim x V
  Vector r;       // V
  Matrix s_next;  // state_dim x V
};

Batch gather_batch(const ReplayBuffer& replay, const std::vector<std::size_t>& idx);

/// min over users of the running time-average of per-user rates.
double evaluation_reward(const std::vector<Vector>& rate_history);

/// Exponential moving average r_s[t] = w*r_s[t-1] + (1-w)*r[t], seeded with
/// the first element.
std::vector<double> smooth(const std::vector<double>& series, double w);

/// One ascent step on (1/V) sum_i Q(s_i, pi(s_i)) where action_gradient
/// returns dQ_i/da_i per column for the actions the actor produced. Returns
/// the parameter-gradient norm before the step.
double actor_ascent_step(Mlp& actor, AdamOptimizer& opt, const Matrix& states,
                         const std::function<Matrix(const Matrix&)>& action_gradient);

/// Per-feature scale applied to states before they enter the networks:
/// channel entries divided by the square root of their large-scale gain, W
/// entries by sqrt(P_t), so all features share a common magnitude.
Vector state_feature_scale(const LongTermCsi& csi, double p_t);

/// Runs a trained actor noise-free over the dataset and returns the visited
/// configuration with the highest min-average rate on a common Monte-Carlo
/// evaluation set (eval_n_mc fresh realizations). Deterministic in `seed`.
TxConfig greedy_extract(const Mlp& actor, const LongTermCsi& csi,
                        const std::vector<ChannelRealization>& dataset,
                        double sigma2, double p_t, std::uint64_t seed,
                        int eval_n_mc, double* value_out = nullptr);

/// The DDPG learner: actor/critic with target copies, replay-driven updates,
/// decaying Gaussian exploration. States are scaled feature-wise by the
/// long-term gains before entering the networks so channel entries and
/// precoder entries share a common magnitude.
class DdpgAgent {
 public:
  DdpgAgent(const LongTermCsi& csi, double p_t, const AgentConfig& cfg,
            const NetworkConfig& net_cfg, std::uint64_t seed);

  /// Actor output plus clipped exploration noise; decays the noise scale.
  Vector select_action(const Vector& state);

  /// Noise-free actor output.
  Vector act_greedy(const Vector& state) const;

  /// One critic descent step on the Eq.-style TD loss with target networks;
  /// returns the pre-step loss.
  double critic_update(const Batch& batch);

  /// One deterministic-policy-gradient ascent step; returns gradient norm.
  double actor_update(const Matrix& states);

  void soft_update_targets();

  Vector normalize_state(const Vector& state) const;
  Matrix normalize_state(const Matrix& states) const;

  double noise_scale() const { return noise_scale_; }
  const AgentConfig& config() const { return cfg_; }

  Mlp actor, critic, actor_target, critic_target;
  AdamOptimizer actor_opt, critic_opt;
  ReplayBuffer replay;
  Rng noise_rng, replay_rng;

 private:
  AgentConfig cfg_;
  Vector state_scale_;
  int state_dim_ = 0, action_dim_ = 0;
  double noise_scale_ = 0.0;
};

struct TrainStepInfo {
  int episode = 0;
  int step = 0;
  long global_step = 0;
  const TxConfig* tx = nullptr;
  double reward = 0.0;
  double evaluation_reward = 0.0;
  double smoothed_reward = 0.0;
  double critic_loss = 0.0;
  double actor_grad_norm = 0.0;
  double noise_scale = 0.0;
};

using StepObserver = std::function<void(const TrainStepInfo&)>;

struct TrainLogRow {
  int episode = 0;
  int step = 0;
  double reward = 0.0;
  double evaluation_reward = 0.0;
  double smoothed_reward = 0.0;
  double critic_loss = 0.0;
  double noise_scale = 0.0;
};

struct EpisodeLogRow {
  int episode = 0;
  double reward = 0.0;             // mean step reward over the episode
  double evaluation_reward = 0.0;  // end-of-episode running min-average
  double smoothed_reward = 0.0;    // EMA of the per-episode mean rewards
};

struct TrainResult {
  Mlp actor;
  Mlp critic;
  std::vector<TrainLogRow> step_log;
  std::vector<EpisodeLogRow> episode_log;
  TxConfig greedy_tx;
  double greedy_min_rate = 0.0;  // common-random-number estimate for greedy_tx
};

struct TrainOptions {
  double smooth_weight = 0.9;  // w in the EMA
  int eval_n_mc = 1000;        // draws for greedy extraction
  StepObserver observer;       // optional per-step hook
};

/// Runs the full training loop over the offline dataset: per episode, reset
/// the transmit configuration, then for each step act with decaying noise,
/// apply the action, take the reward from the t-th offline realization,
/// store the experience, and (once learning_start experiences exist) update
/// critic, actor and targets. Afterwards extracts the deployed TxConfig by
/// running the trained actor noise-free over the dataset and keeping the
/// candidate with the best min-average rate on a common evaluation set.
TrainResult train(const LongTermCsi& csi,
                  const std::vector<ChannelRealization>& dataset, double sigma2,
                  double p_t, const AgentConfig& cfg, const NetworkConfig& net_cfg,
                  std::uint64_t seed, const TrainOptions& options = {});

}  // namespace rissim
