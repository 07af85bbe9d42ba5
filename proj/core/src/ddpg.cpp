#include "rissim/ddpg.hpp"

#include <cmath>

namespace rissim {

namespace {

constexpr std::uint64_t kAgentStream = 1;
constexpr std::uint64_t kResetStream = 2;
constexpr std::uint64_t kGreedyEvalStream = 3;
constexpr std::uint64_t kGreedyInitStream = 4;

void validate_agent_config(const AgentConfig& cfg) {
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw std::invalid_argument("AgentConfig: gamma out of [0,1]");
  if (cfg.replay_capacity == 0) throw std::invalid_argument("AgentConfig: replay capacity must be > 0");
  if (cfg.batch_size < 1 || static_cast<std::size_t>(cfg.batch_size) > cfg.replay_capacity) {
    throw std::invalid_argument("AgentConfig: batch size must be in [1, replay capacity]");
  }
  if (cfg.eta <= 0.0 || cfg.eta > 1.0) throw std::invalid_argument("AgentConfig: eta out of (0,1]");
  if (cfg.noise_decay <= 0.0 || cfg.noise_decay > 1.0) {
    throw std::invalid_argument("AgentConfig: noise decay out of (0,1]");
  }
  if (cfg.noise_scale < 0.0) throw std::invalid_argument("AgentConfig: noise scale must be >= 0");
  if (cfg.episodes < 1) throw std::invalid_argument("AgentConfig: episodes must be >= 1");
  if (cfg.learning_start < 1) throw std::invalid_argument("AgentConfig: learning_start must be >= 1");
}

std::vector<int> layer_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims;
  dims.reserve(hidden.size() + 2);
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

Vector state_feature_scale(const LongTermCsi& csi, double p_t) {
  const int m = csi.m, n = csi.n, k = csi.k;
  Vector scale(state_dim(m, n, k));
  Eigen::Index idx = 0;
  const double w_scale = 1.0 / std::sqrt(p_t);
  for (int j = 0; j < 2 * m * k; ++j) scale[idx++] = w_scale;
  for (int j = 0; j < 2 * n; ++j) scale[idx++] = 1.0;
  const double g_mat_scale = 1.0 / std::sqrt(csi.kappa);
  for (int j = 0; j < 2 * n * m; ++j) scale[idx++] = g_mat_scale;
  for (int u = 0; u < k; ++u) {
    const double s = 1.0 / std::sqrt(csi.beta[u]);
    for (int j = 0; j < 2 * n; ++j) scale[idx++] = s;
  }
  for (int u = 0; u < k; ++u) {
    const double s = 1.0 / std::sqrt(csi.gamma[u]);
    for (int j = 0; j < 2 * m; ++j) scale[idx++] = s;
  }
  return scale;
}

int action_dim(int m, int n, int k) {
  if (m < 1 || n < 1 || k < 1) throw std::invalid_argument("action_dim: counts must be >= 1");
  return 2 * m * k + n;
}

int state_dim(int m, int n, int k) {
  if (m < 1 || n < 1 || k < 1) throw std::invalid_argument("state_dim: counts must be >= 1");
  return 2 * m * k + 2 * n + 2 * (n * m + m * k + n * k);
}

Vector encode_state(const TxConfig& tx, const ChannelRealization& real) {
  const int m = static_cast<int>(tx.W.rows());
  const int k = static_cast<int>(tx.W.cols());
  const int n = static_cast<int>(tx.phase_angles.size());
  if (real.G.rows() != n || real.G.cols() != m || static_cast<int>(real.g.size()) != k) {
    throw std::invalid_argument("encode_state: tx/realization dimension mismatch");
  }
  Vector s(state_dim(m, n, k));
  Eigen::Index idx = 0;
  auto put = [&s, &idx](const Complex& c) {
    s[idx++] = c.real();
    s[idx++] = c.imag();
  };
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < m; ++r) put(tx.W(r, c));
  }
  for (int j = 0; j < n; ++j) {
    put(Complex(std::cos(tx.phase_angles[j]), std::sin(tx.phase_angles[j])));
  }
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < n; ++r) put(real.G(r, c));
  }
  for (int u = 0; u < k; ++u) {
    for (int r = 0; r < n; ++r) put(real.g[u][r]);
  }
  for (int u = 0; u < k; ++u) {
    for (int r = 0; r < m; ++r) put(real.h[u][r]);
  }
  return s;
}

DecodedState decode_state(const Vector& state, int m, int n, int k) {
  if (state.size() != state_dim(m, n, k)) {
    throw std::invalid_argument("decode_state: state length mismatch");
  }
  DecodedState out;
  Eigen::Index idx = 0;
  auto get = [&state, &idx]() {
    const double re = state[idx++];
    const double im = state[idx++];
    return Complex(re, im);
  };
  out.W.resize(m, k);
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < m; ++r) out.W(r, c) = get();
  }
  out.phase.resize(n);
  for (int j = 0; j < n; ++j) out.phase[j] = get();
  out.G.resize(n, m);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < n; ++r) out.G(r, c) = get();
  }
  out.g.resize(k);
  for (int u = 0; u < k; ++u) {
    out.g[u].resize(n);
    for (int r = 0; r < n; ++r) out.g[u][r] = get();
  }
  out.h.resize(k);
  for (int u = 0; u < k; ++u) {
    out.h[u].resize(m);
    for (int r = 0; r < m; ++r) out.h[u][r] = get();
  }
  return out;
}

TxConfig apply_action(const TxConfig& tx, const Vector& action) {
  const int m = static_cast<int>(tx.W.rows());
  const int k = static_cast<int>(tx.W.cols());
  const int n = static_cast<int>(tx.phase_angles.size());
  if (action.size() != action_dim(m, n, k)) {
    throw std::invalid_argument("apply_action: action length mismatch");
  }
  TxConfig out = tx;
  CMatrix raw(m, k);
  Eigen::Index idx = 0;
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < m; ++r) {
      const double re = action[idx++];
      const double im = action[idx++];
      raw(r, c) = Complex(re, im);
    }
  }
  const double fro = raw.norm();
  if (fro >= 1e-12) {
    out.W = (std::sqrt(tx.p_t) / fro) * raw;
  }
  // else: degenerate raw precoder, keep the previous W.
  for (int j = 0; j < n; ++j) {
    out.phase_angles[j] = wrap_angle(tx.phase_angles[j] + action[idx + j] * kPi);
  }
  return out;
}

Vector per_user_rates(const ChannelRealization& real, const TxConfig& tx,
                      double sigma2) {
  return net_rate_longterm(real, tx, sigma2);
}

double reward(const ChannelRealization& real, const TxConfig& tx, double sigma2) {
  return per_user_rates(real, tx, sigma2).minCoeff();
}

TxConfig initial_tx_config(int m, int n, int k, double p_t, Rng& rng) {
  TxConfig tx;
  tx.p_t = p_t;
  tx.phase_angles.resize(n);
  for (int j = 0; j < n; ++j) tx.phase_angles[j] = rng.uniform(0.0, kTwoPi);
  tx.W = CMatrix::Constant(m, k, Complex(std::sqrt(p_t / (m * k)), 0.0));
  return tx;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
  storage_.resize(capacity);
}

void ReplayBuffer::push(Experience e) {
  storage_[cursor_] = std::move(e);
  cursor_ = (cursor_ + 1) % storage_.size();
  if (cursor_ == 0) full_ = true;
}

const Experience& ReplayBuffer::element(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("ReplayBuffer::element");
  const std::size_t base = full_ ? cursor_ : 0;
  return storage_[(base + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(int count, Rng& rng) const {
  if (size() == 0) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
  std::vector<std::size_t> idx(count);
  for (auto& i : idx) i = rng.uniform_index(size());
  return idx;
}

Batch gather_batch(const ReplayBuffer& replay, const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw std::invalid_argument("gather_batch: empty index list");
  const auto& first = replay.element(idx[0]);
  Batch batch;
  batch.s.resize(first.s.size(), static_cast<Eigen::Index>(idx.size()));
  batch.a.resize(first.a.size(), static_cast<Eigen::Index>(idx.size()));
  batch.r.resize(static_cast<Eigen::Index>(idx.size()));
  batch.s_next.resize(first.s_next.size(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const Experience& e = replay.element(idx[j]);
    batch.s.col(static_cast<Eigen::Index>(j)) = e.s;
    batch.a.col(static_cast<Eigen::Index>(j)) = e.a;
    batch.r[static_cast<Eigen::Index>(j)] = e.r;
    batch.s_next.col(static_cast<Eigen::Index>(j)) = e.s_next;
  }
  return batch;
}

double evaluation_reward(const std::vector<Vector>& rate_history) {
  if (rate_history.empty()) throw std::invalid_argument("evaluation_reward: empty history");
  Vector sums = Vector::Zero(rate_history.front().size());
  for (const auto& rates : rate_history) sums += rates;
  return (sums / static_cast<double>(rate_history.size())).minCoeff();
}

std::vector<double> smooth(const std::vector<double>& series, double w) {
  if (w < 0.0 || w >= 1.0) throw std::invalid_argument("smooth: weight out of [0,1)");
  std::vector<double> out;
  out.reserve(series.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    prev = (i == 0) ? series[0] : w * prev + (1.0 - w) * series[i];
    out.push_back(prev);
  }
  return out;
}

double actor_ascent_step(Mlp& actor, AdamOptimizer& opt, const Matrix& states,
                         const std::function<Matrix(const Matrix&)>& action_gradient) {
  BatchCache cache;
  const Matrix actions = actor.forward(states, &cache);
  const double batch = static_cast<double>(states.cols());
  Matrix upstream = action_gradient(actions) / batch;
  auto [grads, input_grad] = actor.backward(cache, upstream);
  const double norm = std::sqrt(grads.squared_norm());
  grads *= -1.0;  // optimizer descends; we ascend the mean Q objective
  opt.step(actor, grads);
  return norm;
}

DdpgAgent::DdpgAgent(const LongTermCsi& csi, double p_t, const AgentConfig& cfg,
                     const NetworkConfig& net_cfg, std::uint64_t seed)
    : actor(), critic(), actor_target(), critic_target(),
      actor_opt(Mlp::zeros({1, 1}, OutputActivation::kTanh), net_cfg.actor_lr),
      critic_opt(Mlp::zeros({1, 1}, OutputActivation::kIdentity), net_cfg.critic_lr),
      replay(cfg.replay_capacity),
      noise_rng(derive_seed(seed, 10)),
      replay_rng(derive_seed(seed, 11)),
      cfg_(cfg) {
  validate_agent_config(cfg);
  state_dim_ = state_dim(csi.m, csi.n, csi.k);
  action_dim_ = action_dim(csi.m, csi.n, csi.k);
  state_scale_ = state_feature_scale(csi, p_t);
  noise_scale_ = cfg.noise_scale;

  Rng init_rng(derive_seed(seed, 12));
  actor = Mlp::random_init(layer_dims(state_dim_, net_cfg.actor_hidden, action_dim_),
                           OutputActivation::kTanh, init_rng, 1e-3);
  critic = Mlp::random_init(layer_dims(state_dim_ + action_dim_, net_cfg.critic_hidden, 1),
                            OutputActivation::kIdentity, init_rng);
  actor_target = actor;
  critic_target = critic;
  actor_opt = AdamOptimizer(actor, net_cfg.actor_lr);
  critic_opt = AdamOptimizer(critic, net_cfg.critic_lr);
}

Vector DdpgAgent::normalize_state(const Vector& state) const {
  return state.cwiseProduct(state_scale_);
}

Matrix DdpgAgent::normalize_state(const Matrix& states) const {
  return state_scale_.asDiagonal() * states;
}

Vector DdpgAgent::select_action(const Vector& state) {
  Vector a = actor.forward(normalize_state(state));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a[i] += noise_scale_ * noise_rng.normal();
    a[i] = std::clamp(a[i], -1.0, 1.0);
  }
  noise_scale_ *= cfg_.noise_decay;
  return a;
}

Vector DdpgAgent::act_greedy(const Vector& state) const {
  return actor.forward(normalize_state(state));
}

double DdpgAgent::critic_update(const Batch& batch) {
  const Eigen::Index v = batch.s.cols();
  if (v != cfg_.batch_size) {
    throw std::invalid_argument("critic_update: batch size mismatch");
  }
  const Matrix s_next_norm = normalize_state(batch.s_next);
  const Matrix a_next = actor_target.forward(s_next_norm);

  Matrix x_next(state_dim_ + action_dim_, v);
  x_next.topRows(state_dim_) = s_next_norm;
  x_next.bottomRows(action_dim_) = a_next;
  const Matrix q_next = critic_target.forward(x_next);

  Vector y(v);
  for (Eigen::Index i = 0; i < v; ++i) y[i] = batch.r[i] + cfg_.gamma * q_next(0, i);

  Matrix x(state_dim_ + action_dim_, v);
  x.topRows(state_dim_) = normalize_state(batch.s);
  x.bottomRows(action_dim_) = batch.a;
  BatchCache cache;
  const Matrix q = critic.forward(x, &cache);

  double loss = 0.0;
  Matrix upstream(1, v);
  for (Eigen::Index i = 0; i < v; ++i) {
    const double diff = q(0, i) - y[i];
    loss += diff * diff;
    upstream(0, i) = 2.0 * diff / static_cast<double>(v);
  }
  loss /= static_cast<double>(v);
  if (!std::isfinite(loss)) {
    throw std::runtime_error("critic_update: non-finite loss, aborting training");
  }
  auto [grads, input_grad] = critic.backward(cache, upstream);
  critic_opt.step(critic, grads);
  return loss;
}

double DdpgAgent::actor_update(const Matrix& states) {
  const Matrix s_norm = normalize_state(states);
  return actor_ascent_step(actor, actor_opt, s_norm, [this, &s_norm](const Matrix& actions) {
    const Eigen::Index v = actions.cols();
    Matrix x(state_dim_ + action_dim_, v);
    x.topRows(state_dim_) = s_norm;
    x.bottomRows(action_dim_) = actions;
    BatchCache cache;
    critic.forward(x, &cache);
    const Matrix upstream = Matrix::Ones(1, v);
    auto [grads, input_grad] = critic.backward(cache, upstream);
    return Matrix(input_grad.bottomRows(action_dim_));
  });
}

void DdpgAgent::soft_update_targets() {
  soft_update(actor_target, actor, cfg_.eta);
  soft_update(critic_target, critic, cfg_.eta);
}

TrainResult train(const LongTermCsi& csi,
                  const std::vector<ChannelRealization>& dataset, double sigma2,
                  double p_t, const AgentConfig& cfg, const NetworkConfig& net_cfg,
                  std::uint64_t seed, const TrainOptions& options) {
  if (dataset.empty()) throw std::invalid_argument("train: empty offline dataset");
  validate_agent_config(cfg);
  const int t_count = static_cast<int>(dataset.size());
  const int steps_per_episode = cfg.steps_per_episode > 0 ? cfg.steps_per_episode : t_count;

  DdpgAgent agent(csi, p_t, cfg, net_cfg, derive_seed(seed, kAgentStream));
  Rng reset_rng(derive_seed(seed, kResetStream));

  TrainResult result;
  result.step_log.reserve(static_cast<std::size_t>(cfg.episodes) * steps_per_episode);
  result.episode_log.reserve(cfg.episodes);

  double smoothed = 0.0;
  double episode_smoothed = 0.0;
  bool first_step = true;
  long global_step = 0;

  for (int episode = 1; episode <= cfg.episodes; ++episode) {
    TxConfig tx = initial_tx_config(csi.m, csi.n, csi.k, p_t, reset_rng);
    Vector rate_sums = Vector::Zero(csi.k);
    double reward_sum = 0.0;
    double eval_reward = 0.0;

    for (int step = 1; step <= steps_per_episode; ++step) {
      const ChannelRealization& real = dataset[(step - 1) % t_count];
      const double noise_now = agent.noise_scale();
      const Vector s = encode_state(tx, real);
      const Vector a = agent.select_action(s);
      tx = apply_action(tx, a);
      const Vector rates = per_user_rates(real, tx, sigma2);
      const double r = rates.minCoeff();
      const ChannelRealization& next_real = dataset[step % t_count];
      const Vector s_next = encode_state(tx, next_real);
      agent.replay.push(Experience{s, a, r, s_next});

      rate_sums += rates;
      eval_reward = (rate_sums / static_cast<double>(step)).minCoeff();
      reward_sum += r;
      smoothed = first_step ? r : options.smooth_weight * smoothed +
                                      (1.0 - options.smooth_weight) * r;
      first_step = false;
      ++global_step;

      double critic_loss = 0.0;
      double actor_grad_norm = 0.0;
      if (agent.replay.size() >= static_cast<std::size_t>(cfg.learning_start)) {
        const auto idx = agent.replay.sample_indices(cfg.batch_size, agent.replay_rng);
        const Batch batch = gather_batch(agent.replay, idx);
        critic_loss = agent.critic_update(batch);
        actor_grad_norm = agent.actor_update(batch.s);
        agent.soft_update_targets();
      }

      result.step_log.push_back(TrainLogRow{episode, step, r, eval_reward, smoothed,
                                            critic_loss, noise_now});
      if (options.observer) {
        TrainStepInfo info;
        info.episode = episode;
        info.step = step;
        info.global_step = global_step;
        info.tx = &tx;
        info.reward = r;
        info.evaluation_reward = eval_reward;
        info.smoothed_reward = smoothed;
        info.critic_loss = critic_loss;
        info.actor_grad_norm = actor_grad_norm;
        info.noise_scale = noise_now;
        options.observer(info);
      }
    }

    const double mean_reward = reward_sum / static_cast<double>(steps_per_episode);
    episode_smoothed = (episode == 1) ? mean_reward
                                      : options.smooth_weight * episode_smoothed +
                                            (1.0 - options.smooth_weight) * mean_reward;
    result.episode_log.push_back(
        EpisodeLogRow{episode, mean_reward, eval_reward, episode_smoothed});
  }

  result.actor = agent.actor;
  result.critic = agent.critic;
  result.greedy_tx = greedy_extract(agent.actor, csi, dataset, sigma2, p_t, seed,
                                    options.eval_n_mc, &result.greedy_min_rate);
  return result;
}

TxConfig greedy_extract(const Mlp& actor, const LongTermCsi& csi,
                        const std::vector<ChannelRealization>& dataset,
                        double sigma2, double p_t, std::uint64_t seed,
                        int eval_n_mc, double* value_out) {
  if (dataset.empty()) throw std::invalid_argument("greedy_extract: empty dataset");
  if (eval_n_mc < 1) throw std::invalid_argument("greedy_extract: eval_n_mc must be >= 1");

  // Common evaluation set so candidate configurations are compared on the
  // same random draws.
  std::vector<ChannelRealization> eval_set;
  eval_set.reserve(eval_n_mc);
  const std::uint64_t eval_seed = derive_seed(seed, kGreedyEvalStream);
  for (int draw = 0; draw < eval_n_mc; ++draw) {
    Rng rng(derive_seed(eval_seed, static_cast<std::uint64_t>(draw)));
    eval_set.push_back(sample_realization(csi, rng));
  }

  const Vector scale = state_feature_scale(csi, p_t);
  Rng init_rng(derive_seed(seed, kGreedyInitStream));
  TxConfig tx = initial_tx_config(csi.m, csi.n, csi.k, p_t, init_rng);
  TxConfig best_tx = tx;
  double best_value = -1.0;
  for (const auto& real : dataset) {
    const Vector s_norm = encode_state(tx, real).cwiseProduct(scale);
    tx = apply_action(tx, actor.forward(s_norm));
    const double value = min_avg_rate_on_set(eval_set, tx, sigma2);
    if (value > best_value) {
      best_value = value;
      best_tx = tx;
    }
  }
  if (value_out) *value_out = best_value;
  return best_tx;
}

}  // namespace rissim
