#include "rissim/baselines.hpp"

#include <chrono>
#include <cmath>

namespace rissim {

namespace {

double objective(const ChannelRealization& real, const TxConfig& tx, double sigma2) {
  return rate_report(real, tx, sigma2).min_rate;
}

// w_k proportional to conj(v_k) with equal power split, then exact
// Frobenius normalization.
CMatrix matched_filter_precoder(const ChannelRealization& real,
                                const Vector& phase_angles, double p_t) {
  const auto v = effective_channel(real, phase_angles);
  const int m = static_cast<int>(v.front().size());
  const int k = static_cast<int>(v.size());
  CMatrix w(m, k);
  for (int u = 0; u < k; ++u) {
    const double norm = v[u].norm();
    if (norm < 1e-300) {
      w.col(u) = CVector::Constant(m, Complex(1.0 / std::sqrt(double(m)), 0.0));
    } else {
      w.col(u) = v[u].conjugate() / norm;
    }
  }
  w *= std::sqrt(p_t) / w.norm();
  return w;
}

}  // namespace

TxConfig random_tx(int m, int n, int k, double p_t, Rng& rng) {
  TxConfig tx;
  tx.p_t = p_t;
  tx.phase_angles.resize(n);
  for (int j = 0; j < n; ++j) tx.phase_angles[j] = rng.uniform(0.0, kTwoPi);
  tx.W.resize(m, k);
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < m; ++r) tx.W(r, c) = rng.cnormal();
  }
  tx.W *= std::sqrt(p_t) / tx.W.norm();
  return tx;
}

TxConfig instantaneous_solve(const ChannelRealization& real, double sigma2,
                             double p_t, const LocalSearchConfig& cfg, Rng& rng) {
  if (cfg.candidates_per_iter < 1) {
    throw std::invalid_argument("instantaneous_solve: need at least one candidate");
  }
  const int n = static_cast<int>(real.G.rows());
  const int m = static_cast<int>(real.G.cols());
  const int k = static_cast<int>(real.g.size());

  TxConfig best = random_tx(m, n, k, p_t, rng);
  double best_value = objective(real, best, sigma2);
  for (int c = 1; c < cfg.candidates_per_iter; ++c) {
    TxConfig cand = random_tx(m, n, k, p_t, rng);
    const double value = objective(real, cand, sigma2);
    if (value > best_value) {
      best = std::move(cand);
      best_value = value;
    }
  }

  for (int it = 0; it < cfg.iterations; ++it) {
    TxConfig cand = best;
    for (int j = 0; j < n; ++j) {
      cand.phase_angles[j] =
          wrap_angle(cand.phase_angles[j] + cfg.phase_step * rng.normal());
    }
    if (cfg.precoder_rule == PrecoderRule::kMatchedFilter) {
      cand.W = matched_filter_precoder(real, cand.phase_angles, p_t);
    } else {
      const double scale = cfg.phase_step * std::sqrt(p_t / (m * k));
      for (int c = 0; c < k; ++c) {
        for (int r = 0; r < m; ++r) cand.W(r, c) += scale * rng.cnormal();
      }
      cand.W *= std::sqrt(p_t) / cand.W.norm();
    }
    const double value = objective(real, cand, sigma2);
    if (value > best_value) {
      best = std::move(cand);
      best_value = value;
    }
  }
  return best;
}

SchemeComparison compare_schemes(const std::vector<ChannelRealization>& dataset,
                                 double sigma2, const TxConfig& longterm_tx,
                                 const LocalSearchConfig& ls_cfg,
                                 const OverheadParams& ov, std::uint64_t seed,
                                 const InstantaneousSolver& solver) {
  if (dataset.empty()) throw std::invalid_argument("compare_schemes: empty dataset");
  const int k = static_cast<int>(dataset.front().g.size());
  const int m = static_cast<int>(dataset.front().G.cols());
  const int n = static_cast<int>(dataset.front().G.rows());

  SchemeComparison result;
  result.pilot_factor = pilot_overhead_factor(ov);
  result.factor_clamped = 2 * ov.k + ov.n - 1 >= ov.tau_c;

  Vector longterm_sums = Vector::Zero(k);
  for (const auto& real : dataset) {
    longterm_sums += net_rate_longterm(real, longterm_tx, sigma2);
  }
  result.maur_longterm = (longterm_sums / static_cast<double>(dataset.size())).minCoeff();

  const InstantaneousSolver& solve =
      solver ? solver : InstantaneousSolver(&instantaneous_solve);
  Vector instantaneous_sums = Vector::Zero(k);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < dataset.size(); ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t + 1)));
    const TxConfig tx = solve(dataset[t], sigma2, longterm_tx.p_t, ls_cfg, rng);
    ++result.solver_calls_instantaneous;
    if (tx.W.rows() != m || tx.W.cols() != k || tx.phase_angles.size() != n) {
      throw std::runtime_error("compare_schemes: solver returned wrong dimensions");
    }
    instantaneous_sums += net_rate_instantaneous(dataset[t], tx, sigma2, ov);
  }
  result.wall_instantaneous_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.maur_instantaneous =
      (instantaneous_sums / static_cast<double>(dataset.size())).minCoeff();
  return result;
}

}  // namespace rissim
