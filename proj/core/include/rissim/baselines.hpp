#pragma once

#include <functional>

#include "rissim/channel.hpp"
#include "rissim/rate.hpp"
#include "rissim/rng.hpp"

namespace rissim {

enum class PrecoderRule { kMatchedFilter, kRandomRefine };

struct LocalSearchConfig {
  int iterations = 60;
  int candidates_per_iter = 8;
  double phase_step = 0.3;  // Gaussian perturbation std, radians
  PrecoderRule precoder_rule = PrecoderRule::kMatchedFilter;
};

/// Random feasible configuration: phases i.i.d. uniform on [0, 2*pi), W
/// complex Gaussian then normalized to Frobenius norm sqrt(P_t).
TxConfig random_tx(int m, int n, int k, double p_t, Rng& rng);

/// Greedy random local search maximizing min_k R_k for one realization:
/// start from the best of candidates_per_iter random draws, then iterate
/// wrapped Gaussian phase perturbations with the precoder re-derived per the
/// configured rule, accepting only improvements.
TxConfig instantaneous_solve(const ChannelRealization& real, double sigma2,
                             double p_t, const LocalSearchConfig& cfg, Rng& rng);

using InstantaneousSolver =
    std::function<TxConfig(const ChannelRealization&, double, double,
                           const LocalSearchConfig&, Rng&)>;

struct SchemeComparison {
  double maur_longterm = 0.0;
  double maur_instantaneous = 0.0;
  long solver_calls_longterm = 1;  // the long-term design is computed once
  long solver_calls_instantaneous = 0;
  double wall_instantaneous_s = 0.0;
  double pilot_factor = 0.0;
  bool factor_clamped = false;
};

/// Evaluates both transmission schemes over the offline dataset. The
/// long-term scheme applies the single fixed configuration with no pre-log
/// penalty; the instantaneous scheme re-solves per CCTI (substream seed per
/// t) and pays the pilot overhead factor. MAUR = min over users of the
/// T-averaged net rate. A custom solver can be injected; by default
/// instantaneous_solve runs.
SchemeComparison compare_schemes(const std::vector<ChannelRealization>& dataset,
                                 double sigma2, const TxConfig& longterm_tx,
                                 const LocalSearchConfig& ls_cfg,
                                 const OverheadParams& ov, std::uint64_t seed,
                                 const InstantaneousSolver& solver = {});

}  // namespace rissim
