#pragma once

#include "rissim/channel.hpp"
#include "rissim/common.hpp"

namespace rissim {

/// The decision variables: BS precoder W (column k serves user k) and the
/// RIS phase-shift angles. phase_vector() gives phi_n = cos + j sin, so the
/// unit-modulus constraint holds by construction.
struct TxConfig {
  CMatrix W;             // M x K
  Vector phase_angles;   // N, radians in [0, 2*pi)
  double p_t = 1.0;      // max transmit power [W]

  CVector phase_vector() const;
};

struct OverheadParams {
  int tau_c = 1;  // time slots per CCTI
  int k = 0;
  int n = 0;
};

struct RateReport {
  Vector sinr;      // per user
  Vector rate;      // log2(1 + sinr), bits/s/Hz
  double min_rate = 0.0;
};

/// Composite channel per user: v_k^T = g_k^T diag(phi) G + h_k^T (an
/// M-vector; plain transpose, no conjugation).
std::vector<CVector> effective_channel(const ChannelRealization& real,
                                       const Vector& phase_angles);

/// Per-user SINR of the k-th stream under precoder W.
/// Throws std::domain_error for sigma2 <= 0.
Vector sinr(const ChannelRealization& real, const TxConfig& tx, double sigma2);

/// log2(1 + s). Throws std::domain_error for negative input.
double rate_from_sinr(double s);

RateReport rate_report(const ChannelRealization& real, const TxConfig& tx,
                       double sigma2);

/// Minimum over users. Throws std::invalid_argument on an empty report.
double min_rate(const RateReport& report);

/// Pre-log penalty 1 - (2K + N - 1)/tau_c charged to instantaneous-CSI
/// schemes for channel training, clamped below at 0.
double pilot_overhead_factor(const OverheadParams& ov);

/// Net per-user rates of the instantaneous scheme: overhead factor times
/// the full rate, with tx recomputed each CCTI by the caller.
Vector net_rate_instantaneous(const ChannelRealization& real, const TxConfig& tx,
                              double sigma2, const OverheadParams& ov);

/// Net per-user rates of the long-term scheme: no pre-log penalty, the same
/// fixed tx across all CCTIs.
Vector net_rate_longterm(const ChannelRealization& real, const TxConfig& tx,
                         double sigma2);

/// Monte-Carlo estimate of min_k E[R_k] for a fixed tx: average per-user
/// rates over n_mc fresh realizations (substream per draw), then take the
/// minimum over users.
double ergodic_min_rate(const LongTermCsi& csi, const TxConfig& tx,
                        double sigma2, int n_mc, std::uint64_t seed);

/// Same estimator evaluated on a caller-supplied realization set. Used to
/// compare candidate configurations under common random numbers.
double min_avg_rate_on_set(const std::vector<ChannelRealization>& set,
                           const TxConfig& tx, double sigma2);

}  // namespace rissim
