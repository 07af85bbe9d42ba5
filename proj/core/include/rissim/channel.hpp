#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rissim/common.hpp"
#include "rissim/rng.hpp"

namespace rissim {

/// Node placement for one drop. Users are drawn uniformly on a horizontal
/// disk once per scenario seed.
struct ScenarioGeometry {
  Vec3 bs_position;
  Vec3 ris_position;
  std::vector<Vec3> user_positions;
  Vec3 user_disk_center;
  double user_disk_radius = 0.0;
};

struct PathLossParams {
  double pl0_db = -30.0;          // reference path loss [dB] at distance d0
  double d0 = 1.0;                // reference distance [m]
  double alpha_bs_ris = 2.2;
  double alpha_ris_user = 2.2;
  double alpha_bs_user = 3.5;
  double noise_density_dbm_hz = -174.0;
  double bandwidth_hz = 1e6;
};

/// Slowly varying channel statistics: angles, Rician factors and large-scale
/// gains, plus the LoS components they determine.
///
/// Naming convention (kept consistent everywhere): g[k] is the RIS->user k
/// channel (length N, gain beta[k], Rician factor epsilon[k]); h[k] is the
/// BS->user k direct channel (length M, gain gamma[k], Rician factor eta[k]).
/// The composite channel seen by user k is g_k^T diag(phi) G + h_k^T.
struct LongTermCsi {
  int m = 0;  // BS antennas
  int n = 0;  // RIS elements
  int k = 0;  // users
  int i = 0;  // BS-RIS paths

  double kappa = 1.0;    // BS-RIS large-scale gain (linear)
  Vector beta;           // RIS->user gains, size K
  Vector gamma;          // BS->user gains, size K

  double delta = 0.0;    // BS-RIS Rician factor
  Vector epsilon;        // RIS->user Rician factors, size K
  Vector eta;            // BS->user Rician factors, size K

  Vector aoa_bs_ris;     // size I, radians
  Vector aod_bs_ris;     // size I
  Vector aod_ris_user;   // size K
  Vector aod_bs_user;    // size K

  CMatrix g_bar_bs_ris;            // N x M LoS component of G
  std::vector<CVector> g_bar;      // K LoS steering vectors, length N
  std::vector<CVector> h_bar;      // K LoS steering vectors, length M
};

/// One instantaneous draw from the Rician model.
struct ChannelRealization {
  CMatrix G;               // N x M, BS -> RIS
  std::vector<CVector> g;  // K vectors of length N, RIS -> user k
  std::vector<CVector> h;  // K vectors of length M, BS -> user k
  int index = 0;           // CCTI counter t (1-based)
};

/// Uniform linear array response [1, e^{j theta}, ..., e^{j (x-1) theta}].
/// Throws std::invalid_argument for x == 0.
CVector steering_vector(int x, double theta);

/// Recomputes the LoS components of `csi` from its stored angles.
/// Pure function of the angles; overwrites g_bar_bs_ris / g_bar / h_bar.
void los_components(LongTermCsi& csi);

/// Linear power gain for distance d under exponent alpha.
/// Throws std::domain_error for d <= 0.
double path_loss_linear(const PathLossParams& params, double d, double alpha);

/// Noise power sigma^2 in watts from density [dBm/Hz] and bandwidth.
double noise_power(const PathLossParams& params);

/// Draws a scenario: fixed BS/RIS positions, K users uniform on the disk.
ScenarioGeometry make_geometry(const Vec3& bs, const Vec3& ris,
                               const Vec3& disk_center, double disk_radius,
                               int k, Rng& rng);

struct RicianFactors {
  double delta = 2.2;
  double epsilon = 3.75;
  double eta = 2.2;
};

/// Builds the long-term CSI for a geometry: path-loss gains from distances,
/// all AoA/AoD angles i.i.d. uniform on [0, 2*pi) from `angle_seed`, LoS
/// components from the angles. Angles are not derived from positions; the
/// positions only set distances and hence gains.
LongTermCsi make_long_term_csi(const ScenarioGeometry& geometry,
                               const PathLossParams& pl, int m, int n, int i,
                               const RicianFactors& factors,
                               std::uint64_t angle_seed);

/// One Rician draw: LoS parts from csi, NLoS parts i.i.d. CN(0,1) from rng.
ChannelRealization sample_realization(const LongTermCsi& csi, Rng& rng);

/// T independent realizations, realization t drawn from substream
/// derive_seed(seed, t). Bit-identical for a fixed (csi, T, seed).
std::vector<ChannelRealization> generate_offline_dataset(const LongTermCsi& csi,
                                                         int t_count,
                                                         std::uint64_t seed);

/// Flat binary dataset file. Header: M, N, K, T as little-endian uint64,
/// then per-t interleaved re/im doubles for G (column-major), g[1..K],
/// h[1..K]. See README for the exact layout.
void save_dataset(const std::filesystem::path& path,
                  const std::vector<ChannelRealization>& dataset);
std::vector<ChannelRealization> load_dataset(const std::filesystem::path& path);

}  // namespace rissim
