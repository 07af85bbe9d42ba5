#include "rissim/channel.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

namespace rissim {

namespace {

// LoS/NLoS mixing weights sqrt(f/(f+1)), sqrt(1/(f+1)). An infinite Rician
// factor means a deterministic channel.
std::pair<double, double> rician_mix(double factor) {
  if (std::isinf(factor)) return {1.0, 0.0};
  return {std::sqrt(factor / (factor + 1.0)), std::sqrt(1.0 / (factor + 1.0))};
}

CVector sample_vector(const CVector& los, double gain, double factor,
                      Rng& rng) {
  const auto [c_los, c_nlos] = rician_mix(factor);
  const double root_gain = std::sqrt(gain);
  CVector out(los.size());
  for (Eigen::Index i = 0; i < los.size(); ++i) {
    out[i] = root_gain * (c_los * los[i] + c_nlos * rng.cnormal());
  }
  return out;
}

void write_u64_le(std::ofstream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::ifstream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64_le(std::ofstream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  write_u64_le(os, bits);
}

double read_f64_le(std::ifstream& is) {
  const std::uint64_t bits = read_u64_le(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void write_complex(std::ofstream& os, const Complex& c) {
  write_f64_le(os, c.real());
  write_f64_le(os, c.imag());
}

Complex read_complex(std::ifstream& is) {
  const double re = read_f64_le(is);
  const double im = read_f64_le(is);
  return {re, im};
}

}  // namespace

CVector steering_vector(int x, double theta) {
  if (x < 1) throw std::invalid_argument("steering_vector: size must be >= 1");
  CVector a(x);
  for (int m = 0; m < x; ++m) {
    a[m] = Complex(std::cos(m * theta), std::sin(m * theta));
  }
  return a;
}

void los_components(LongTermCsi& csi) {
  csi.g_bar_bs_ris = CMatrix::Zero(csi.n, csi.m);
  for (int p = 0; p < csi.i; ++p) {
    const CVector a_n = steering_vector(csi.n, csi.aoa_bs_ris[p]);
    const CVector a_m = steering_vector(csi.m, csi.aod_bs_ris[p]);
    csi.g_bar_bs_ris += a_n * a_m.transpose();
  }
  csi.g_bar.resize(csi.k);
  csi.h_bar.resize(csi.k);
  for (int u = 0; u < csi.k; ++u) {
    csi.g_bar[u] = steering_vector(csi.n, csi.aod_ris_user[u]);
    csi.h_bar[u] = steering_vector(csi.m, csi.aod_bs_user[u]);
  }
}

double path_loss_linear(const PathLossParams& params, double d, double alpha) {
  if (d <= 0.0) throw std::domain_error("path_loss_linear: distance must be > 0");
  const double pl_db = params.pl0_db - 10.0 * alpha * std::log10(d / params.d0);
  return db_to_linear(pl_db);
}

double noise_power(const PathLossParams& params) {
  const double dbm = params.noise_density_dbm_hz + 10.0 * std::log10(params.bandwidth_hz);
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

ScenarioGeometry make_geometry(const Vec3& bs, const Vec3& ris,
                               const Vec3& disk_center, double disk_radius,
                               int k, Rng& rng) {
  ScenarioGeometry geo;
  geo.bs_position = bs;
  geo.ris_position = ris;
  geo.user_disk_center = disk_center;
  geo.user_disk_radius = disk_radius;
  geo.user_positions.reserve(k);
  for (int u = 0; u < k; ++u) {
    const double r = disk_radius * std::sqrt(rng.uniform());
    const double phi = rng.uniform(0.0, kTwoPi);
    Vec3 pos = disk_center;
    pos.x() += r * std::cos(phi);
    pos.y() += r * std::sin(phi);
    geo.user_positions.push_back(pos);
  }
  return geo;
}

LongTermCsi make_long_term_csi(const ScenarioGeometry& geometry,
                               const PathLossParams& pl, int m, int n, int i,
                               const RicianFactors& factors,
                               std::uint64_t angle_seed) {
  if (m < 1 || n < 1 || i < 1) {
    throw std::invalid_argument("make_long_term_csi: counts must be >= 1");
  }
  const int k = static_cast<int>(geometry.user_positions.size());
  if (k < 1) throw std::invalid_argument("make_long_term_csi: no users");

  LongTermCsi csi;
  csi.m = m;
  csi.n = n;
  csi.k = k;
  csi.i = i;
  csi.delta = factors.delta;
  csi.epsilon = Vector::Constant(k, factors.epsilon);
  csi.eta = Vector::Constant(k, factors.eta);

  const double d_bs_ris = (geometry.bs_position - geometry.ris_position).norm();
  csi.kappa = path_loss_linear(pl, d_bs_ris, pl.alpha_bs_ris);
  csi.beta.resize(k);
  csi.gamma.resize(k);
  for (int u = 0; u < k; ++u) {
    const double d_ris_user = (geometry.ris_position - geometry.user_positions[u]).norm();
    const double d_bs_user = (geometry.bs_position - geometry.user_positions[u]).norm();
    csi.beta[u] = path_loss_linear(pl, d_ris_user, pl.alpha_ris_user);
    csi.gamma[u] = path_loss_linear(pl, d_bs_user, pl.alpha_bs_user);
  }

  Rng rng(angle_seed);
  auto draw_angles = [&rng](int count) {
    Vector v(count);
    for (int j = 0; j < count; ++j) v[j] = rng.uniform(0.0, kTwoPi);
    return v;
  };
  csi.aoa_bs_ris = draw_angles(i);
  csi.aod_bs_ris = draw_angles(i);
  csi.aod_ris_user = draw_angles(k);
  csi.aod_bs_user = draw_angles(k);

  los_components(csi);
  return csi;
}

ChannelRealization sample_realization(const LongTermCsi& csi, Rng& rng) {
  ChannelRealization real;
  const auto [c_los, c_nlos] = rician_mix(csi.delta);
  const double root_kappa = std::sqrt(csi.kappa);
  real.G.resize(csi.n, csi.m);
  for (int m = 0; m < csi.m; ++m) {
    for (int n = 0; n < csi.n; ++n) {
      real.G(n, m) = root_kappa * (c_los * csi.g_bar_bs_ris(n, m) + c_nlos * rng.cnormal());
    }
  }
  real.g.reserve(csi.k);
  real.h.reserve(csi.k);
  for (int u = 0; u < csi.k; ++u) {
    real.g.push_back(sample_vector(csi.g_bar[u], csi.beta[u], csi.epsilon[u], rng));
  }
  for (int u = 0; u < csi.k; ++u) {
    real.h.push_back(sample_vector(csi.h_bar[u], csi.gamma[u], csi.eta[u], rng));
  }
  return real;
}

std::vector<ChannelRealization> generate_offline_dataset(const LongTermCsi& csi,
                                                         int t_count,
                                                         std::uint64_t seed) {
  if (t_count < 1) throw std::invalid_argument("generate_offline_dataset: T must be >= 1");
  std::vector<ChannelRealization> dataset;
  dataset.reserve(t_count);
  for (int t = 1; t <= t_count; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    ChannelRealization real = sample_realization(csi, rng);
    real.index = t;
    dataset.push_back(std::move(real));
  }
  return dataset;
}

void save_dataset(const std::filesystem::path& path,
                  const std::vector<ChannelRealization>& dataset) {
  if (dataset.empty()) throw std::invalid_argument("save_dataset: empty dataset");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_dataset: cannot open " + path.string());
  const auto& first = dataset.front();
  const std::uint64_t m = static_cast<std::uint64_t>(first.G.cols());
  const std::uint64_t n = static_cast<std::uint64_t>(first.G.rows());
  const std::uint64_t k = first.g.size();
  write_u64_le(os, m);
  write_u64_le(os, n);
  write_u64_le(os, k);
  write_u64_le(os, dataset.size());
  for (const auto& real : dataset) {
    for (Eigen::Index c = 0; c < real.G.cols(); ++c) {
      for (Eigen::Index r = 0; r < real.G.rows(); ++r) write_complex(os, real.G(r, c));
    }
    for (const auto& gk : real.g) {
      for (Eigen::Index r = 0; r < gk.size(); ++r) write_complex(os, gk[r]);
    }
    for (const auto& hk : real.h) {
      for (Eigen::Index r = 0; r < hk.size(); ++r) write_complex(os, hk[r]);
    }
  }
  if (!os) throw std::runtime_error("save_dataset: write failed for " + path.string());
}

std::vector<ChannelRealization> load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_dataset: cannot open " + path.string());
  const std::uint64_t m = read_u64_le(is);
  const std::uint64_t n = read_u64_le(is);
  const std::uint64_t k = read_u64_le(is);
  const std::uint64_t t_count = read_u64_le(is);
  if (!is || m == 0 || n == 0 || k == 0 || t_count == 0) {
    throw std::runtime_error("load_dataset: bad header in " + path.string());
  }
  std::vector<ChannelRealization> dataset;
  dataset.reserve(t_count);
  for (std::uint64_t t = 1; t <= t_count; ++t) {
    ChannelRealization real;
    real.index = static_cast<int>(t);
    real.G.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (Eigen::Index c = 0; c < real.G.cols(); ++c) {
      for (Eigen::Index r = 0; r < real.G.rows(); ++r) real.G(r, c) = read_complex(is);
    }
    real.g.resize(k);
    for (auto& gk : real.g) {
      gk.resize(static_cast<Eigen::Index>(n));
      for (Eigen::Index r = 0; r < gk.size(); ++r) gk[r] = read_complex(is);
    }
    real.h.resize(k);
    for (auto& hk : real.h) {
      hk.resize(static_cast<Eigen::Index>(m));
      for (Eigen::Index r = 0; r < hk.size(); ++r) hk[r] = read_complex(is);
    }
    if (!is) throw std::runtime_error("load_dataset: truncated file " + path.string());
    dataset.push_back(std::move(real));
  }
  return dataset;
}

}  // namespace rissim
