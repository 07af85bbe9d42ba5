#include "rissim/rate.hpp"

#include <cmath>

namespace rissim {

CVector TxConfig::phase_vector() const {
  CVector phi(phase_angles.size());
  for (Eigen::Index n = 0; n < phase_angles.size(); ++n) {
    phi[n] = Complex(std::cos(phase_angles[n]), std::sin(phase_angles[n]));
  }
  return phi;
}

std::vector<CVector> effective_channel(const ChannelRealization& real,
                                       const Vector& phase_angles) {
  const Eigen::Index n = real.G.rows();
  if (phase_angles.size() != n) {
    throw std::invalid_argument("effective_channel: phase count != RIS elements");
  }
  CVector phi(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    phi[j] = Complex(std::cos(phase_angles[j]), std::sin(phase_angles[j]));
  }
  const std::size_t k = real.g.size();
  if (real.h.size() != k) throw std::invalid_argument("effective_channel: g/h user count mismatch");
  std::vector<CVector> v;
  v.reserve(k);
  for (std::size_t u = 0; u < k; ++u) {
    if (real.g[u].size() != n || real.h[u].size() != real.G.cols()) {
      throw std::invalid_argument("effective_channel: channel dimension mismatch");
    }
    // v_k = G^T (g_k .* phi) + h_k, i.e. v_k^T = g_k^T diag(phi) G + h_k^T.
    v.push_back(real.G.transpose() * real.g[u].cwiseProduct(phi) + real.h[u]);
  }
  return v;
}

Vector sinr(const ChannelRealization& real, const TxConfig& tx, double sigma2) {
  if (sigma2 <= 0.0) throw std::domain_error("sinr: sigma2 must be > 0");
  const auto v = effective_channel(real, tx.phase_angles);
  const Eigen::Index k = static_cast<Eigen::Index>(v.size());
  if (tx.W.cols() != k || tx.W.rows() != v.front().size()) {
    throw std::invalid_argument("sinr: precoder dimensions mismatch");
  }
  Vector out(k);
  for (Eigen::Index u = 0; u < k; ++u) {
    // Inner products v_u^T w_j for all j at once.
    const Eigen::RowVectorXcd p = v[u].transpose() * tx.W;
    double signal = std::norm(p[u]);
    double interference = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != u) interference += std::norm(p[j]);
    }
    out[u] = signal / (interference + sigma2);
  }
  return out;
}

double rate_from_sinr(double s) {
  if (s < 0.0) throw std::domain_error("rate_from_sinr: SINR must be >= 0");
  return std::log2(1.0 + s);
}

RateReport rate_report(const ChannelRealization& real, const TxConfig& tx,
                       double sigma2) {
  RateReport report;
  report.sinr = sinr(real, tx, sigma2);
  report.rate.resize(report.sinr.size());
  for (Eigen::Index u = 0; u < report.sinr.size(); ++u) {
    report.rate[u] = rate_from_sinr(report.sinr[u]);
  }
  report.min_rate = report.rate.minCoeff();
  return report;
}

double min_rate(const RateReport& report) {
  if (report.rate.size() == 0) throw std::invalid_argument("min_rate: empty report");
  return report.rate.minCoeff();
}

double pilot_overhead_factor(const OverheadParams& ov) {
  if (ov.tau_c < 1) throw std::invalid_argument("pilot_overhead_factor: tau_c must be >= 1");
  const double overhead = 2.0 * ov.k + ov.n - 1.0;
  return std::max(0.0, 1.0 - overhead / static_cast<double>(ov.tau_c));
}

Vector net_rate_instantaneous(const ChannelRealization& real, const TxConfig& tx,
                              double sigma2, const OverheadParams& ov) {
  const double factor = pilot_overhead_factor(ov);
  Vector rates = net_rate_longterm(real, tx, sigma2);
  return factor * rates;
}

Vector net_rate_longterm(const ChannelRealization& real, const TxConfig& tx,
                         double sigma2) {
  const Vector s = sinr(real, tx, sigma2);
  Vector rates(s.size());
  for (Eigen::Index u = 0; u < s.size(); ++u) rates[u] = rate_from_sinr(s[u]);
  return rates;
}

double ergodic_min_rate(const LongTermCsi& csi, const TxConfig& tx,
                        double sigma2, int n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw std::invalid_argument("ergodic_min_rate: n_mc must be >= 1");
  Vector sums = Vector::Zero(csi.k);
  for (int draw = 0; draw < n_mc; ++draw) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(draw)));
    const ChannelRealization real = sample_realization(csi, rng);
    sums += net_rate_longterm(real, tx, sigma2);
  }
  return (sums / static_cast<double>(n_mc)).minCoeff();
}

double min_avg_rate_on_set(const std::vector<ChannelRealization>& set,
                           const TxConfig& tx, double sigma2) {
  if (set.empty()) throw std::invalid_argument("min_avg_rate_on_set: empty set");
  Vector sums = Vector::Zero(static_cast<Eigen::Index>(set.front().g.size()));
  for (const auto& real : set) {
    sums += net_rate_longterm(real, tx, sigma2);
  }
  return (sums / static_cast<double>(set.size())).minCoeff();
}

}  // namespace rissim
