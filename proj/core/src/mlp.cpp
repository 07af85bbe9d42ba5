#include "rissim/mlp.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace rissim {

namespace {

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("Mlp: all layer dims must be >= 1");
  }
}

void write_u64_le(std::ofstream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::ifstream& is) {
  unsigned char buf[8] = {};
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

constexpr char kMagic[4] = {'R', 'S', 'N', 'N'};
constexpr unsigned char kVersion = 1;

}  // namespace

double MlpGradients::squared_norm() const {
  double total = 0.0;
  for (const auto& g : w) total += g.squaredNorm();
  for (const auto& g : b) total += g.squaredNorm();
  return total;
}

bool MlpGradients::all_finite() const {
  for (const auto& g : w) {
    if (!g.allFinite()) return false;
  }
  for (const auto& g : b) {
    if (!g.allFinite()) return false;
  }
  return true;
}

MlpGradients& MlpGradients::operator*=(double c) {
  for (auto& g : w) g *= c;
  for (auto& g : b) g *= c;
  return *this;
}

Mlp Mlp::zeros(std::vector<int> dims, OutputActivation out_act) {
  check_dims(dims);
  Mlp net;
  net.dims = std::move(dims);
  net.output_activation = out_act;
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    net.weights.emplace_back(Matrix::Zero(net.dims[l + 1], net.dims[l]));
    net.biases.emplace_back(Vector::Zero(net.dims[l + 1]));
  }
  return net;
}

Mlp Mlp::random_init(std::vector<int> dims, OutputActivation out_act, Rng& rng,
                     double final_layer_scale) {
  Mlp net = zeros(std::move(dims), out_act);
  const int layers = net.layer_count();
  for (int l = 0; l < layers; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.dims[l]));
    const double scale = (l == layers - 1) ? final_layer_scale : 1.0;
    for (Eigen::Index i = 0; i < net.weights[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < net.weights[l].cols(); ++j) {
        net.weights[l](i, j) = scale * rng.uniform(-bound, bound);
      }
      net.biases[l][i] = scale * rng.uniform(-bound, bound);
    }
  }
  return net;
}

Vector Mlp::forward(const Vector& x, ForwardCache* cache) const {
  if (x.size() != input_dim()) throw std::invalid_argument("Mlp::forward: input dim mismatch");
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(x);
  }
  Vector a = x;
  const int layers = layer_count();
  for (int l = 0; l < layers; ++l) {
    Vector z = weights[l] * a + biases[l];
    if (l + 1 < layers || output_activation == OutputActivation::kTanh) {
      a = z.array().tanh();
    } else {
      a = std::move(z);
    }
    if (cache) cache->acts.push_back(a);
  }
  return a;
}

Matrix Mlp::forward(const Matrix& x, BatchCache* cache) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input dim mismatch");
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(x);
  }
  Matrix a = x;
  const int layers = layer_count();
  for (int l = 0; l < layers; ++l) {
    Matrix z = (weights[l] * a).colwise() + biases[l];
    if (l + 1 < layers || output_activation == OutputActivation::kTanh) {
      a = z.array().tanh();
    } else {
      a = std::move(z);
    }
    if (cache) cache->acts.push_back(a);
  }
  return a;
}

std::pair<MlpGradients, Vector> Mlp::backward(const ForwardCache& cache,
                                              const Vector& upstream) const {
  const int layers = layer_count();
  if (static_cast<int>(cache.acts.size()) != layers + 1) {
    throw std::invalid_argument("Mlp::backward: stale or foreign cache");
  }
  for (int l = 0; l <= layers; ++l) {
    if (cache.acts[l].size() != dims[l]) {
      throw std::invalid_argument("Mlp::backward: stale or foreign cache");
    }
  }
  if (upstream.size() != output_dim()) {
    throw std::invalid_argument("Mlp::backward: upstream dim mismatch");
  }

  MlpGradients grads;
  grads.w.resize(layers);
  grads.b.resize(layers);

  Vector delta;
  if (output_activation == OutputActivation::kTanh) {
    delta = upstream.cwiseProduct(Vector::Ones(output_dim()) - cache.acts[layers].cwiseAbs2());
  } else {
    delta = upstream;
  }
  for (int l = layers - 1; l >= 0; --l) {
    grads.w[l] = delta * cache.acts[l].transpose();
    grads.b[l] = delta;
    Vector prev = weights[l].transpose() * delta;
    if (l > 0) {
      prev = prev.cwiseProduct(Vector::Ones(dims[l]) - cache.acts[l].cwiseAbs2());
    }
    delta = std::move(prev);
  }
  return {std::move(grads), std::move(delta)};
}

std::pair<MlpGradients, Matrix> Mlp::backward(const BatchCache& cache,
                                              const Matrix& upstream) const {
  const int layers = layer_count();
  if (static_cast<int>(cache.acts.size()) != layers + 1) {
    throw std::invalid_argument("Mlp::backward: stale or foreign cache");
  }
  const Eigen::Index batch = cache.acts[0].cols();
  for (int l = 0; l <= layers; ++l) {
    if (cache.acts[l].rows() != dims[l] || cache.acts[l].cols() != batch) {
      throw std::invalid_argument("Mlp::backward: stale or foreign cache");
    }
  }
  if (upstream.rows() != output_dim() || upstream.cols() != batch) {
    throw std::invalid_argument("Mlp::backward: upstream shape mismatch");
  }

  MlpGradients grads;
  grads.w.resize(layers);
  grads.b.resize(layers);

  Matrix delta;
  if (output_activation == OutputActivation::kTanh) {
    delta = upstream.cwiseProduct(
        (Matrix::Ones(output_dim(), batch) - cache.acts[layers].cwiseAbs2()));
  } else {
    delta = upstream;
  }
  for (int l = layers - 1; l >= 0; --l) {
    grads.w[l] = delta * cache.acts[l].transpose();
    grads.b[l] = delta.rowwise().sum();
    Matrix prev = weights[l].transpose() * delta;
    if (l > 0) {
      prev = prev.cwiseProduct(Matrix::Ones(dims[l], batch) - cache.acts[l].cwiseAbs2());
    }
    delta = std::move(prev);
  }
  return {std::move(grads), std::move(delta)};
}

bool Mlp::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

AdamOptimizer::AdamOptimizer(const Mlp& net, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (const auto& w : net.weights) {
    m_w_.emplace_back(Matrix::Zero(w.rows(), w.cols()));
    v_w_.emplace_back(Matrix::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : net.biases) {
    m_b_.emplace_back(Vector::Zero(b.size()));
    v_b_.emplace_back(Vector::Zero(b.size()));
  }
}

void AdamOptimizer::step(Mlp& net, const MlpGradients& grads) {
  if (grads.w.size() != net.weights.size() || grads.b.size() != net.biases.size()) {
    throw std::invalid_argument("AdamOptimizer::step: gradient shape mismatch");
  }
  if (!grads.all_finite()) {
    throw std::runtime_error("AdamOptimizer::step: non-finite gradient, aborting training");
  }
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    m_w_[l] = beta1_ * m_w_[l] + (1.0 - beta1_) * grads.w[l];
    v_w_[l] = beta2_ * v_w_[l] + (1.0 - beta2_) * grads.w[l].cwiseAbs2();
    net.weights[l].array() -=
        lr_ * (m_w_[l].array() / bc1) / ((v_w_[l].array() / bc2).sqrt() + eps_);

    m_b_[l] = beta1_ * m_b_[l] + (1.0 - beta1_) * grads.b[l];
    v_b_[l] = beta2_ * v_b_[l] + (1.0 - beta2_) * grads.b[l].cwiseAbs2();
    net.biases[l].array() -=
        lr_ * (m_b_[l].array() / bc1) / ((v_b_[l].array() / bc2).sqrt() + eps_);
  }
  if (!net.all_finite()) {
    throw std::runtime_error("AdamOptimizer::step: parameters became non-finite");
  }
}

void soft_update(Mlp& target, const Mlp& source, double eta) {
  if (target.dims != source.dims || target.output_activation != source.output_activation) {
    throw std::invalid_argument("soft_update: architecture mismatch");
  }
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = eta * source.weights[l] + (1.0 - eta) * target.weights[l];
    target.biases[l] = eta * source.biases[l] + (1.0 - eta) * target.biases[l];
  }
}

void save_checkpoint(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
  os.write(kMagic, 4);
  os.put(static_cast<char>(kVersion));
  os.put(net.output_activation == OutputActivation::kTanh ? 1 : 0);
  write_u64_le(os, net.dims.size());
  for (int d : net.dims) write_u64_le(os, static_cast<std::uint64_t>(d));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const Matrix& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) write_f64_le(os, w(r, c));
    }
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) {
      write_f64_le(os, net.biases[l][r]);
    }
  }
  if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("load_checkpoint: bad magic in " + path.string());
  }
  const int version = is.get();
  if (version != kVersion) throw std::runtime_error("load_checkpoint: unsupported version");
  const int act = is.get();
  const std::uint64_t dim_count = read_u64_le(is);
  if (!is || dim_count < 2 || dim_count > 64) {
    throw std::runtime_error("load_checkpoint: bad layer count");
  }
  std::vector<int> dims(dim_count);
  for (auto& d : dims) d = static_cast<int>(read_u64_le(is));
  Mlp net = Mlp::zeros(dims, act == 1 ? OutputActivation::kTanh : OutputActivation::kIdentity);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Matrix& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = read_f64_le(is);
    }
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) {
      net.biases[l][r] = read_f64_le(is);
    }
  }
  if (!is) throw std::runtime_error("load_checkpoint: truncated file " + path.string());
  return net;
}

}  // namespace rissim
