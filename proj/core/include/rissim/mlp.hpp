#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "rissim/common.hpp"
#include "rissim/rng.hpp"

namespace rissim {

enum class OutputActivation { kIdentity, kTanh };

/// Post-activations recorded during a forward pass; acts[0] is the input,
/// acts[l+1] the output of layer l. Hidden layers are tanh throughout.
struct ForwardCache {
  std::vector<Vector> acts;
};

/// Batch variant; columns are samples.
struct BatchCache {
  std::vector<Matrix> acts;
};

struct MlpGradients {
  std::vector<Matrix> w;
  std::vector<Vector> b;

  double squared_norm() const;
  bool all_finite() const;
  MlpGradients& operator*=(double c);
};

/// Dense network with tanh hidden layers. weights[l] has shape
/// dims[l+1] x dims[l].
struct Mlp {
  std::vector<int> dims;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  OutputActivation output_activation = OutputActivation::kTanh;

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }

  /// All-zero parameters with the given layer sizes.
  static Mlp zeros(std::vector<int> dims, OutputActivation out_act);

  /// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) per layer; the last layer is
  /// additionally scaled by final_layer_scale (used to start policies near
  /// zero output).
  static Mlp random_init(std::vector<int> dims, OutputActivation out_act,
                         Rng& rng, double final_layer_scale = 1.0);

  Vector forward(const Vector& x, ForwardCache* cache = nullptr) const;
  Matrix forward(const Matrix& x, BatchCache* cache = nullptr) const;

  /// Reverse-mode gradients of dot(output, upstream) with respect to every
  /// parameter and to the input. The cache must come from a forward call on
  /// this architecture.
  std::pair<MlpGradients, Vector> backward(const ForwardCache& cache,
                                           const Vector& upstream) const;

  /// Batch variant: gradients of sum_i dot(output_i, upstream_i); also
  /// returns the per-sample input gradients (columns).
  std::pair<MlpGradients, Matrix> backward(const BatchCache& cache,
                                           const Matrix& upstream) const;

  bool all_finite() const;
};

/// Adaptive-moment optimizer state bound to one network's shapes.
class AdamOptimizer {
 public:
  AdamOptimizer(const Mlp& net, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);

  /// One descent step. Throws std::runtime_error on non-finite gradients or
  /// if parameters become non-finite.
  void step(Mlp& net, const MlpGradients& grads);

  long step_count() const { return step_count_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long step_count_ = 0;
  std::vector<Matrix> m_w_, v_w_;
  std::vector<Vector> m_b_, v_b_;
};

/// target <- eta * source + (1 - eta) * target, parameter-wise.
void soft_update(Mlp& target, const Mlp& source, double eta);

/// Binary checkpoint: magic "RSNN", one version byte, one output-activation
/// byte, layer dims, then parameters as little-endian doubles in layer order
/// (weights row-major, then bias, per layer).
void save_checkpoint(const std::filesystem::path& path, const Mlp& net);
Mlp load_checkpoint(const std::filesystem::path& path);

}  // namespace rissim
