#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "rissim/mlp.hpp"

using namespace rissim;

namespace {

// Naive reference evaluator, written independently of Mlp::forward.
Vector naive_forward(const Mlp& net, const Vector& x) {
  std::vector<double> act(x.data(), x.data() + x.size());
  for (int l = 0; l < net.layer_count(); ++l) {
    const int out = net.dims[l + 1];
    const int in = net.dims[l];
    std::vector<double> next(out, 0.0);
    for (int r = 0; r < out; ++r) {
      double z = net.biases[l][r];
      for (int c = 0; c < in; ++c) z += net.weights[l](r, c) * act[c];
      const bool is_last = (l == net.layer_count() - 1);
      next[r] = (!is_last || net.output_activation == OutputActivation::kTanh) ? std::tanh(z) : z;
    }
    act = std::move(next);
  }
  Vector y(act.size());
  for (std::size_t i = 0; i < act.size(); ++i) y[i] = act[i];
  return y;
}

double objective(const Mlp& net, const Vector& x, const Vector& upstream) {
  return upstream.dot(net.forward(x));
}

// Central finite differences over every parameter and every input entry.
// Returns the maximum relative error against the analytic gradients.
double max_gradient_error(const Mlp& base, const Vector& x, const Vector& upstream,
                          double step = 1e-5) {
  ForwardCache cache;
  base.forward(x, &cache);
  const auto [grads, input_grad] = base.backward(cache, upstream);

  double worst = 0.0;
  auto update = [&worst](double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };

  Mlp net = base;
  for (int l = 0; l < net.layer_count(); ++l) {
    for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) {
        const double saved = net.weights[l](r, c);
        net.weights[l](r, c) = saved + step;
        const double hi = objective(net, x, upstream);
        net.weights[l](r, c) = saved - step;
        const double lo = objective(net, x, upstream);
        net.weights[l](r, c) = saved;
        update(grads.w[l](r, c), (hi - lo) / (2.0 * step));
      }
      const double saved = net.biases[l][r];
      net.biases[l][r] = saved + step;
      const double hi = objective(net, x, upstream);
      net.biases[l][r] = saved - step;
      const double lo = objective(net, x, upstream);
      net.biases[l][r] = saved;
      update(grads.b[l][r], (hi - lo) / (2.0 * step));
    }
  }
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = xp[i];
    xp[i] = saved + step;
    const double hi = objective(net, xp, upstream);
    xp[i] = saved - step;
    const double lo = objective(net, xp, upstream);
    xp[i] = saved;
    update(input_grad[i], (hi - lo) / (2.0 * step));
  }
  return worst;
}

}  // namespace

TEST_CASE("zero network with tanh output maps everything to zero") {
  const Mlp net = Mlp::zeros({3, 4, 2}, OutputActivation::kTanh);
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  CHECK(net.forward(x).norm() == 0.0);
}

TEST_CASE("identity single layer passes the input through") {
  Mlp net = Mlp::zeros({3, 3}, OutputActivation::kIdentity);
  net.weights[0] = Matrix::Identity(3, 3);
  Vector x(3);
  x << 0.25, -1.5, 3.0;
  CHECK((net.forward(x) - x).norm() == 0.0);
}

TEST_CASE("forward matches an independently coded naive evaluator") {
  Rng rng(201);
  for (OutputActivation act : {OutputActivation::kTanh, OutputActivation::kIdentity}) {
    const Mlp net = Mlp::random_init({5, 7, 3}, act, rng);
    for (int trial = 0; trial < 10; ++trial) {
      Vector x(5);
      for (int i = 0; i < 5; ++i) x[i] = rng.normal();
      CHECK((net.forward(x) - naive_forward(net, x)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("batch forward agrees with per-sample forward") {
  Rng rng(203);
  const Mlp net = Mlp::random_init({4, 6, 2}, OutputActivation::kTanh, rng);
  Matrix x(4, 5);
  for (int c = 0; c < 5; ++c) {
    for (int r = 0; r < 4; ++r) x(r, c) = rng.normal();
  }
  const Matrix y = net.forward(x);
  for (int c = 0; c < 5; ++c) {
    CHECK((y.col(c) - net.forward(Vector(x.col(c)))).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("forward is a pure function of parameters and input") {
  Rng rng(205);
  const Mlp net = Mlp::random_init({4, 8, 3}, OutputActivation::kTanh, rng);
  Vector x(4);
  for (int i = 0; i < 4; ++i) x[i] = rng.normal();
  const Vector a = net.forward(x);
  const Vector b = net.forward(x);
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("scalar tanh network gradients match closed-form calculus") {
  Mlp net = Mlp::zeros({1, 1}, OutputActivation::kTanh);
  net.weights[0](0, 0) = 0.5;
  Vector x(1);
  x << 1.0;
  ForwardCache cache;
  const Vector y = net.forward(x, &cache);
  CHECK(y[0] == doctest::Approx(std::tanh(0.5)).epsilon(1e-15));

  Vector upstream(1);
  upstream << 1.0;
  const auto [grads, input_grad] = net.backward(cache, upstream);
  const double sech2 = 1.0 - std::tanh(0.5) * std::tanh(0.5);
  CHECK(grads.w[0](0, 0) == doctest::Approx(1.0 * sech2).epsilon(1e-14));  // ~0.78644
  CHECK(input_grad[0] == doctest::Approx(0.5 * sech2).epsilon(1e-14));     // ~0.39322
}

TEST_CASE("zero output layer kills the input gradient and all upstream parameter gradients") {
  Rng rng(207);
  Mlp net = Mlp::random_init({4, 6, 2}, OutputActivation::kIdentity, rng);
  net.weights.back().setZero();
  Vector x(4);
  for (int i = 0; i < 4; ++i) x[i] = rng.normal();
  ForwardCache cache;
  net.forward(x, &cache);
  Vector upstream(2);
  upstream << 1.0, -2.0;
  const auto [grads, input_grad] = net.backward(cache, upstream);
  CHECK(input_grad.norm() == 0.0);
  CHECK(grads.w[0].norm() == 0.0);
  CHECK(grads.b[0].norm() == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(209);
  for (OutputActivation act : {OutputActivation::kTanh, OutputActivation::kIdentity}) {
    const Mlp net = Mlp::random_init({5, 8, 6, 3}, act, rng);
    Vector x(5), upstream(3);
    for (int i = 0; i < 5; ++i) x[i] = rng.normal();
    for (int i = 0; i < 3; ++i) upstream[i] = rng.normal();
    CHECK(max_gradient_error(net, x, upstream) < 1e-5);
  }
}

TEST_CASE("batch backward equals the sum of per-sample gradients") {
  Rng rng(211);
  const Mlp net = Mlp::random_init({3, 5, 2}, OutputActivation::kTanh, rng);
  const int batch = 4;
  Matrix x(3, batch), upstream(2, batch);
  for (int c = 0; c < batch; ++c) {
    for (int r = 0; r < 3; ++r) x(r, c) = rng.normal();
    for (int r = 0; r < 2; ++r) upstream(r, c) = rng.normal();
  }
  BatchCache cache;
  net.forward(x, &cache);
  const auto [grads, input_grads] = net.backward(cache, upstream);

  MlpGradients expected;
  expected.w = {Matrix::Zero(5, 3), Matrix::Zero(2, 5)};
  expected.b = {Vector::Zero(5), Vector::Zero(2)};
  for (int c = 0; c < batch; ++c) {
    ForwardCache single;
    net.forward(Vector(x.col(c)), &single);
    const auto [g, dx] = net.backward(single, Vector(upstream.col(c)));
    for (int l = 0; l < 2; ++l) {
      expected.w[l] += g.w[l];
      expected.b[l] += g.b[l];
    }
    CHECK((input_grads.col(c) - dx).cwiseAbs().maxCoeff() < 1e-12);
  }
  for (int l = 0; l < 2; ++l) {
    CHECK((grads.w[l] - expected.w[l]).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((grads.b[l] - expected.b[l]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("backward rejects a stale cache") {
  Rng rng(213);
  const Mlp small = Mlp::random_init({3, 4, 2}, OutputActivation::kTanh, rng);
  const Mlp other = Mlp::random_init({3, 5, 2}, OutputActivation::kTanh, rng);
  ForwardCache cache;
  small.forward(Vector::Zero(3), &cache);
  CHECK_THROWS_AS(other.backward(cache, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("optimizer leaves parameters unchanged for zero gradients") {
  Rng rng(215);
  Mlp net = Mlp::random_init({2, 3, 1}, OutputActivation::kIdentity, rng);
  const Mlp before = net;
  AdamOptimizer opt(net, 1e-3);
  MlpGradients zero;
  zero.w = {Matrix::Zero(3, 2), Matrix::Zero(1, 3)};
  zero.b = {Vector::Zero(3), Vector::Zero(1)};
  opt.step(net, zero);
  for (int l = 0; l < 2; ++l) {
    CHECK((net.weights[l] - before.weights[l]).norm() == 0.0);
    CHECK((net.biases[l] - before.biases[l]).norm() == 0.0);
  }
}

TEST_CASE("one optimizer step on f(w) = w^2 moves downhill") {
  Mlp net = Mlp::zeros({1, 1}, OutputActivation::kIdentity);
  net.weights[0](0, 0) = 1.0;
  AdamOptimizer opt(net, 1e-3);
  MlpGradients grads;
  grads.w = {Matrix::Constant(1, 1, 2.0)};  // d(w^2)/dw at w = 1
  grads.b = {Vector::Zero(1)};
  opt.step(net, grads);
  CHECK(net.weights[0](0, 0) < 1.0);
  CHECK(net.weights[0](0, 0) > 0.99);
}

TEST_CASE("optimizer trajectory is bit-identical across reruns") {
  auto run = [] {
    Rng rng(217);
    Mlp net = Mlp::random_init({3, 4, 2}, OutputActivation::kTanh, rng);
    AdamOptimizer opt(net, 1e-3);
    Vector x(3), upstream(2);
    for (int step = 0; step < 10; ++step) {
      for (int i = 0; i < 3; ++i) x[i] = rng.normal();
      for (int i = 0; i < 2; ++i) upstream[i] = rng.normal();
      ForwardCache cache;
      net.forward(x, &cache);
      auto [grads, dx] = net.backward(cache, upstream);
      opt.step(net, grads);
    }
    return net;
  };
  const Mlp a = run();
  const Mlp b = run();
  for (int l = 0; l < a.layer_count(); ++l) {
    CHECK((a.weights[l] - b.weights[l]).norm() == 0.0);
    CHECK((a.biases[l] - b.biases[l]).norm() == 0.0);
  }
}

TEST_CASE("optimizer aborts on non-finite gradients") {
  Rng rng(219);
  Mlp net = Mlp::random_init({2, 2}, OutputActivation::kIdentity, rng);
  AdamOptimizer opt(net, 1e-3);
  MlpGradients grads;
  grads.w = {Matrix::Constant(2, 2, std::nan(""))};
  grads.b = {Vector::Zero(2)};
  CHECK_THROWS_AS(opt.step(net, grads), std::runtime_error);
}

TEST_CASE("soft update endpoints and scalar arithmetic") {
  Rng rng(221);
  const Mlp source = Mlp::random_init({2, 3, 2}, OutputActivation::kTanh, rng);
  Mlp target = Mlp::random_init({2, 3, 2}, OutputActivation::kTanh, rng);

  Mlp copy = target;
  soft_update(copy, source, 1.0);
  for (int l = 0; l < 2; ++l) CHECK((copy.weights[l] - source.weights[l]).norm() == 0.0);

  copy = target;
  soft_update(copy, source, 0.0);
  for (int l = 0; l < 2; ++l) CHECK((copy.weights[l] - target.weights[l]).norm() == 0.0);

  Mlp zeros = Mlp::zeros({1, 1}, OutputActivation::kIdentity);
  Mlp ones = zeros;
  ones.weights[0](0, 0) = 1.0;
  soft_update(zeros, ones, 0.005);
  CHECK(zeros.weights[0](0, 0) == doctest::Approx(0.005).epsilon(1e-15));
}

TEST_CASE("two soft updates compose like one with the squared complement") {
  Rng rng(223);
  const Mlp source = Mlp::random_init({3, 4, 1}, OutputActivation::kIdentity, rng);
  Mlp twice = Mlp::random_init({3, 4, 1}, OutputActivation::kIdentity, rng);
  Mlp once = twice;
  const double eta = 0.1;
  soft_update(twice, source, eta);
  soft_update(twice, source, eta);
  soft_update(once, source, 1.0 - (1.0 - eta) * (1.0 - eta));
  for (int l = 0; l < 2; ++l) {
    CHECK((twice.weights[l] - once.weights[l]).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((twice.biases[l] - once.biases[l]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("soft update rejects mismatched architectures") {
  Mlp a = Mlp::zeros({2, 3}, OutputActivation::kTanh);
  const Mlp b = Mlp::zeros({2, 4}, OutputActivation::kTanh);
  CHECK_THROWS_AS(soft_update(a, b, 0.5), std::invalid_argument);
}

TEST_CASE("tanh-output networks stay strictly inside (-1, 1)") {
  Rng rng(225);
  for (int trial = 0; trial < 20; ++trial) {
    const Mlp net = Mlp::random_init({4, 16, 3}, OutputActivation::kTanh, rng);
    Vector x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.uniform(-50.0, 50.0);
    const Vector y = net.forward(x);
    for (int i = 0; i < 3; ++i) {
      CHECK(y[i] > -1.0);
      CHECK(y[i] < 1.0);
    }
  }
}

TEST_CASE("checkpoint files round-trip the full network") {
  Rng rng(227);
  const Mlp net = Mlp::random_init({6, 9, 4}, OutputActivation::kTanh, rng, 1e-3);
  const auto path = std::filesystem::temp_directory_path() / "rissim_mlp_test.ckpt";
  save_checkpoint(path, net);
  const Mlp loaded = load_checkpoint(path);
  CHECK(loaded.dims == net.dims);
  CHECK(loaded.output_activation == net.output_activation);
  for (int l = 0; l < net.layer_count(); ++l) {
    CHECK((loaded.weights[l] - net.weights[l]).norm() == 0.0);
    CHECK((loaded.biases[l] - net.biases[l]).norm() == 0.0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects garbage") {
  const auto path = std::filesystem::temp_directory_path() / "rissim_mlp_bad.ckpt";
  {
    std::ofstream os(path, std::ios::binary);
    os << "not a checkpoint";
  }
  CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("random initialization respects the fan-in bound and final layer scale") {
  Rng rng(229);
  const Mlp net = Mlp::random_init({16, 8, 4}, OutputActivation::kTanh, rng, 1e-3);
  CHECK(net.weights[0].cwiseAbs().maxCoeff() <= 1.0 / 4.0);
  CHECK(net.weights[1].cwiseAbs().maxCoeff() <= 1e-3 / std::sqrt(8.0));
  CHECK(net.weights[1].cwiseAbs().maxCoeff() > 0.0);
}
