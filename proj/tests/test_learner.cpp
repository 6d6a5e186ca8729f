#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "metaet/learner.hpp"
#include "metaet/rng.hpp"
#include "oracles.hpp"

using namespace metaet;

namespace {

MlpShape shape_of(int in, std::vector<int> hidden, int out) {
  MlpShape s;
  s.input_dim = in;
  s.hidden = std::move(hidden);
  s.output_dim = out;
  return s;
}

LabeledBatch random_batch(Rng& rng, int dim, int n_classes, int size) {
  LabeledBatch batch;
  batch.dim = dim;
  batch.n_classes = n_classes;
  for (int i = 0; i < size; ++i) {
    for (int f = 0; f < dim; ++f) {
      batch.features.push_back(2.0 * rng.next_double() - 1.0);
    }
    batch.labels.push_back(static_cast<int>(rng.next_below(
        static_cast<std::uint64_t>(n_classes))));
  }
  return batch;
}

}  // namespace

TEST_CASE("parameter layout and counts") {
  const MlpShape s = shape_of(16, {64, 32}, 5);
  CHECK(s.param_count() == 16 * 64 + 64 + 64 * 32 + 32 + 32 * 5 + 5);
  CHECK(s.feature_dim() == 32);
  CHECK(shape_of(4, {}, 3).param_count() == 4 * 3 + 3);
  CHECK(shape_of(4, {}, 3).feature_dim() == 4);
}

TEST_CASE("zero parameters give zero logits") {
  LearnerParams params;
  params.shape = shape_of(3, {4}, 2);
  params.theta.assign(static_cast<std::size_t>(params.shape.param_count()), 0.0);
  const auto logits = forward(params, std::vector<double>{1.0, -2.0, 0.5});
  CHECK(logits.size() == 2);
  CHECK(logits[0] == 0.0);
  CHECK(logits[1] == 0.0);
}

TEST_CASE("single linear layer reproduces a weight column plus bias") {
  LearnerParams params;
  params.shape = shape_of(3, {}, 2);
  // W row-major (2x3), then biases.
  params.theta = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.5, -0.5};
  const auto logits = forward(params, std::vector<double>{1.0, 0.0, 0.0});
  CHECK(logits[0] == doctest::Approx(1.5));
  CHECK(logits[1] == doctest::Approx(3.5));
}

TEST_CASE("forward is deterministic and validates dimensions") {
  Rng rng = Rng::keyed(1, 0);
  const LearnerParams params = init_params(shape_of(4, {8}, 3), rng);
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  CHECK(forward(params, x) == forward(params, x));
  CHECK_THROWS_AS(forward(params, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("init draws weights within the fan-in bound and zero biases") {
  Rng rng = Rng::keyed(2, 0);
  const MlpShape s = shape_of(9, {4}, 2);
  const LearnerParams params = init_params(s, rng);
  for (int i = 0; i < 4 * 9; ++i) {
    CHECK(std::abs(params.theta[static_cast<std::size_t>(s.weight_offset(0) + i)]) <=
          1.0 / 3.0);
  }
  for (int o = 0; o < 4; ++o) {
    CHECK(params.theta[static_cast<std::size_t>(s.bias_offset(0) + o)] == 0.0);
  }
}

TEST_CASE("extract_features returns the rectified last hidden activation") {
  const MlpShape s = shape_of(2, {3}, 2);
  LearnerParams params;
  params.shape = s;
  params.theta.assign(static_cast<std::size_t>(s.param_count()), 0.0);
  // Hidden biases -1, 0.5, 2: rectified to 0, 0.5, 2 on zero weights.
  params.theta[static_cast<std::size_t>(s.bias_offset(0) + 0)] = -1.0;
  params.theta[static_cast<std::size_t>(s.bias_offset(0) + 1)] = 0.5;
  params.theta[static_cast<std::size_t>(s.bias_offset(0) + 2)] = 2.0;
  const auto g = extract_features(params, std::vector<double>{1.0, 1.0});
  CHECK(g == std::vector<double>{0.0, 0.5, 2.0});
}

TEST_CASE("forward equals output layer applied to extracted features") {
  Rng rng = Rng::keyed(3, 0);
  const MlpShape s = shape_of(5, {7, 6}, 4);
  const LearnerParams params = init_params(s, rng);
  std::vector<double> x(5);
  for (auto& v : x) v = rng.next_double();

  const auto g = extract_features(params, x);
  CHECK(g.size() == 6);
  const auto logits = forward(params, x);
  const int l = s.layer_count() - 1;
  for (int o = 0; o < 4; ++o) {
    double expect = params.theta[static_cast<std::size_t>(s.bias_offset(l) + o)];
    for (int i = 0; i < 6; ++i) {
      expect += params.theta[static_cast<std::size_t>(s.weight_offset(l) + o * 6 + i)] *
                g[static_cast<std::size_t>(i)];
    }
    CHECK(logits[static_cast<std::size_t>(o)] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("uniform logits give ln(N) loss") {
  LearnerParams params;
  params.shape = shape_of(3, {}, 5);
  params.theta.assign(static_cast<std::size_t>(params.shape.param_count()), 0.0);
  LabeledBatch batch;
  batch.dim = 3;
  batch.n_classes = 5;
  batch.features = {0.3, -0.7, 0.2};
  batch.labels = {2};
  const auto lg = loss_and_grad(params, batch);
  CHECK(lg.loss == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("saturated correct logits drive the loss to zero") {
  LearnerParams params;
  params.shape = shape_of(1, {}, 2);
  params.theta = {50.0, -50.0, 0.0, 0.0};  // scores +-50 for x=1
  LabeledBatch batch;
  batch.dim = 1;
  batch.n_classes = 2;
  batch.features = {1.0};
  batch.labels = {0};
  CHECK(loss_and_grad(params, batch).loss < 1e-12);
}

TEST_CASE("loss is invariant to a constant logit shift") {
  Rng rng = Rng::keyed(4, 0);
  const MlpShape s = shape_of(3, {}, 4);
  LearnerParams params = init_params(s, rng);
  const LabeledBatch batch = random_batch(rng, 3, 4, 6);
  const double base = loss_and_grad(params, batch).loss;
  // Shifting every output bias by a constant shifts all logits equally.
  for (int o = 0; o < 4; ++o) {
    params.theta[static_cast<std::size_t>(s.bias_offset(0) + o)] += 3.7;
  }
  CHECK(std::abs(loss_and_grad(params, batch).loss - base) < 1e-10);
}

TEST_CASE("labels out of range are rejected") {
  Rng rng = Rng::keyed(5, 0);
  const LearnerParams params = init_params(shape_of(2, {}, 3), rng);
  LabeledBatch batch;
  batch.dim = 2;
  batch.n_classes = 3;
  batch.features = {0.0, 0.0};
  batch.labels = {3};
  CHECK_THROWS_AS(loss_and_grad(params, batch), std::invalid_argument);
  batch.labels = {-1};
  CHECK_THROWS_AS(loss_and_grad(params, batch), std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng = Rng::keyed(6, 0);
  int checked = 0;
  for (int config = 0; config < 50; ++config) {
    const int dim = 2 + static_cast<int>(rng.next_below(3));
    const int n_out = 2 + static_cast<int>(rng.next_below(3));
    std::vector<int> hidden;
    const int layers = static_cast<int>(rng.next_below(3));
    for (int l = 0; l < layers; ++l) {
      hidden.push_back(2 + static_cast<int>(rng.next_below(5)));
    }
    const MlpShape s = shape_of(dim, hidden, n_out);
    // Fully random parameters (biases included) keep pre-activations away
    // from the rectifier kink, where finite differences are undefined.
    LearnerParams params;
    params.shape = s;
    params.theta.resize(static_cast<std::size_t>(s.param_count()));
    for (auto& t : params.theta) t = rng.next_double() - 0.5;
    const LabeledBatch batch = random_batch(rng, dim, n_out, 4);

    const auto lg = loss_and_grad(params, batch);
    const auto fd = oracles::finite_diff(
        params.theta, 1e-5, [&](const std::vector<double>& theta) {
          LearnerParams p = params;
          p.theta = theta;
          return loss_and_grad(p, batch).loss;
        });
    for (std::size_t i = 0; i < fd.size(); ++i) {
      if (std::abs(fd[i]) < 1e-7 && std::abs(lg.grad[i]) < 1e-7) continue;
      CHECK(oracles::rel_error(lg.grad[i], fd[i]) < 1e-4);
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("hessian-vector products match finite differences of the gradient") {
  Rng rng = Rng::keyed(7, 0);
  for (int config = 0; config < 10; ++config) {
    const MlpShape s = shape_of(3, {4}, 3);
    const LearnerParams params = init_params(s, rng);
    const LabeledBatch batch = random_batch(rng, 3, 3, 5);
    std::vector<double> v(params.theta.size());
    for (auto& x : v) x = 2.0 * rng.next_double() - 1.0;

    const auto hv = loss_hvp(params, batch, v);

    // (grad(theta + eps v) - grad(theta - eps v)) / (2 eps)
    const double eps = 1e-6;
    LearnerParams up = params, down = params;
    for (std::size_t i = 0; i < v.size(); ++i) {
      up.theta[i] += eps * v[i];
      down.theta[i] -= eps * v[i];
    }
    const auto gu = loss_and_grad(up, batch).grad;
    const auto gd = loss_and_grad(down, batch).grad;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double fd = (gu[i] - gd[i]) / (2.0 * eps);
      if (std::abs(fd) < 1e-6 && std::abs(hv[i]) < 1e-6) continue;
      CHECK(oracles::rel_error(hv[i], fd) < 1e-3);
    }
  }
}

TEST_CASE("inner_update arithmetic") {
  LearnerParams params;
  params.shape = shape_of(1, {}, 2);
  params.theta = {1.0, -1.0, 0.0, 0.0};
  LabeledBatch batch;
  batch.dim = 1;
  batch.n_classes = 2;
  batch.features = {1.0};
  batch.labels = {0};

  SUBCASE("alpha of zero is a no-op") {
    const auto adapted =
        inner_update(params, InnerRates::broadcast(0.0, 4), batch);
    CHECK(adapted.theta == params.theta);
  }
  SUBCASE("one explicit elementwise step") {
    const auto lg = loss_and_grad(params, batch);
    const auto adapted =
        inner_update(params, InnerRates::broadcast(0.1, 4), batch);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(adapted.theta[i] ==
            doctest::Approx(params.theta[i] - 0.1 * lg.grad[i]).epsilon(1e-12));
    }
  }
  SUBCASE("zero gradient keeps parameters") {
    // Two samples with opposite labels and the same input make the
    // uniform-logit point stationary in the weights.
    LearnerParams flat = params;
    flat.theta = {0.0, 0.0, 0.0, 0.0};
    LabeledBatch sym;
    sym.dim = 1;
    sym.n_classes = 2;
    sym.features = {1.0, 1.0};
    sym.labels = {0, 1};
    const auto adapted =
        inner_update(flat, InnerRates::broadcast(0.5, 4), sym);
    CHECK(adapted.theta == flat.theta);
  }
}

TEST_CASE("a small inner step does not increase support loss") {
  Rng rng = Rng::keyed(8, 0);
  for (int config = 0; config < 20; ++config) {
    const int dim = 2 + static_cast<int>(rng.next_below(3));
    const int n_out = 2 + static_cast<int>(rng.next_below(3));
    const MlpShape s = shape_of(dim, {5}, n_out);
    const LearnerParams params = init_params(s, rng);
    const LabeledBatch batch = random_batch(rng, dim, n_out, 6);

    const double before = loss_and_grad(params, batch).loss;
    const auto adapted =
        inner_update(params, InnerRates::broadcast(1e-4, s.param_count()), batch);
    const double after = loss_and_grad(adapted, batch).loss;
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("inner_update rejects negative rates") {
  Rng rng = Rng::keyed(9, 0);
  const LearnerParams params = init_params(shape_of(2, {}, 2), rng);
  LabeledBatch batch;
  batch.dim = 2;
  batch.n_classes = 2;
  batch.features = {1.0, 0.0};
  batch.labels = {0};
  CHECK_THROWS_AS(
      inner_update(params, InnerRates::broadcast(-0.1, 6), batch),
      std::invalid_argument);
}
