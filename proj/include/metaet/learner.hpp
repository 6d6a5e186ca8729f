#pragma once

#include <span>
#include <vector>

#include "metaet/dataset.hpp"
#include "metaet/rng.hpp"

namespace metaet {

/// Fully-connected architecture: input -> rectified hidden layers -> logits.
/// Parameters are flattened per layer as row-major weights then biases.
struct MlpShape {
  int input_dim = 0;
  std::vector<int> hidden;
  int output_dim = 0;

  int layer_count() const { return static_cast<int>(hidden.size()) + 1; }
  int layer_in(int l) const;
  int layer_out(int l) const;
  int weight_offset(int l) const;
  int bias_offset(int l) const;
  int param_count() const;
  int feature_dim() const {
    return hidden.empty() ? input_dim : hidden.back();
  }
};

struct LearnerParams {
  MlpShape shape;
  std::vector<double> theta;
};

/// Per-parameter inner-loop learning rates (a scalar in MAML mode is just
/// the same value broadcast everywhere).
struct InnerRates {
  std::vector<double> alpha;

  static InnerRates broadcast(double value, int param_count);
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Weights uniform in +-1/sqrt(fan_in), biases zero.
LearnerParams init_params(const MlpShape& shape, Rng& rng);

std::vector<double> forward(const LearnerParams& params,
                            std::span<const double> x);

/// Post-activation output of the last hidden layer (the g vectors consumed
/// by the hardness module). For a linear model this is the input itself.
std::vector<double> extract_features(const LearnerParams& params,
                                     std::span<const double> x);

/// Mean softmax cross-entropy over the batch and its exact gradient in theta.
LossGrad loss_and_grad(const LearnerParams& params, const LabeledBatch& batch);

/// Exact Hessian-vector product of the batch loss at theta (forward-over-
/// reverse with dual numbers).
std::vector<double> loss_hvp(const LearnerParams& params,
                             const LabeledBatch& batch,
                             std::span<const double> v);

/// One elementwise gradient step on the support batch:
/// theta' = theta - alpha (.) grad.
LearnerParams inner_update(const LearnerParams& params, const InnerRates& rates,
                           const LabeledBatch& support);

}  // namespace metaet
