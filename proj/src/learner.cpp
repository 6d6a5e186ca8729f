#include "metaet/learner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "metaet/dual.hpp"

namespace metaet {

int MlpShape::layer_in(int l) const {
  return l == 0 ? input_dim : hidden[static_cast<std::size_t>(l - 1)];
}

int MlpShape::layer_out(int l) const {
  return l == layer_count() - 1 ? output_dim
                                : hidden[static_cast<std::size_t>(l)];
}

int MlpShape::weight_offset(int l) const {
  int off = 0;
  for (int i = 0; i < l; ++i) off += layer_out(i) * (layer_in(i) + 1);
  return off;
}

int MlpShape::bias_offset(int l) const {
  return weight_offset(l) + layer_out(l) * layer_in(l);
}

int MlpShape::param_count() const {
  return weight_offset(layer_count());
}

InnerRates InnerRates::broadcast(double value, int param_count) {
  InnerRates rates;
  rates.alpha.assign(static_cast<std::size_t>(param_count), value);
  return rates;
}

namespace {

void check_shape(const LearnerParams& params) {
  if (params.shape.input_dim < 1 || params.shape.output_dim < 1) {
    throw std::invalid_argument("learner needs input_dim, output_dim >= 1");
  }
  for (const int h : params.shape.hidden) {
    if (h < 1) throw std::invalid_argument("hidden widths must be >= 1");
  }
  if (static_cast<int>(params.theta.size()) != params.shape.param_count()) {
    throw std::invalid_argument(
        "theta has " + std::to_string(params.theta.size()) +
        " entries, architecture needs " +
        std::to_string(params.shape.param_count()));
  }
}

void check_input(const MlpShape& shape, std::size_t x_size) {
  if (x_size != static_cast<std::size_t>(shape.input_dim)) {
    throw std::invalid_argument("input has dimension " +
                                std::to_string(x_size) + ", expected " +
                                std::to_string(shape.input_dim));
  }
}

// Per-sample forward pass into pre-allocated activation buffers.
// acts[0] is the input; acts[l+1] the post-activation output of layer l
// (rectified for hidden layers, raw logits for the last).
template <typename S>
void forward_pass(const MlpShape& shape, const std::vector<S>& theta,
                  std::span<const double> x,
                  std::vector<std::vector<S>>& acts) {
  const int layers = shape.layer_count();
  acts.resize(static_cast<std::size_t>(layers) + 1);
  acts[0].assign(x.begin(), x.end());
  for (int l = 0; l < layers; ++l) {
    const int in = shape.layer_in(l);
    const int out = shape.layer_out(l);
    const S* w = theta.data() + shape.weight_offset(l);
    const S* b = theta.data() + shape.bias_offset(l);
    auto& y = acts[static_cast<std::size_t>(l) + 1];
    y.assign(static_cast<std::size_t>(out), S(0.0));
    const auto& in_act = acts[static_cast<std::size_t>(l)];
    for (int o = 0; o < out; ++o) {
      S s = b[o];
      const S* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) s += row[i] * in_act[static_cast<std::size_t>(i)];
      if (l < layers - 1 && value_of(s) <= 0.0) s = S(0.0);
      y[static_cast<std::size_t>(o)] = s;
    }
  }
}

// Mean softmax cross-entropy with exact reverse-mode gradient, generic over
// the scalar so the same code yields Hessian-vector products via Dual.
template <typename S>
S loss_and_grad_impl(const MlpShape& shape, const std::vector<S>& theta,
                     const LabeledBatch& batch, std::vector<S>& grad) {
  using std::exp;
  using std::log;
  const int layers = shape.layer_count();
  const int n_out = shape.output_dim;
  const int batch_size = batch.size();
  if (batch_size == 0) throw std::invalid_argument("empty batch");

  grad.assign(theta.size(), S(0.0));
  S loss(0.0);

  std::vector<std::vector<S>> acts;
  std::vector<std::vector<S>> delta(static_cast<std::size_t>(layers) + 1);

  for (int s_idx = 0; s_idx < batch_size; ++s_idx) {
    const int label = batch.labels[static_cast<std::size_t>(s_idx)];
    if (label < 0 || label >= n_out) {
      throw std::invalid_argument("label " + std::to_string(label) +
                                  " out of range for " + std::to_string(n_out) +
                                  " outputs");
    }
    forward_pass(shape, theta, batch.row(s_idx), acts);
    const auto& logits = acts[static_cast<std::size_t>(layers)];

    // Stable softmax: shift by the max logit (chosen by value part).
    S max_logit = logits[0];
    for (int o = 1; o < n_out; ++o) {
      if (logits[static_cast<std::size_t>(o)] > max_logit) {
        max_logit = logits[static_cast<std::size_t>(o)];
      }
    }
    S sum_exp(0.0);
    auto& dl = delta[static_cast<std::size_t>(layers)];
    dl.assign(static_cast<std::size_t>(n_out), S(0.0));
    for (int o = 0; o < n_out; ++o) {
      dl[static_cast<std::size_t>(o)] = exp(logits[static_cast<std::size_t>(o)] - max_logit);
      sum_exp += dl[static_cast<std::size_t>(o)];
    }
    loss += log(sum_exp) + max_logit - logits[static_cast<std::size_t>(label)];
    for (int o = 0; o < n_out; ++o) {
      dl[static_cast<std::size_t>(o)] = dl[static_cast<std::size_t>(o)] / sum_exp;
    }
    dl[static_cast<std::size_t>(label)] -= S(1.0);

    // Backward through the layers.
    for (int l = layers - 1; l >= 0; --l) {
      const int in = shape.layer_in(l);
      const int out = shape.layer_out(l);
      const S* w = theta.data() + shape.weight_offset(l);
      S* gw = grad.data() + shape.weight_offset(l);
      S* gb = grad.data() + shape.bias_offset(l);
      const auto& in_act = acts[static_cast<std::size_t>(l)];
      const auto& d_out = delta[static_cast<std::size_t>(l) + 1];

      auto& d_in = delta[static_cast<std::size_t>(l)];
      if (l > 0) d_in.assign(static_cast<std::size_t>(in), S(0.0));

      for (int o = 0; o < out; ++o) {
        const S g = d_out[static_cast<std::size_t>(o)];
        gb[o] += g;
        S* gw_row = gw + static_cast<std::size_t>(o) * in;
        const S* w_row = w + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) {
          gw_row[i] += g * in_act[static_cast<std::size_t>(i)];
          if (l > 0) d_in[static_cast<std::size_t>(i)] += g * w_row[i];
        }
      }
      if (l > 0) {
        // Gate by the rectifier: the hidden activation is zero exactly
        // where the pre-activation was clamped.
        for (int i = 0; i < in; ++i) {
          if (value_of(in_act[static_cast<std::size_t>(i)]) <= 0.0) {
            d_in[static_cast<std::size_t>(i)] = S(0.0);
          }
        }
      }
    }
  }

  const S scale(1.0 / batch_size);
  loss *= scale;
  for (auto& g : grad) g *= scale;
  return loss;
}

}  // namespace

LearnerParams init_params(const MlpShape& shape, Rng& rng) {
  LearnerParams params;
  params.shape = shape;
  params.theta.assign(static_cast<std::size_t>(shape.param_count()), 0.0);
  for (int l = 0; l < shape.layer_count(); ++l) {
    const int in = shape.layer_in(l);
    const int out = shape.layer_out(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    double* w = params.theta.data() + shape.weight_offset(l);
    for (int i = 0; i < out * in; ++i) {
      w[i] = (2.0 * rng.next_double() - 1.0) * bound;
    }
    // biases stay zero
  }
  check_shape(params);
  return params;
}

std::vector<double> forward(const LearnerParams& params,
                            std::span<const double> x) {
  check_shape(params);
  check_input(params.shape, x.size());
  std::vector<std::vector<double>> acts;
  forward_pass(params.shape, params.theta, x, acts);
  return acts.back();
}

std::vector<double> extract_features(const LearnerParams& params,
                                     std::span<const double> x) {
  check_shape(params);
  check_input(params.shape, x.size());
  if (params.shape.hidden.empty()) {
    return std::vector<double>(x.begin(), x.end());
  }
  std::vector<std::vector<double>> acts;
  forward_pass(params.shape, params.theta, x, acts);
  return acts[acts.size() - 2];
}

LossGrad loss_and_grad(const LearnerParams& params, const LabeledBatch& batch) {
  check_shape(params);
  if (batch.dim != params.shape.input_dim) {
    throw std::invalid_argument("batch dimension mismatch");
  }
  LossGrad out;
  out.loss = loss_and_grad_impl(params.shape, params.theta, batch, out.grad);
  return out;
}

std::vector<double> loss_hvp(const LearnerParams& params,
                             const LabeledBatch& batch,
                             std::span<const double> v) {
  check_shape(params);
  if (v.size() != params.theta.size()) {
    throw std::invalid_argument("hvp direction has wrong length");
  }
  std::vector<Dual> theta(params.theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = Dual(params.theta[i], v[i]);
  }
  std::vector<Dual> grad;
  loss_and_grad_impl(params.shape, theta, batch, grad);
  std::vector<double> hv(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) hv[i] = grad[i].t;
  return hv;
}

LearnerParams inner_update(const LearnerParams& params, const InnerRates& rates,
                           const LabeledBatch& support) {
  if (rates.alpha.size() != params.theta.size()) {
    throw std::invalid_argument("alpha has wrong length");
  }
  for (const double a : rates.alpha) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("inner rates must be finite and >= 0");
    }
  }
  const LossGrad lg = loss_and_grad(params, support);
  LearnerParams adapted = params;
  for (std::size_t i = 0; i < adapted.theta.size(); ++i) {
    adapted.theta[i] -= rates.alpha[i] * lg.grad[i];
  }
  return adapted;
}

}  // namespace metaet
