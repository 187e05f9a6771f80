#include "dezlab/numkit/optimizer.hpp"

#include "dezlab/numkit/kernels.hpp"

namespace dezlab::numkit {
namespace {

void check_finite(const NetParams& grads) {
  if (!grads.all_finite())
    throw NonFiniteError("non-finite gradient encountered");
}

void axpy_tensor(float alpha, const Tensor& x, Tensor& y) {
  active_kernels().axpy(alpha, x.ptr(), y.ptr(), y.data.size());
}

}  // namespace

void SgdOptimizer::step(NetParams& params, const NetParams& grads) {
  if (!params.shapes_match(grads))
    throw std::invalid_argument("gradient shapes do not mirror parameters");
  check_finite(grads);

  const float lr = static_cast<float>(lr_);
  if (momentum_ == 0.0) {
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
      if (params.weights[i].empty()) continue;
      axpy_tensor(-lr, grads.weights[i], params.weights[i]);
      axpy_tensor(-lr, grads.biases[i], params.biases[i]);
    }
    return;
  }

  if (!velocity_.shapes_match(params)) {
    velocity_ = params;
    velocity_.fill_zero();
  }
  const float mu = static_cast<float>(momentum_);
  auto apply = [&](Tensor& v, const Tensor& g, Tensor& w) {
    active_kernels().scale(v.ptr(), mu, v.data.size());
    axpy_tensor(1.0f, g, v);
    axpy_tensor(-lr, v, w);
  };
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    if (params.weights[i].empty()) continue;
    apply(velocity_.weights[i], grads.weights[i], params.weights[i]);
    apply(velocity_.biases[i], grads.biases[i], params.biases[i]);
  }
}

void soft_update(NetParams& target, const NetParams& train, double tau) {
  if (tau <= 0.0 || tau > 1.0)
    throw std::invalid_argument("tau must be in (0, 1]");
  if (!target.shapes_match(train))
    throw std::invalid_argument("target/train parameter shapes differ");

  const float t = static_cast<float>(tau);
  auto blend = [&](Tensor& dst, const Tensor& src) {
    if (dst.empty()) return;
    active_kernels().scale(dst.ptr(), 1.0f - t, dst.data.size());
    active_kernels().axpy(t, src.ptr(), dst.ptr(), dst.data.size());
  };
  for (std::size_t i = 0; i < target.weights.size(); ++i) {
    blend(target.weights[i], train.weights[i]);
    blend(target.biases[i], train.biases[i]);
  }
}

}  // namespace dezlab::numkit
