#pragma once

#include "dezlab/numkit/layers.hpp"

namespace dezlab::numkit {

// Thrown when a training step produces NaN/Inf; the runner turns it into an
// aborted-run diagnostic record.
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One plain SGD step: w -= lr * g. Momentum is available behind a config
// flag but defaults off.
class SgdOptimizer {
 public:
  explicit SgdOptimizer(double lr, double momentum = 0.0)
      : lr_(lr), momentum_(momentum) {
    if (lr <= 0.0) throw std::invalid_argument("learning rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0)
      throw std::invalid_argument("momentum must be in [0, 1)");
  }

  double lr() const { return lr_; }

  // Throws NonFiniteError when grads contain NaN/Inf.
  void step(NetParams& params, const NetParams& grads);

 private:
  double lr_;
  double momentum_;
  NetParams velocity_;  // lazily sized on first step when momentum > 0
};

// target <- tau*train + (1-tau)*target, elementwise. tau in (0, 1].
void soft_update(NetParams& target, const NetParams& train, double tau);

}  // namespace dezlab::numkit
