#include "dezlab/qlearner/qlearner.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "dezlab/numkit/kernels.hpp"

namespace dezlab::qlearner {

using numkit::BackpropResult;
using numkit::ForwardCache;
using numkit::forward;

MultiHeadNet::MultiHeadNet(std::vector<LayerSpec> trunk,
                           std::vector<int> obs_shape, int num_heads,
                           int num_actions, RngStream& rng)
    : trunk_(std::move(trunk)),
      obs_shape_(std::move(obs_shape)),
      num_actions_(num_actions) {
  if (num_heads < 1) throw std::invalid_argument("need at least one head");
  if (num_actions < 1) throw std::invalid_argument("need at least one action");

  trunk_out_shape_ = numkit::chain_output_shape(trunk_, obs_shape_);
  const int trunk_out =
      static_cast<int>(numkit::numel(trunk_out_shape_));
  head_spec_ = {LayerSpec::dense(trunk_out, num_actions_)};

  trunk_train_ = numkit::init_params<float>(trunk_, obs_shape_, rng);
  trunk_target_ = trunk_train_;
  for (int h = 0; h < num_heads; ++h) {
    head_train_.push_back(
        numkit::init_params<float>(head_spec_, trunk_out_shape_, rng));
    head_target_.push_back(head_train_.back());
  }
  head_reads_.assign(num_heads, 0);
}

std::vector<float> MultiHeadNet::q_values(const Tensor& obs, int head,
                                          bool use_target) const {
  if (head < 0 || head >= num_heads())
    throw std::invalid_argument("head index out of range");
  if (obs.shape != obs_shape_)
    throw std::invalid_argument("observation shape mismatch: got " +
                                numkit::shape_str(obs.shape));
  head_reads_[head] += 1;

  std::vector<int> batched_shape = {1};
  batched_shape.insert(batched_shape.end(), obs.shape.begin(),
                       obs.shape.end());
  const Tensor input(batched_shape, obs.data);

  const NetParams& trunk_p = use_target ? trunk_target_ : trunk_train_;
  const NetParams& head_p =
      use_target ? head_target_[head] : head_train_[head];
  const Tensor feats = forward(trunk_, trunk_p, input);
  const Tensor q = forward(head_spec_, head_p, feats);
  return q.data;
}

void MultiHeadNet::hard_update_target() {
  trunk_target_ = trunk_train_;
  head_target_ = head_train_;
}

void MultiHeadNet::soft_update_target(double tau) {
  numkit::soft_update(trunk_target_, trunk_train_, tau);
  for (int h = 0; h < num_heads(); ++h)
    numkit::soft_update(head_target_[h], head_train_[h], tau);
}

std::vector<LayerSpec> MultiHeadNet::checkpoint_chain() const {
  std::vector<LayerSpec> chain = trunk_;
  for (int h = 0; h < num_heads(); ++h)
    chain.insert(chain.end(), head_spec_.begin(), head_spec_.end());
  return chain;
}

NetParams MultiHeadNet::checkpoint_params() const {
  NetParams flat;
  auto append = [&flat](const NetParams& p) {
    flat.weights.insert(flat.weights.end(), p.weights.begin(),
                        p.weights.end());
    flat.biases.insert(flat.biases.end(), p.biases.begin(), p.biases.end());
  };
  append(trunk_train_);
  for (const NetParams& h : head_train_) append(h);
  return flat;
}

void MultiHeadNet::restore(const NetParams& flat) {
  const std::size_t expect =
      trunk_.size() + head_spec_.size() * head_train_.size();
  if (flat.weights.size() != expect)
    throw std::invalid_argument("checkpoint does not match network layout");
  std::size_t i = 0;
  auto take = [&](NetParams& dst, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (dst.weights[k].shape != flat.weights[i].shape ||
          dst.biases[k].shape != flat.biases[i].shape)
        throw std::invalid_argument("checkpoint tensor shape mismatch");
      dst.weights[k] = flat.weights[i];
      dst.biases[k] = flat.biases[i];
    }
  };
  take(trunk_train_, trunk_.size());
  for (NetParams& h : head_train_) take(h, head_spec_.size());
  hard_update_target();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
  store_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (store_.size() < capacity_) {
    store_.push_back(std::move(t));
  } else {
    store_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

std::size_t ReplayBuffer::sample_index(RngStream& rng) const {
  return static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(store_.size()) - 1));
}

std::vector<numkit::SgdOptimizer> make_optimizers(const MultiHeadNet& net,
                                                  double lr, double momentum) {
  std::vector<numkit::SgdOptimizer> opts;
  opts.reserve(static_cast<std::size_t>(net.num_heads()) + 1);
  for (int i = 0; i < net.num_heads() + 1; ++i)
    opts.emplace_back(lr, momentum);
  return opts;
}

TrainResult train_step(MultiHeadNet& net, const ReplayBuffer& buffer,
                       int batch_size, const std::vector<double>& head_gammas,
                       std::vector<numkit::SgdOptimizer>& opts,
                       RngStream& rng) {
  const int heads = net.num_heads();
  const int actions = net.num_actions();
  if (static_cast<int>(head_gammas.size()) != heads)
    throw std::invalid_argument("one gamma per head required");
  if (static_cast<int>(opts.size()) != heads + 1)
    throw std::invalid_argument("one optimizer per parameter group required");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

  TrainResult result;
  if (buffer.size() < static_cast<std::size_t>(batch_size)) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "[qlearner] replay buffer below batch size; skipping "
                   "training until it fills\n";
      warned = true;
    }
    result.skipped = true;
    return result;
  }

  // assemble the batch
  std::vector<std::size_t> idx(static_cast<std::size_t>(batch_size));
  for (auto& i : idx) i = buffer.sample_index(rng);

  const std::vector<int>& obs_shape = buffer.at(idx[0]).obs.shape;
  std::vector<int> batch_shape = {batch_size};
  batch_shape.insert(batch_shape.end(), obs_shape.begin(), obs_shape.end());
  Tensor s(batch_shape), s2(batch_shape);
  const std::size_t obs_len = buffer.at(idx[0]).obs.data.size();
  for (int b = 0; b < batch_size; ++b) {
    const Transition& tr = buffer.at(idx[b]);
    std::copy(tr.obs.data.begin(), tr.obs.data.end(),
              s.data.begin() + b * obs_len);
    std::copy(tr.next_obs.data.begin(), tr.next_obs.data.end(),
              s2.data.begin() + b * obs_len);
  }

  // bootstrap values from the target network
  const Tensor feats2 = forward(net.trunk_, net.trunk_target_, s2);
  std::vector<std::vector<double>> targets(
      heads, std::vector<double>(batch_size));
  for (int h = 0; h < heads; ++h) {
    const Tensor q2 = forward(net.head_spec_, net.head_target_[h], feats2);
    for (int b = 0; b < batch_size; ++b) {
      const float* row = q2.ptr() + static_cast<std::size_t>(b) * actions;
      float best = row[0];
      for (int a = 1; a < actions; ++a) best = std::max(best, row[a]);
      const Transition& tr = buffer.at(idx[b]);
      const bool cut =
          h == 0 ? tr.terminal
                 : (tr.terminal || tr.gvf_terminal[h - 1] != 0);
      const double r =
          h == 0 ? tr.r_main : static_cast<double>(tr.cumulants[h - 1]);
      targets[h][b] = r + (cut ? 0.0 : head_gammas[h] * best);
    }
  }

  // forward the train network with caches
  ForwardCache trunk_cache;
  const Tensor feats = forward(net.trunk_, net.trunk_train_, s, &trunk_cache);

  Tensor dfeats(feats.shape);
  result.head_losses.assign(heads, 0.0);
  for (int h = 0; h < heads; ++h) {
    ForwardCache head_cache;
    const Tensor q = forward(net.head_spec_, net.head_train_[h], feats,
                             &head_cache);
    Tensor dq(q.shape);
    double loss = 0.0;
    for (int b = 0; b < batch_size; ++b) {
      const Transition& tr = buffer.at(idx[b]);
      const std::size_t at = static_cast<std::size_t>(b) * actions + tr.action;
      const double diff = static_cast<double>(q.data[at]) - targets[h][b];
      loss += diff * diff;
      dq.data[at] = static_cast<float>(2.0 * diff / batch_size);
    }
    result.head_losses[h] = loss / batch_size;
    if (!std::isfinite(result.head_losses[h]))
      throw numkit::NonFiniteError("non-finite loss on head " +
                                   std::to_string(h));

    BackpropResult back =
        numkit::backward(net.head_spec_, net.head_train_[h], head_cache, dq);
    opts[1 + h].step(net.head_train_[h], back.grads);
    numkit::active_kernels().axpy(1.0f, back.input_grad.ptr(), dfeats.ptr(),
                                  dfeats.data.size());
  }

  BackpropResult trunk_back =
      numkit::backward(net.trunk_, net.trunk_train_, trunk_cache, dfeats);
  opts[0].step(net.trunk_train_, trunk_back.grads);
  return result;
}

void maybe_update_target(MultiHeadNet& net, std::int64_t step_count,
                         const TargetSchedule& schedule) {
  if (schedule.period <= 0)
    throw std::invalid_argument("target update period must be > 0");
  if (step_count <= 0 || step_count % schedule.period != 0) return;
  if (schedule.kind == TargetSchedule::Kind::hard)
    net.hard_update_target();
  else
    net.soft_update_target(schedule.tau);
}

}  // namespace dezlab::qlearner
