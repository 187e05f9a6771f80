#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dezlab/numkit/layers.hpp"
#include "dezlab/numkit/optimizer.hpp"
#include "dezlab/numkit/rng.hpp"
#include "dezlab/numkit/tensor.hpp"

namespace dezlab::qlearner {

using numkit::LayerSpec;
using numkit::NetParams;
using numkit::RngStream;
using numkit::Tensor;

class MultiHeadNet;
class ReplayBuffer;
struct TrainResult;
TrainResult train_step(MultiHeadNet&, const ReplayBuffer&, int,
                       const std::vector<double>&,
                       std::vector<numkit::SgdOptimizer>&, RngStream&);

// Shared trunk plus M+1 width-|A| linear heads (head 0 = main task, heads
// 1..M = GVFs), with train and target parameter copies.
class MultiHeadNet {
 public:
  MultiHeadNet(std::vector<LayerSpec> trunk, std::vector<int> obs_shape,
               int num_heads, int num_actions, RngStream& rng);

  int num_heads() const { return static_cast<int>(head_train_.size()); }
  int num_actions() const { return num_actions_; }
  const std::vector<int>& obs_shape() const { return obs_shape_; }
  const std::vector<LayerSpec>& trunk_spec() const { return trunk_; }

  // Action-value read used for action selection; counts per-head reads so
  // the algorithm matrix is observable.
  std::vector<float> q_values(const Tensor& obs, int head,
                              bool use_target = false) const;
  const std::vector<std::uint64_t>& head_reads() const { return head_reads_; }

  void hard_update_target();
  void soft_update_target(double tau);

  // Flattened (trunk + heads) views for checkpointing.
  std::vector<LayerSpec> checkpoint_chain() const;
  NetParams checkpoint_params() const;
  void restore(const NetParams& flat);

  NetParams& trunk_train() { return trunk_train_; }
  std::vector<NetParams>& head_train() { return head_train_; }
  const NetParams& trunk_target() const { return trunk_target_; }
  const std::vector<NetParams>& head_target() const { return head_target_; }

  friend TrainResult train_step(MultiHeadNet&, const ReplayBuffer&, int,
                                const std::vector<double>&,
                                std::vector<numkit::SgdOptimizer>&,
                                RngStream&);

 private:
  std::vector<LayerSpec> trunk_;
  std::vector<LayerSpec> head_spec_;  // one dense layer trunk_out -> |A|
  std::vector<int> obs_shape_;
  std::vector<int> trunk_out_shape_;
  int num_actions_;
  NetParams trunk_train_, trunk_target_;
  std::vector<NetParams> head_train_, head_target_;
  mutable std::vector<std::uint64_t> head_reads_;
};

// One stored interaction. r_main is what head 0 learns from (shaped or
// intrinsic-augmented when those baselines are active); r_ext is the raw
// environment reward kept for metrics.
struct Transition {
  Tensor obs;
  int action = 0;
  float r_ext = 0.0f;
  float r_main = 0.0f;
  std::vector<float> cumulants;           // length M
  std::vector<std::uint8_t> gvf_terminal; // length M
  Tensor next_obs;
  bool terminal = false;
};

// Uniform-sampling ring buffer; oldest evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return store_[i]; }
  std::size_t sample_index(RngStream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> store_;
};

struct TrainResult {
  bool skipped = false;
  std::vector<double> head_losses;
};

// One optimizer per parameter group: [0] = trunk, [1+h] = head h.
std::vector<numkit::SgdOptimizer> make_optimizers(const MultiHeadNet& net,
                                                  double lr,
                                                  double momentum = 0.0);

// One gradient step on the summed per-head TD losses:
//   target_h = r_h + gamma_h * max_a' Q_target,h(s', a') * (1 - terminal_h)
//   loss_h   = mean_b (Q_h(s_b, a_b) - target_hb)^2
// Gradients from every head flow into the shared trunk. Skips (with a
// one-time warning) while the buffer holds fewer than batch_size
// transitions. Throws numkit::NonFiniteError on NaN/Inf losses.
TrainResult train_step(MultiHeadNet& net, const ReplayBuffer& buffer,
                       int batch_size, const std::vector<double>& head_gammas,
                       std::vector<numkit::SgdOptimizer>& opts,
                       RngStream& rng);

struct TargetSchedule {
  enum class Kind { hard, soft } kind = Kind::hard;
  int period = 100;   // env steps between updates
  double tau = 1.0;   // soft blend weight
};

// Applies the schedule when step_count is a period boundary.
void maybe_update_target(MultiHeadNet& net, std::int64_t step_count,
                         const TargetSchedule& schedule);

}  // namespace dezlab::qlearner
