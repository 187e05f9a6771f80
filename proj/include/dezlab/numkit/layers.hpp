#pragma once

#include <vector>

#include "dezlab/numkit/rng.hpp"
#include "dezlab/numkit/tensor.hpp"

namespace dezlab::numkit {

enum class LayerKind : std::uint8_t { dense = 0, conv2d = 1, maxpool2d = 2, relu = 3 };

struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  int in_features = 0;   // dense
  int out_features = 0;  // dense
  int in_channels = 0;   // conv2d
  int out_channels = 0;  // conv2d
  int filter = 0;        // conv2d, maxpool2d
  int stride = 1;        // conv2d, maxpool2d

  static LayerSpec dense(int in, int out);
  static LayerSpec conv2d(int in_ch, int out_ch, int filter, int stride = 1);
  static LayerSpec maxpool2d(int filter, int stride);
  static LayerSpec relu();

  bool parametric() const {
    return kind == LayerKind::dense || kind == LayerKind::conv2d;
  }
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Shapes below exclude the batch dimension; activations carry it as dim 0.
std::vector<int> layer_output_shape(const LayerSpec& spec,
                                    const std::vector<int>& in);
std::vector<int> chain_output_shape(const std::vector<LayerSpec>& chain,
                                    const std::vector<int>& in);
// Throws std::invalid_argument when shapes do not thread through the chain.
void validate_chain(const std::vector<LayerSpec>& chain,
                    const std::vector<int>& input_shape);

// Weight/bias tensors aligned with the chain; empty tensors at
// non-parametric slots. Dense weights are [out, in]; conv weights are
// [out_ch, in_ch, F, F]; biases are [out] / [out_ch].
template <class T>
struct NetParamsT {
  std::vector<TensorT<T>> weights;
  std::vector<TensorT<T>> biases;
  int version = 1;

  bool shapes_match(const NetParamsT& other) const;
  bool all_finite() const;
  void fill_zero();
};
using NetParams = NetParamsT<float>;

template <class T>
NetParamsT<T> init_params(const std::vector<LayerSpec>& chain,
                          const std::vector<int>& input_shape, RngStream& rng);

template <class T>
NetParamsT<T> zero_params(const std::vector<LayerSpec>& chain,
                          const std::vector<int>& input_shape);

// acts[i] is the input of layer i (acts[0] = network input); acts.back() is
// the network output. pool_argmax holds, per maxpool layer, the flat source
// index every pooled element came from.
template <class T>
struct ForwardCacheT {
  std::vector<TensorT<T>> acts;
  std::vector<std::vector<std::int64_t>> pool_argmax;
};
using ForwardCache = ForwardCacheT<float>;

// input is batch-first: [B, features...]. When cache is non-null every
// intermediate activation is kept for backward().
template <class T>
TensorT<T> forward(const std::vector<LayerSpec>& chain,
                   const NetParamsT<T>& params, const TensorT<T>& input,
                   ForwardCacheT<T>* cache = nullptr);

template <class T>
struct BackpropResultT {
  NetParamsT<T> grads;
  TensorT<T> input_grad;
};
using BackpropResult = BackpropResultT<float>;

// loss_grad is dLoss/dOutput, same shape as the forward output. Throws
// std::logic_error when the cache was not produced by a matching forward().
template <class T>
BackpropResultT<T> backward(const std::vector<LayerSpec>& chain,
                            const NetParamsT<T>& params,
                            const ForwardCacheT<T>& cache,
                            const TensorT<T>& loss_grad);

extern template struct NetParamsT<float>;
extern template struct NetParamsT<double>;
extern template NetParamsT<float> init_params<float>(
    const std::vector<LayerSpec>&, const std::vector<int>&, RngStream&);
extern template NetParamsT<double> init_params<double>(
    const std::vector<LayerSpec>&, const std::vector<int>&, RngStream&);
extern template NetParamsT<float> zero_params<float>(
    const std::vector<LayerSpec>&, const std::vector<int>&);
extern template NetParamsT<double> zero_params<double>(
    const std::vector<LayerSpec>&, const std::vector<int>&);
extern template TensorT<float> forward<float>(const std::vector<LayerSpec>&,
                                              const NetParamsT<float>&,
                                              const TensorT<float>&,
                                              ForwardCacheT<float>*);
extern template TensorT<double> forward<double>(const std::vector<LayerSpec>&,
                                                const NetParamsT<double>&,
                                                const TensorT<double>&,
                                                ForwardCacheT<double>*);
extern template BackpropResultT<float> backward<float>(
    const std::vector<LayerSpec>&, const NetParamsT<float>&,
    const ForwardCacheT<float>&, const TensorT<float>&);
extern template BackpropResultT<double> backward<double>(
    const std::vector<LayerSpec>&, const NetParamsT<double>&,
    const ForwardCacheT<double>&, const TensorT<double>&);

}  // namespace dezlab::numkit
