#include "dezlab/numkit/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "dezlab/numkit/kernels.hpp"

namespace dezlab::numkit {
namespace {

template <class T>
struct Ops;

template <>
struct Ops<float> {
  static double dot(const float* a, const float* b, std::size_t n) {
    return active_kernels().dot(a, b, n);
  }
  static void axpy(float alpha, const float* x, float* y, std::size_t n) {
    active_kernels().axpy(alpha, x, y, n);
  }
  static void relu(const float* x, float* y, std::size_t n) {
    active_kernels().relu(x, y, n);
  }
  static void relu_grad(const float* x, const float* dy, float* dx,
                        std::size_t n) {
    active_kernels().relu_grad(x, dy, dx, n);
  }
};

// Double path used by the finite-difference gradient checks; scalar only.
template <>
struct Ops<double> {
  static double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
  }
  static void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
  }
  static void relu(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
  static void relu_grad(const double* x, const double* dy, double* dx,
                        std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
  }
};

int conv_out_dim(int in, int filter, int stride) {
  return (in - filter) / stride + 1;
}

std::int64_t feature_count(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

std::vector<int> drop_batch(const std::vector<int>& shape) {
  if (shape.empty())
    throw std::invalid_argument("activation tensor needs a batch dimension");
  return {shape.begin() + 1, shape.end()};
}

// Gathers one sample's receptive fields: col is [OH*OW, C*F*F] row-major.
template <class T>
void im2col(const T* x, int c, int h, int w, int filter, int stride, T* col) {
  const int oh = conv_out_dim(h, filter, stride);
  const int ow = conv_out_dim(w, filter, stride);
  T* out = col;
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int ci = 0; ci < c; ++ci) {
        const T* plane = x + static_cast<std::int64_t>(ci) * h * w;
        for (int fy = 0; fy < filter; ++fy) {
          const T* row = plane + (oy * stride + fy) * w + ox * stride;
          for (int fx = 0; fx < filter; ++fx) *out++ = row[fx];
        }
      }
    }
  }
}

template <class T>
void col2im_add(const T* col, int c, int h, int w, int filter, int stride,
                T* x) {
  const int oh = conv_out_dim(h, filter, stride);
  const int ow = conv_out_dim(w, filter, stride);
  const T* in = col;
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int ci = 0; ci < c; ++ci) {
        T* plane = x + static_cast<std::int64_t>(ci) * h * w;
        for (int fy = 0; fy < filter; ++fy) {
          T* row = plane + (oy * stride + fy) * w + ox * stride;
          for (int fx = 0; fx < filter; ++fx) row[fx] += *in++;
        }
      }
    }
  }
}

}  // namespace

LayerSpec LayerSpec::dense(int in, int out) {
  if (in <= 0 || out <= 0)
    throw std::invalid_argument("dense layer sizes must be positive");
  LayerSpec s;
  s.kind = LayerKind::dense;
  s.in_features = in;
  s.out_features = out;
  return s;
}

LayerSpec LayerSpec::conv2d(int in_ch, int out_ch, int filter, int stride) {
  if (in_ch <= 0 || out_ch <= 0 || filter <= 0 || stride <= 0)
    throw std::invalid_argument("conv2d sizes must be positive");
  LayerSpec s;
  s.kind = LayerKind::conv2d;
  s.in_channels = in_ch;
  s.out_channels = out_ch;
  s.filter = filter;
  s.stride = stride;
  return s;
}

LayerSpec LayerSpec::maxpool2d(int filter, int stride) {
  if (filter <= 0 || stride <= 0)
    throw std::invalid_argument("maxpool2d sizes must be positive");
  LayerSpec s;
  s.kind = LayerKind::maxpool2d;
  s.filter = filter;
  s.stride = stride;
  return s;
}

LayerSpec LayerSpec::relu() {
  LayerSpec s;
  s.kind = LayerKind::relu;
  return s;
}

std::vector<int> layer_output_shape(const LayerSpec& spec,
                                    const std::vector<int>& in) {
  switch (spec.kind) {
    case LayerKind::dense:
      if (feature_count(in) != spec.in_features)
        throw std::invalid_argument(
            "dense layer expects " + std::to_string(spec.in_features) +
            " input features, got shape " + shape_str(in));
      return {spec.out_features};
    case LayerKind::conv2d: {
      if (in.size() != 3 || in[0] != spec.in_channels)
        throw std::invalid_argument("conv2d expects [C,H,W] input with C=" +
                                    std::to_string(spec.in_channels) +
                                    ", got " + shape_str(in));
      const int oh = conv_out_dim(in[1], spec.filter, spec.stride);
      const int ow = conv_out_dim(in[2], spec.filter, spec.stride);
      if (oh <= 0 || ow <= 0)
        throw std::invalid_argument("conv2d output dims not positive for " +
                                    shape_str(in));
      return {spec.out_channels, oh, ow};
    }
    case LayerKind::maxpool2d: {
      if (in.size() != 3)
        throw std::invalid_argument("maxpool2d expects [C,H,W] input, got " +
                                    shape_str(in));
      const int oh = conv_out_dim(in[1], spec.filter, spec.stride);
      const int ow = conv_out_dim(in[2], spec.filter, spec.stride);
      if (oh <= 0 || ow <= 0)
        throw std::invalid_argument("maxpool2d output dims not positive for " +
                                    shape_str(in));
      return {in[0], oh, ow};
    }
    case LayerKind::relu:
      return in;
  }
  throw std::invalid_argument("unknown layer kind");
}

std::vector<int> chain_output_shape(const std::vector<LayerSpec>& chain,
                                    const std::vector<int>& in) {
  std::vector<int> shape = in;
  for (const LayerSpec& spec : chain) shape = layer_output_shape(spec, shape);
  return shape;
}

void validate_chain(const std::vector<LayerSpec>& chain,
                    const std::vector<int>& input_shape) {
  (void)chain_output_shape(chain, input_shape);
}

template <class T>
bool NetParamsT<T>::shapes_match(const NetParamsT& other) const {
  if (weights.size() != other.weights.size() ||
      biases.size() != other.biases.size())
    return false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].shape != other.weights[i].shape) return false;
    if (biases[i].shape != other.biases[i].shape) return false;
  }
  return true;
}

template <class T>
bool NetParamsT<T>::all_finite() const {
  for (const auto& w : weights)
    if (!w.all_finite()) return false;
  for (const auto& b : biases)
    if (!b.all_finite()) return false;
  return true;
}

template <class T>
void NetParamsT<T>::fill_zero() {
  for (auto& w : weights) w.data.assign(w.data.size(), T(0));
  for (auto& b : biases) b.data.assign(b.data.size(), T(0));
}

template <class T>
NetParamsT<T> zero_params(const std::vector<LayerSpec>& chain,
                          const std::vector<int>& input_shape) {
  validate_chain(chain, input_shape);
  NetParamsT<T> p;
  std::vector<int> shape = input_shape;
  for (const LayerSpec& spec : chain) {
    switch (spec.kind) {
      case LayerKind::dense:
        p.weights.emplace_back(
            std::vector<int>{spec.out_features, spec.in_features});
        p.biases.emplace_back(std::vector<int>{spec.out_features});
        break;
      case LayerKind::conv2d:
        p.weights.emplace_back(std::vector<int>{
            spec.out_channels, spec.in_channels, spec.filter, spec.filter});
        p.biases.emplace_back(std::vector<int>{spec.out_channels});
        break;
      default:
        p.weights.emplace_back();
        p.biases.emplace_back();
        break;
    }
    shape = layer_output_shape(spec, shape);
  }
  return p;
}

template <class T>
NetParamsT<T> init_params(const std::vector<LayerSpec>& chain,
                          const std::vector<int>& input_shape,
                          RngStream& rng) {
  NetParamsT<T> p = zero_params<T>(chain, input_shape);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!chain[i].parametric()) continue;
    double fan_in, fan_out;
    if (chain[i].kind == LayerKind::dense) {
      fan_in = chain[i].in_features;
      fan_out = chain[i].out_features;
    } else {
      fan_in = static_cast<double>(chain[i].in_channels) * chain[i].filter *
               chain[i].filter;
      fan_out = static_cast<double>(chain[i].out_channels) * chain[i].filter *
                chain[i].filter;
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (T& w : p.weights[i].data)
      w = static_cast<T>(rng.uniform() * 2.0 * limit - limit);
    // biases stay zero
  }
  return p;
}

template <class T>
TensorT<T> forward(const std::vector<LayerSpec>& chain,
                   const NetParamsT<T>& params, const TensorT<T>& input,
                   ForwardCacheT<T>* cache) {
  if (params.weights.size() != chain.size())
    throw std::invalid_argument("params do not match layer chain");
  if (cache) {
    cache->acts.clear();
    cache->pool_argmax.assign(chain.size(), {});
    cache->acts.push_back(input);
  }

  const int batch = input.shape.empty() ? 0 : input.shape[0];
  if (batch <= 0)
    throw std::invalid_argument("forward input needs a batch dimension");

  TensorT<T> x = input;
  std::vector<T> col;
  for (std::size_t li = 0; li < chain.size(); ++li) {
    const LayerSpec& spec = chain[li];
    const std::vector<int> in_shape = drop_batch(x.shape);
    const std::vector<int> out_shape = layer_output_shape(spec, in_shape);

    std::vector<int> y_shape = {batch};
    y_shape.insert(y_shape.end(), out_shape.begin(), out_shape.end());
    TensorT<T> y(y_shape);

    const std::int64_t in_stride = feature_count(in_shape);
    const std::int64_t out_stride = feature_count(out_shape);

    switch (spec.kind) {
      case LayerKind::dense: {
        const TensorT<T>& w = params.weights[li];
        const TensorT<T>& b = params.biases[li];
        for (int bi = 0; bi < batch; ++bi) {
          const T* xr = x.ptr() + bi * in_stride;
          T* yr = y.ptr() + bi * out_stride;
          for (int o = 0; o < spec.out_features; ++o) {
            const T* wr = w.ptr() + static_cast<std::int64_t>(o) * spec.in_features;
            yr[o] = static_cast<T>(Ops<T>::dot(wr, xr, spec.in_features)) +
                    b.data[o];
          }
        }
        break;
      }
      case LayerKind::conv2d: {
        const TensorT<T>& w = params.weights[li];
        const TensorT<T>& b = params.biases[li];
        const int h = in_shape[1], wd = in_shape[2];
        const int oh = out_shape[1], ow = out_shape[2];
        const int rows = oh * ow;
        const int rlen = spec.in_channels * spec.filter * spec.filter;
        col.resize(static_cast<std::size_t>(rows) * rlen);
        for (int bi = 0; bi < batch; ++bi) {
          im2col(x.ptr() + bi * in_stride, spec.in_channels, h, wd,
                 spec.filter, spec.stride, col.data());
          T* yr = y.ptr() + bi * out_stride;
          for (int co = 0; co < spec.out_channels; ++co) {
            const T* wr = w.ptr() + static_cast<std::int64_t>(co) * rlen;
            T* yc = yr + static_cast<std::int64_t>(co) * rows;
            for (int r = 0; r < rows; ++r)
              yc[r] = static_cast<T>(Ops<T>::dot(wr, col.data() +
                                                 static_cast<std::int64_t>(r) * rlen,
                                                 rlen)) +
                      b.data[co];
          }
        }
        break;
      }
      case LayerKind::maxpool2d: {
        const int c = in_shape[0], h = in_shape[1], wd = in_shape[2];
        const int oh = out_shape[1], ow = out_shape[2];
        std::vector<std::int64_t>* argmax = nullptr;
        if (cache) {
          cache->pool_argmax[li].assign(y.data.size(), 0);
          argmax = &cache->pool_argmax[li];
        }
        std::int64_t oi = 0;
        for (int bi = 0; bi < batch; ++bi) {
          const T* xs = x.ptr() + bi * in_stride;
          for (int ci = 0; ci < c; ++ci) {
            const T* plane = xs + static_cast<std::int64_t>(ci) * h * wd;
            for (int oy = 0; oy < oh; ++oy) {
              for (int ox = 0; ox < ow; ++ox, ++oi) {
                T best = plane[(oy * spec.stride) * wd + ox * spec.stride];
                std::int64_t best_idx =
                    (oy * spec.stride) * wd + ox * spec.stride;
                for (int fy = 0; fy < spec.filter; ++fy) {
                  for (int fx = 0; fx < spec.filter; ++fx) {
                    const std::int64_t idx =
                        (oy * spec.stride + fy) * wd + ox * spec.stride + fx;
                    if (plane[idx] > best) {
                      best = plane[idx];
                      best_idx = idx;
                    }
                  }
                }
                y.data[oi] = best;
                if (argmax)
                  (*argmax)[oi] = bi * in_stride +
                                  static_cast<std::int64_t>(ci) * h * wd +
                                  best_idx;
              }
            }
          }
        }
        break;
      }
      case LayerKind::relu:
        Ops<T>::relu(x.ptr(), y.ptr(), x.data.size());
        break;
    }

    x = std::move(y);
    if (cache) cache->acts.push_back(x);
  }
  return x;
}

template <class T>
BackpropResultT<T> backward(const std::vector<LayerSpec>& chain,
                            const NetParamsT<T>& params,
                            const ForwardCacheT<T>& cache,
                            const TensorT<T>& loss_grad) {
  if (cache.acts.size() != chain.size() + 1)
    throw std::logic_error("backward called without a matching forward cache");
  if (loss_grad.shape != cache.acts.back().shape)
    throw std::invalid_argument("loss_grad shape does not match output");

  BackpropResultT<T> result;
  result.grads = zero_params<T>(chain, drop_batch(cache.acts.front().shape));

  TensorT<T> dy = loss_grad;
  std::vector<T> col, dcol;
  for (int li = static_cast<int>(chain.size()) - 1; li >= 0; --li) {
    const LayerSpec& spec = chain[li];
    const TensorT<T>& x = cache.acts[li];
    const int batch = x.shape[0];
    const std::vector<int> in_shape = drop_batch(x.shape);
    const std::int64_t in_stride = feature_count(in_shape);
    const std::int64_t out_stride = feature_count(drop_batch(dy.shape));

    TensorT<T> dx(x.shape);
    switch (spec.kind) {
      case LayerKind::dense: {
        const TensorT<T>& w = params.weights[li];
        TensorT<T>& dw = result.grads.weights[li];
        TensorT<T>& db = result.grads.biases[li];
        for (int bi = 0; bi < batch; ++bi) {
          const T* xr = x.ptr() + bi * in_stride;
          const T* dyr = dy.ptr() + bi * out_stride;
          T* dxr = dx.ptr() + bi * in_stride;
          Ops<T>::axpy(T(1), dyr, db.ptr(), spec.out_features);
          for (int o = 0; o < spec.out_features; ++o) {
            const T g = dyr[o];
            if (g == T(0)) continue;
            const std::int64_t row = static_cast<std::int64_t>(o) * spec.in_features;
            Ops<T>::axpy(g, xr, dw.ptr() + row, spec.in_features);
            Ops<T>::axpy(g, w.ptr() + row, dxr, spec.in_features);
          }
        }
        break;
      }
      case LayerKind::conv2d: {
        const TensorT<T>& w = params.weights[li];
        TensorT<T>& dw = result.grads.weights[li];
        TensorT<T>& db = result.grads.biases[li];
        const int h = in_shape[1], wd = in_shape[2];
        const int oh = conv_out_dim(h, spec.filter, spec.stride);
        const int ow = conv_out_dim(wd, spec.filter, spec.stride);
        const int rows = oh * ow;
        const int rlen = spec.in_channels * spec.filter * spec.filter;
        col.resize(static_cast<std::size_t>(rows) * rlen);
        dcol.resize(col.size());
        for (int bi = 0; bi < batch; ++bi) {
          im2col(x.ptr() + bi * in_stride, spec.in_channels, h, wd,
                 spec.filter, spec.stride, col.data());
          std::fill(dcol.begin(), dcol.end(), T(0));
          const T* dyr = dy.ptr() + bi * out_stride;
          for (int co = 0; co < spec.out_channels; ++co) {
            const T* dyc = dyr + static_cast<std::int64_t>(co) * rows;
            const std::int64_t wrow = static_cast<std::int64_t>(co) * rlen;
            double bias_acc = 0.0;
            for (int r = 0; r < rows; ++r) {
              const T g = dyc[r];
              bias_acc += static_cast<double>(g);
              if (g == T(0)) continue;
              Ops<T>::axpy(g, col.data() + static_cast<std::int64_t>(r) * rlen,
                           dw.ptr() + wrow, rlen);
              Ops<T>::axpy(g, w.ptr() + wrow,
                           dcol.data() + static_cast<std::int64_t>(r) * rlen,
                           rlen);
            }
            db.data[co] += static_cast<T>(bias_acc);
          }
          col2im_add(dcol.data(), spec.in_channels, h, wd, spec.filter,
                     spec.stride, dx.ptr() + bi * in_stride);
        }
        break;
      }
      case LayerKind::maxpool2d: {
        const std::vector<std::int64_t>& argmax = cache.pool_argmax[li];
        if (argmax.size() != dy.data.size())
          throw std::logic_error("maxpool cache missing for backward");
        for (std::size_t i = 0; i < argmax.size(); ++i)
          dx.data[argmax[i]] += dy.data[i];
        break;
      }
      case LayerKind::relu:
        Ops<T>::relu_grad(x.ptr(), dy.ptr(), dx.ptr(), x.data.size());
        break;
    }
    dy = std::move(dx);
  }
  result.input_grad = std::move(dy);
  return result;
}

template struct NetParamsT<float>;
template struct NetParamsT<double>;
template NetParamsT<float> init_params<float>(const std::vector<LayerSpec>&,
                                              const std::vector<int>&,
                                              RngStream&);
template NetParamsT<double> init_params<double>(const std::vector<LayerSpec>&,
                                                const std::vector<int>&,
                                                RngStream&);
template NetParamsT<float> zero_params<float>(const std::vector<LayerSpec>&,
                                              const std::vector<int>&);
template NetParamsT<double> zero_params<double>(const std::vector<LayerSpec>&,
                                                const std::vector<int>&);
template TensorT<float> forward<float>(const std::vector<LayerSpec>&,
                                       const NetParamsT<float>&,
                                       const TensorT<float>&,
                                       ForwardCacheT<float>*);
template TensorT<double> forward<double>(const std::vector<LayerSpec>&,
                                         const NetParamsT<double>&,
                                         const TensorT<double>&,
                                         ForwardCacheT<double>*);
template BackpropResultT<float> backward<float>(const std::vector<LayerSpec>&,
                                                const NetParamsT<float>&,
                                                const ForwardCacheT<float>&,
                                                const TensorT<float>&);
template BackpropResultT<double> backward<double>(
    const std::vector<LayerSpec>&, const NetParamsT<double>&,
    const ForwardCacheT<double>&, const TensorT<double>&);

}  // namespace dezlab::numkit
