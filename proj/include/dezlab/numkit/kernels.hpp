#pragma once

#include <cstddef>
#include <string>

namespace dezlab::numkit {

// Float kernels behind the layer arithmetic. A scalar reference variant
// always exists; an AVX2 variant is selected at startup when the CPU has it.
//
// Contract between variants:
//   * reductions (dot) accumulate in double; variants may differ only in
//     summation order, never in the per-element product,
//   * elementwise kernels (axpy, scale, relu, relu_grad) round once per
//     element (separate mul and add, no fused contraction) and are therefore
//     bit-identical across variants.
struct Kernels {
  const char* name;
  // sum_i a[i]*b[i], accumulated in double
  double (*dot)(const float* a, const float* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(float* x, float alpha, std::size_t n);
  // y[i] = max(x[i], 0)
  void (*relu)(const float* x, float* y, std::size_t n);
  // dx[i] = x[i] > 0 ? dy[i] : 0   (x is the pre-activation)
  void (*relu_grad)(const float* x, const float* dy, float* dx, std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the binary or the CPU lacks AVX2+FMA.
const Kernels* avx2_kernels();

// The variant all layer code dispatches through.
const Kernels& active_kernels();

// "auto" (default), "scalar" or "avx2". The DEZLAB_SIMD environment variable
// overrides "auto" at startup. Throws std::invalid_argument on unknown names
// or when "avx2" is requested but unavailable.
void select_kernels(const std::string& mode);

}  // namespace dezlab::numkit
