#include "dezlab/numkit/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace dezlab::numkit {
namespace {

const Kernels* resolve(const std::string& mode) {
  if (mode == "scalar") return &scalar_kernels();
  if (mode == "avx2") {
    const Kernels* k = avx2_kernels();
    if (!k) throw std::invalid_argument("avx2 kernels unavailable on this CPU");
    return k;
  }
  if (mode == "auto") {
    if (const Kernels* k = avx2_kernels()) return k;
    return &scalar_kernels();
  }
  throw std::invalid_argument("unknown kernel mode: " + mode);
}

const Kernels*& active_slot() {
  static const Kernels* active = [] {
    const char* env = std::getenv("DEZLAB_SIMD");
    return resolve(env ? env : "auto");
  }();
  return active;
}

}  // namespace

const Kernels& active_kernels() { return *active_slot(); }

void select_kernels(const std::string& mode) { active_slot() = resolve(mode); }

}  // namespace dezlab::numkit
