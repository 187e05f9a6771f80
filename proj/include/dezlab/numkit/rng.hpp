#pragma once

#include <cstdint>
#include <random>

namespace dezlab::numkit {

// Random stream used everywhere randomness is consumed. The interface is
// virtual so tests can substitute a scripted stream and replay exact
// decision traces.
class RngStream {
 public:
  virtual ~RngStream() = default;
  // uniform double in [0, 1)
  virtual double uniform() = 0;
  // uniform integer in [lo, hi], both inclusive
  virtual int uniform_int(int lo, int hi) = 0;
};

// mt19937_64 with hand-rolled draw mappings so the produced values are
// identical across standard libraries (std::uniform_int_distribution is not
// portable).
class Mt64Rng final : public RngStream {
 public:
  explicit Mt64Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() override {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  int uniform_int(int lo, int hi) override {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = (UINT64_MAX / span) * span;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return lo + static_cast<int>(r % span);
  }

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent per-purpose seeds derived from one run seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

}  // namespace dezlab::numkit
