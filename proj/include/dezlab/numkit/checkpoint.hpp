#pragma once

#include <string>
#include <vector>

#include "dezlab/numkit/layers.hpp"

namespace dezlab::numkit {

// Binary checkpoint: magic "DZNK", little-endian u32 layout version, the
// layer chain, then one little-endian float32 weight block and one bias
// block per parametric layer in chain order. save->load->save is
// byte-identical.
struct Checkpoint {
  std::vector<LayerSpec> chain;
  NetParams params;
};

void save_checkpoint(const std::string& path,
                     const std::vector<LayerSpec>& chain,
                     const NetParams& params);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dezlab::numkit
