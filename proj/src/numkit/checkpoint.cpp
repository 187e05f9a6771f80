#include "dezlab/numkit/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace dezlab::numkit {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

constexpr char kMagic[4] = {'D', 'Z', 'N', 'K'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_i32(std::ostream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::int32_t read_i32(std::istream& in) {
  std::int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_block(std::ostream& out, const Tensor& t) {
  write_u32(out, static_cast<std::uint32_t>(t.data.size()));
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
}

std::vector<float> read_block(std::istream& in) {
  const std::uint32_t n = read_u32(in);
  std::vector<float> data(n);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  return data;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<LayerSpec>& chain,
                     const NetParams& params) {
  if (params.weights.size() != chain.size())
    throw std::invalid_argument("params do not match chain");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for write: " + path);

  out.write(kMagic, sizeof kMagic);
  write_u32(out, static_cast<std::uint32_t>(params.version));
  write_u32(out, static_cast<std::uint32_t>(chain.size()));
  for (const LayerSpec& s : chain) {
    write_u32(out, static_cast<std::uint32_t>(s.kind));
    write_i32(out, s.in_features);
    write_i32(out, s.out_features);
    write_i32(out, s.in_channels);
    write_i32(out, s.out_channels);
    write_i32(out, s.filter);
    write_i32(out, s.stride);
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!chain[i].parametric()) continue;
    write_block(out, params.weights[i]);
    write_block(out, params.biases[i]);
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);

  char magic[4] = {};
  in.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("bad checkpoint magic: " + path);

  Checkpoint ckpt;
  const std::uint32_t version = read_u32(in);
  if (version != 1)
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  ckpt.params.version = static_cast<int>(version);

  const std::uint32_t layers = read_u32(in);
  for (std::uint32_t i = 0; i < layers; ++i) {
    LayerSpec s;
    s.kind = static_cast<LayerKind>(read_u32(in));
    s.in_features = read_i32(in);
    s.out_features = read_i32(in);
    s.in_channels = read_i32(in);
    s.out_channels = read_i32(in);
    s.filter = read_i32(in);
    s.stride = read_i32(in);
    ckpt.chain.push_back(s);
  }

  for (const LayerSpec& s : ckpt.chain) {
    if (!s.parametric()) {
      ckpt.params.weights.emplace_back();
      ckpt.params.biases.emplace_back();
      continue;
    }
    std::vector<float> w = read_block(in);
    std::vector<float> b = read_block(in);
    std::vector<int> wshape, bshape;
    if (s.kind == LayerKind::dense) {
      wshape = {s.out_features, s.in_features};
      bshape = {s.out_features};
    } else {
      wshape = {s.out_channels, s.in_channels, s.filter, s.filter};
      bshape = {s.out_channels};
    }
    ckpt.params.weights.emplace_back(wshape, std::move(w));
    ckpt.params.biases.emplace_back(bshape, std::move(b));
  }
  if (!in) throw std::runtime_error("checkpoint truncated: " + path);
  return ckpt;
}

}  // namespace dezlab::numkit
