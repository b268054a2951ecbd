// Copyright 2026 The BONN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bonn/nn/serialize.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

#include "bonn/error.hpp"

namespace bonn::nn {

namespace {

constexpr std::array<char, 4> kMagic = {'B', 'O', 'N', 'N'};

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b;
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
    throw Error(std::string("parameter file truncated while reading ") + what);
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
    throw Error("parameter file truncated while reading values");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_params(std::ostream& out, std::span<const NamedTensor> blocks) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kParamFormatVersion);
  for (const auto& block : blocks) {
    const Tensor& t = *block.tensor;
    put_u32(out, static_cast<std::uint32_t>(block.name.size()));
    out.write(block.name.data(), static_cast<std::streamsize>(block.name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : t.values()) put_f64(out, v);
  }
  if (!out) throw Error("failed writing parameter stream");
}

std::vector<std::pair<std::string, Tensor>> read_params(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error("not a parameter file (bad magic)");
  }
  const std::uint32_t version = get_u32(in, "version");
  if (version != kParamFormatVersion) {
    throw Error("unsupported parameter format version " +
                std::to_string(version));
  }
  std::vector<std::pair<std::string, Tensor>> out;
  while (in.peek() != std::char_traits<char>::eof()) {
    const std::uint32_t name_len = get_u32(in, "name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) {
      throw Error("parameter file truncated while reading a block name");
    }
    const std::uint32_t rank = get_u32(in, "rank");
    if (rank < 1 || rank > 2) {
      throw Error("block '" + name + "' has unsupported rank " +
                  std::to_string(rank));
    }
    std::vector<std::size_t> shape;
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      shape.push_back(get_u32(in, "dims"));
      count *= shape.back();
    }
    std::vector<double> values(count);
    for (double& v : values) v = get_f64(in);
    out.emplace_back(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  return out;
}

void save_params(const std::filesystem::path& path,
                 std::span<const NamedTensor> blocks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_params(out, blocks);
}

void load_params(const std::filesystem::path& path,
                 std::span<const NamedTensor> blocks) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  auto loaded = read_params(in);
  if (loaded.size() != blocks.size()) {
    throw Error("'" + path.string() + "' holds " +
                std::to_string(loaded.size()) + " blocks, model expects " +
                std::to_string(blocks.size()));
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& [name, tensor] = loaded[i];
    if (name != blocks[i].name || tensor.shape() != blocks[i].tensor->shape()) {
      throw Error("'" + path.string() + "': block " + std::to_string(i) +
                  " is '" + name + "' " + diff::shape_string(tensor.shape()) +
                  ", expected '" + blocks[i].name + "' " +
                  diff::shape_string(blocks[i].tensor->shape()));
    }
    auto dst = blocks[i].tensor->values();
    std::copy(tensor.values().begin(), tensor.values().end(), dst.begin());
  }
}

}  // namespace bonn::nn
