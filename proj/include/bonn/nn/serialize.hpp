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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bonn/nn/layers.hpp"

namespace bonn::nn {

inline constexpr std::uint32_t kParamFormatVersion = 1;

// Binary layout, all integers u32 little-endian, reals f64 little-endian:
//   "BONN" version
//   repeated until EOF: name_len name rank dims... values...
void write_params(std::ostream& out, std::span<const NamedTensor> blocks);
std::vector<std::pair<std::string, Tensor>> read_params(std::istream& in);

void save_params(const std::filesystem::path& path,
                 std::span<const NamedTensor> blocks);
// Loads into existing blocks; names and shapes must match exactly.
void load_params(const std::filesystem::path& path,
                 std::span<const NamedTensor> blocks);

}  // namespace bonn::nn
