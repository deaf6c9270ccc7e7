//------------------------------------------------------------------------------
//
//   Copyright 2026 The maskselect Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "maskselect/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace maskselect {

/**
 * Binary checkpoint layout, all integers 32-bit little-endian unsigned:
 *
 *   "MASKHEAD1"
 *   tensor count
 *   per tensor: name length, name bytes, rank, dims[rank]
 *   per tensor, same order: raw 64-bit little-endian IEEE-754 values
 *
 * Tensor names are "meta.input_shape" (channels, height, width),
 * "encoder.<i>.kernels", "encoder.<i>.bias", "mask.logits" (masked variant),
 * "head.weights" and "head.bias".
 */
inline constexpr char kCheckpointMagic[] = "MASKHEAD1";

std::vector<std::uint8_t> encode_checkpoint(ModelParams const &params);

/// Throws LoadError naming the offending field. With `expected` set, a variant mismatch is an error.
ModelParams decode_checkpoint(std::vector<std::uint8_t> const &bytes,
                              std::optional<Variant>           expected = std::nullopt);

void        save_checkpoint(ModelParams const &params, std::filesystem::path const &path);
ModelParams load_checkpoint(std::filesystem::path const &path,
                            std::optional<Variant>       expected = std::nullopt);

}  // namespace maskselect
