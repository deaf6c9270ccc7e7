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
#include "maskselect/train.hpp"

#include <string>
#include <vector>

namespace maskselect {

/// Number of seeded runs behind one table row.
inline constexpr std::size_t kRunsPerReport = 5;

/// Test accuracy summary over seeded runs.
struct RunReport
{
  Variant             variant{Variant::masked};
  std::string         config_digest;
  std::vector<double> accuracies;
  double              mean{0.0};
  double              stddev{0.0};  // population
  double              min{0.0};

  /// "mean ± std | min", e.g. "0.900 ± 7.5e-4 | 0.900".
  std::string table_row() const;
};

/// Exactly kRunsPerReport accuracies in [0, 1]; throws InputError otherwise.
RunReport aggregate_report(std::vector<double> const &accuracies, Variant variant = Variant::masked,
                           std::string config_digest = {});

/// Scientific notation with two significant digits and a bare exponent ("7.5e-4"); 0 prints "0".
std::string format_spread(double value);

/// 16-hex-digit FNV-1a digest of every training hyperparameter except the seed.
std::string config_digest(TrainConfig const &config);

struct MaskReport
{
  Tensor      values;  // sigmoid of the logits
  double      mean{0.0};
  std::size_t suppressed{0};  // entries below kSuppressedThreshold

  /// Header "kind,row,col,value"; one "cell" row per entry, then "mean" and "suppressed_count".
  std::string to_csv() const;
};

/// Throws InputError("model has no mask") for a baseline model.
MaskReport mask_report(ModelParams const &params);

}  // namespace maskselect
