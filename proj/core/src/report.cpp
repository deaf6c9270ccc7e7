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

#include "maskselect/report.hpp"

#include "maskselect/errors.hpp"
#include "maskselect/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace maskselect {

std::string format_spread(double value)
{
  if (value == 0.0)
  {
    return "0";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1e", value);
  std::string s(buf);
  // "7.5e-04" -> "7.5e-4", "4.0e+01" -> "4.0e1"
  auto const e = s.find('e');
  std::string mantissa = s.substr(0, e);
  std::string exponent = s.substr(e + 1);
  std::string sign;
  if (!exponent.empty() && (exponent[0] == '-' || exponent[0] == '+'))
  {
    sign     = exponent[0] == '-' ? "-" : "";
    exponent = exponent.substr(1);
  }
  exponent.erase(0, std::min(exponent.find_first_not_of('0'), exponent.size() - 1));
  return mantissa + "e" + sign + exponent;
}

std::string RunReport::table_row() const
{
  char mean_buf[32];
  char min_buf[32];
  std::snprintf(mean_buf, sizeof(mean_buf), "%.3f", mean);
  std::snprintf(min_buf, sizeof(min_buf), "%.3f", min);
  return std::string(mean_buf) + " ± " + format_spread(stddev) + " | " + min_buf;
}

RunReport aggregate_report(std::vector<double> const &accuracies, Variant variant,
                           std::string digest)
{
  if (accuracies.size() != kRunsPerReport)
  {
    throw InputError("aggregate_report needs exactly " + std::to_string(kRunsPerReport) +
                     " accuracies, got " + std::to_string(accuracies.size()));
  }
  for (auto a : accuracies)
  {
    if (!(a >= 0.0 && a <= 1.0))
    {
      throw InputError("accuracy " + format_number(a) + " outside [0, 1]");
    }
  }
  RunReport r;
  r.variant       = variant;
  r.config_digest = std::move(digest);
  r.accuracies    = accuracies;

  double sum = 0.0;
  for (auto a : accuracies)
  {
    sum += a;
  }
  auto const n = static_cast<double>(accuracies.size());
  r.mean       = sum / n;
  double ss    = 0.0;
  for (auto a : accuracies)
  {
    ss += (a - r.mean) * (a - r.mean);
  }
  r.stddev          = std::sqrt(ss / n);
  auto const [lo, hi] = std::minmax_element(accuracies.begin(), accuracies.end());
  r.min               = *lo;
  if (*lo == *hi)
  {
    // Summation rounding must not leak into an all-equal list.
    r.mean   = *lo;
    r.stddev = 0.0;
  }
  return r;
}

std::string config_digest(TrainConfig const &c)
{
  std::ostringstream canon;
  canon << "lr=" << format_number(c.learning_rate) << ";lambda=" << format_number(c.lambda)
        << ";batch=" << c.batch_size << ";epochs=" << c.max_epochs << ";patience=" << c.patience
        << ";variant=" << to_string(c.variant) << ";blocks=";
  for (auto b : c.block_channels)
  {
    canon << b << ',';
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon.str())
  {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string MaskReport::to_csv() const
{
  std::ostringstream out;
  out << "kind,row,col,value\n";
  std::size_t const rows = values.dim(0);
  std::size_t const cols = values.dim(1);
  for (std::size_t r = 0; r < rows; ++r)
  {
    for (std::size_t c = 0; c < cols; ++c)
    {
      out << "cell," << r << ',' << c << ',' << format_number(values.at(r, c)) << '\n';
    }
  }
  out << "mean,,," << format_number(mean) << '\n';
  out << "suppressed_count,,," << suppressed << '\n';
  return out.str();
}

MaskReport mask_report(ModelParams const &params)
{
  if (!params.mask)
  {
    throw InputError("model has no mask");
  }
  MaskReport r;
  r.values   = mask_values(*params.mask);
  double sum = 0.0;
  for (auto v : r.values.data())
  {
    sum += v;
    if (v < kSuppressedThreshold)
    {
      ++r.suppressed;
    }
  }
  r.mean = sum / static_cast<double>(r.values.size());
  return r;
}

}  // namespace maskselect
