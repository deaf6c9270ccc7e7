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

#include "maskselect/gradcam.hpp"
#include "maskselect/noise.hpp"
#include "maskselect/rng.hpp"
#include "maskselect/train.hpp"

#include <benchmark/benchmark.h>

using namespace maskselect;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed)
{
  Tensor     t(std::move(shape));
  SplitMix64 rng(seed);
  for (auto &v : t.data())
  {
    v = rng.uniform();
  }
  return t;
}

void BM_Conv2dForward(benchmark::State &state)
{
  auto const   c  = static_cast<std::size_t>(state.range(0));
  auto const   hw = static_cast<std::size_t>(state.range(1));
  Tensor const x  = random_tensor({c, hw, hw}, 1);
  Tensor const k  = random_tensor({2 * c, c, 3, 3}, 2);
  Tensor const b  = random_tensor({2 * c}, 3);
  for (auto _ : state)
  {
    Tape tape;
    benchmark::DoNotOptimize(ops::conv2d(tape.constant(x), tape.constant(k), tape.constant(b), 2, 1).value());
  }
}
BENCHMARK(BM_Conv2dForward)->Args({3, 32})->Args({8, 16})->Args({16, 64});

void BM_SampleGradient(benchmark::State &state)
{
  auto const   variant = state.range(0) != 0 ? Variant::masked : Variant::baseline;
  auto const   params  = ModelParams::initialize(EncoderConfig{}, variant, 4);
  Tensor const image   = random_tensor({3, 32, 32}, 5);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(compute_gradient(params, image, 1, 0.1));
  }
}
BENCHMARK(BM_SampleGradient)->Arg(0)->Arg(1);

void BM_Predict(benchmark::State &state)
{
  auto const   params = ModelParams::initialize(EncoderConfig{}, Variant::masked, 6);
  Tensor const image  = random_tensor({3, 32, 32}, 7);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(predict(params, image));
  }
}
BENCHMARK(BM_Predict);

void BM_GradCam(benchmark::State &state)
{
  auto const   params = ModelParams::initialize(EncoderConfig{}, Variant::masked, 8);
  Tensor const image  = random_tensor({3, 32, 32}, 9);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(grad_cam(params, image, 2));
  }
}
BENCHMARK(BM_GradCam);

void BM_GaussianNoise224(benchmark::State &state)
{
  Image8 const img(224, 224, 3, 128);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(add_gaussian_noise(img, 25.0, 10));
  }
}
BENCHMARK(BM_GaussianNoise224);

}  // namespace

BENCHMARK_MAIN();
