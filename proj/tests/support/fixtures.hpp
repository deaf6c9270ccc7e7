#pragma once

#include "maskselect/rng.hpp"
#include "maskselect/scene.hpp"
#include "maskselect/train.hpp"

#include <filesystem>

namespace maskselect::testing {

inline Tensor random_tensor(Shape shape, std::uint64_t seed, double lo = -2.0, double hi = 2.0)
{
  Tensor     t(std::move(shape));
  SplitMix64 rng(seed);
  for (auto &v : t.data())
  {
    v = rng.uniform(lo, hi);
  }
  return t;
}

/// Two-class 16x16 scene set small enough for unit-level training runs.
inline SceneSpec tiny_scene(std::uint64_t seed = 3)
{
  SceneSpec spec;
  spec.n_classes        = 2;
  spec.images_per_class = 10;
  spec.image_height     = 16;
  spec.image_width      = 16;
  spec.cue_size         = 4;
  spec.clutter_count    = 2;
  spec.seed             = seed;
  return spec;
}

inline TrainConfig tiny_train_config(std::uint64_t seed = 0)
{
  TrainConfig cfg;
  cfg.seed           = seed;
  cfg.batch_size     = 4;
  cfg.max_epochs     = 4;
  cfg.patience       = 2;
  cfg.block_channels = {4, 6};
  return cfg;
}

inline LoadedDataset tiny_dataset(std::filesystem::path const &dir, std::uint64_t seed = 3)
{
  return load_dataset(generate_dataset(tiny_scene(seed), dir));
}

}  // namespace maskselect::testing
