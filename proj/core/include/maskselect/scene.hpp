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

#include "maskselect/image.hpp"
#include "maskselect/tensor.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maskselect {

/**
 * Parameters of the synthetic scene task.
 *
 * Every image has a mid-gray textured background, exactly one class cue near
 * the image center and `clutter_count` distractors in the outer band. The
 * distractor pool is shared by all classes and includes decoys that look
 * exactly like some class's cue, so a classifier that pools over the whole
 * image is misled while one that attends to the center is not.
 */
struct SceneSpec
{
  std::size_t   n_classes{4};
  std::size_t   images_per_class{200};
  std::size_t   image_height{32};
  std::size_t   image_width{32};
  std::size_t   cue_size{6};
  std::size_t   clutter_count{5};
  double        occlusion_prob{0.3};
  std::uint64_t seed{0};

  void validate() const;
  bool operator==(SceneSpec const &) const = default;
};

/// Location of the class cue, in pixels.
struct CueBox
{
  std::size_t row{0};
  std::size_t col{0};
  std::size_t size{0};

  bool operator==(CueBox const &) const = default;
};

struct SceneImage
{
  Image8 image;
  CueBox cue;
  bool   occluded{false};
};

/// Renders one image of class `label`; a pure function of its arguments.
SceneImage render_scene(SceneSpec const &spec, std::size_t label, std::uint64_t image_seed);

/// RGB of the dominant cue color for `label`.
std::array<std::uint8_t, 3> cue_color(std::size_t label) noexcept;

enum class Split
{
  train,
  val,
  test,
};

std::string_view to_string(Split split) noexcept;
Split            parse_split(std::string_view text);

/**
 * 60/20/20 partition of n items by largest remainder. Ties on the remainder
 * go to train, then val, then test.
 */
std::array<std::size_t, 3> split_counts(std::size_t n);

struct LabeledItem
{
  std::string path;
  std::size_t label{0};
};

struct ManifestRow
{
  std::string path;
  std::size_t label{0};
  Split       split{Split::train};

  bool operator==(ManifestRow const &) const = default;
};

/// Per-class seeded shuffle then split_counts(); rows keep the input order.
std::vector<ManifestRow> split_dataset(std::vector<LabeledItem> const &items, std::uint64_t seed);

struct DatasetManifest
{
  /// Directory that relative row paths are resolved against.
  std::filesystem::path    root;
  std::vector<ManifestRow> rows;
  /// Present when the data came from generate_dataset.
  std::optional<SceneSpec> scene;
  /// Cue boxes keyed by row index; generated data only.
  std::vector<CueBox> cues;

  std::size_t n_classes() const;
  std::size_t count(Split split) const;
  /// Throws ConfigError on duplicate paths.
  void validate() const;
};

/// Writes "path,label,split" CSV. Scene metadata, if any, goes to sidecar files in the same directory.
void            write_manifest(DatasetManifest const &manifest, std::filesystem::path const &csv_path);
DatasetManifest read_manifest(std::filesystem::path const &csv_path);

/// Renders every image into `out_dir` and writes manifest.csv next to them.
DatasetManifest generate_dataset(SceneSpec const &spec, std::filesystem::path const &out_dir);

inline constexpr char kManifestFile[]  = "manifest.csv";
inline constexpr char kSceneSpecFile[] = "scene_spec.json";
inline constexpr char kCueFile[]       = "cues.csv";

/// One decoded example.
struct Sample
{
  std::string path;
  std::size_t label{0};
  Split       split{Split::train};
  Image8      pixels;
  Tensor      image;
  std::optional<CueBox> cue;
};

/// Images held in memory; sample order follows the manifest.
struct LoadedDataset
{
  std::vector<Sample> samples;
  std::size_t         n_classes{0};
  std::optional<SceneSpec> scene;

  std::vector<Sample const *> split(Split which) const;
  std::size_t                 count(Split which) const;
};

LoadedDataset load_dataset(DatasetManifest const &manifest, std::optional<ImageSize> resize = std::nullopt);

}  // namespace maskselect
