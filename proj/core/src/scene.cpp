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

#include "maskselect/scene.hpp"

#include "maskselect/errors.hpp"
#include "maskselect/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace maskselect {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr std::array<Rgb, 8> kPalette{{
    {230, 50, 50},
    {50, 200, 70},
    {50, 80, 230},
    {230, 210, 40},
    {210, 60, 210},
    {40, 210, 210},
    {240, 140, 30},
    {130, 60, 200},
}};

constexpr Rgb kDark{30, 30, 30};
constexpr Rgb kLight{235, 235, 235};

// Stream ids for derive_seed(); images use their global index.
constexpr std::uint64_t kSplitStream = 0xF00D0000'00000001ULL;

// Distance in pixels kept between the cue and the clutter band.
constexpr std::size_t kCueMargin = 4;
constexpr int         kTextureAmplitude = 24;

struct Rect
{
  std::size_t row, col, height, width;

  bool intersects(Rect const &o) const noexcept
  {
    return row < o.row + o.height && o.row < row + height && col < o.col + o.width &&
           o.col < col + width;
  }
};

void put(Image8 &img, std::ptrdiff_t r, std::ptrdiff_t c, Rgb color)
{
  if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(img.height) ||
      c >= static_cast<std::ptrdiff_t>(img.width))
  {
    return;
  }
  for (std::size_t ch = 0; ch < 3; ++ch)
  {
    img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), ch) = color[ch];
  }
}

Rgb darken(Rgb c)
{
  return {static_cast<std::uint8_t>(c[0] / 2), static_cast<std::uint8_t>(c[1] / 2),
          static_cast<std::uint8_t>(c[2] / 2)};
}

void paint_cue(Image8 &img, std::ptrdiff_t row, std::ptrdiff_t col, std::size_t size,
               std::size_t label)
{
  Rgb const         base    = kPalette[label % kPalette.size()];
  std::size_t const variant = label / kPalette.size();
  for (std::size_t y = 0; y < size; ++y)
  {
    for (std::size_t x = 0; x < size; ++x)
    {
      // Classes beyond the palette reuse a color with every (variant+1)-th row darkened.
      bool const dark = variant > 0 && (y % (variant + 1)) == variant;
      put(img, row + static_cast<std::ptrdiff_t>(y), col + static_cast<std::ptrdiff_t>(x),
          dark ? darken(base) : base);
    }
  }
}

enum class Clutter
{
  dark,
  light,
  stripes,
  decoy,
};

// Square patch of edge `size` at (r0, c0); pixels outside the image are clipped.
void paint_clutter(Image8 &img, SplitMix64 &rng, Clutter kind, std::ptrdiff_t r0,
                   std::ptrdiff_t c0, std::size_t size, std::size_t n_classes)
{
  switch (kind)
  {
  case Clutter::dark:
  case Clutter::light:
    for (std::size_t y = 0; y < size; ++y)
    {
      for (std::size_t x = 0; x < size; ++x)
      {
        put(img, r0 + static_cast<std::ptrdiff_t>(y), c0 + static_cast<std::ptrdiff_t>(x),
            kind == Clutter::dark ? kDark : kLight);
      }
    }
    break;
  case Clutter::stripes:
  {
    // Two class colors in alternating one-pixel stripes.
    Rgb const  a          = kPalette[rng.below(n_classes) % kPalette.size()];
    Rgb const  b          = kPalette[rng.below(n_classes) % kPalette.size()];
    bool const horizontal = rng.coin();
    for (std::size_t y = 0; y < size; ++y)
    {
      for (std::size_t x = 0; x < size; ++x)
      {
        std::size_t const phase = horizontal ? y : x;
        put(img, r0 + static_cast<std::ptrdiff_t>(y), c0 + static_cast<std::ptrdiff_t>(x),
            phase % 2 == 0 ? a : b);
      }
    }
    break;
  }
  case Clutter::decoy:
    paint_cue(img, r0, c0, size, rng.below(n_classes));
    break;
  }
}

std::string format_index(std::size_t label, std::size_t index)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "c%zu_%05zu.ppm", label, index);
  return buf;
}

std::vector<std::string> split_csv_line(std::string const &line)
{
  std::vector<std::string> fields;
  std::string              field;
  std::istringstream       in(line);
  while (std::getline(in, field, ','))
  {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',')
  {
    fields.emplace_back();
  }
  return fields;
}

std::size_t parse_index(std::string const &text, std::string const &what)
{
  std::size_t value = 0;
  std::size_t used  = 0;
  try
  {
    value = std::stoull(text, &used);
  }
  catch (std::exception const &)
  {
    used = 0;
  }
  if (used == 0 || used != text.size())
  {
    throw ConfigError("invalid " + what + " '" + text + "'");
  }
  return value;
}

nlohmann::json to_json(SceneSpec const &s)
{
  return {{"n_classes", s.n_classes},     {"images_per_class", s.images_per_class},
          {"image_height", s.image_height}, {"image_width", s.image_width},
          {"cue_size", s.cue_size},       {"clutter_count", s.clutter_count},
          {"occlusion_prob", s.occlusion_prob}, {"seed", s.seed}};
}

SceneSpec scene_from_json(nlohmann::json const &j)
{
  SceneSpec s;
  s.n_classes        = j.at("n_classes").get<std::size_t>();
  s.images_per_class = j.at("images_per_class").get<std::size_t>();
  s.image_height     = j.at("image_height").get<std::size_t>();
  s.image_width      = j.at("image_width").get<std::size_t>();
  s.cue_size         = j.at("cue_size").get<std::size_t>();
  s.clutter_count    = j.at("clutter_count").get<std::size_t>();
  s.occlusion_prob   = j.at("occlusion_prob").get<double>();
  s.seed             = j.at("seed").get<std::uint64_t>();
  return s;
}

// Inclusive range for the cue's top-left coordinate along one axis.
std::pair<std::size_t, std::size_t> cue_range(std::size_t extent, std::size_t cue)
{
  std::size_t const zone_lo = extent / 4;
  std::size_t const zone_hi = extent - extent / 4;
  for (std::size_t margin : {kCueMargin, std::size_t{0}})
  {
    if (zone_lo + margin + cue <= zone_hi - margin)
    {
      return {zone_lo + margin, zone_hi - margin - cue};
    }
  }
  std::size_t const centered = (extent - cue) / 2;
  return {centered, centered};
}

}  // namespace

void SceneSpec::validate() const
{
  if (n_classes == 0 || images_per_class == 0)
  {
    throw ConfigError("scene needs at least one class and one image per class");
  }
  if (cue_size == 0 || cue_size >= image_height || cue_size >= image_width)
  {
    throw ConfigError("cue_size must be positive and smaller than the image edge");
  }
  if (!(occlusion_prob >= 0.0 && occlusion_prob <= 1.0))
  {
    throw ConfigError("occlusion_prob must lie in [0, 1]");
  }
}

std::array<std::uint8_t, 3> cue_color(std::size_t label) noexcept
{
  return kPalette[label % kPalette.size()];
}

SceneImage render_scene(SceneSpec const &spec, std::size_t label, std::uint64_t image_seed)
{
  spec.validate();
  if (label >= spec.n_classes)
  {
    throw InputError("label " + std::to_string(label) + " out of range");
  }
  SplitMix64        rng(image_seed);
  std::size_t const h = spec.image_height;
  std::size_t const w = spec.image_width;
  std::size_t const q = spec.cue_size;

  SceneImage out;
  out.image = Image8(w, h, 3);
  for (auto &p : out.image.pixels)
  {
    auto const t = static_cast<int>(rng.below(2 * kTextureAmplitude + 1)) - kTextureAmplitude;
    p            = static_cast<std::uint8_t>(128 + t);
  }

  auto const [row_lo, row_hi] = cue_range(h, q);
  auto const [col_lo, col_hi] = cue_range(w, q);
  out.cue.size = q;
  out.cue.row  = row_lo + rng.below(row_hi - row_lo + 1);
  out.cue.col  = col_lo + rng.below(col_hi - col_lo + 1);
  paint_cue(out.image, static_cast<std::ptrdiff_t>(out.cue.row),
            static_cast<std::ptrdiff_t>(out.cue.col), q, label);

  std::size_t clutter = spec.clutter_count;
  if (clutter > 0 && rng.uniform() < spec.occlusion_prob)
  {
    // One distractor covers a corner of the cue but never its center pixel.
    out.occluded         = true;
    std::size_t const ov = std::max<std::size_t>(1, q / 3);
    bool const        below  = rng.coin();
    bool const        right  = rng.coin();
    auto const        r      = static_cast<std::ptrdiff_t>(out.cue.row) +
                   (below ? static_cast<std::ptrdiff_t>(q - ov) : -static_cast<std::ptrdiff_t>(q - ov));
    auto const c = static_cast<std::ptrdiff_t>(out.cue.col) +
                   (right ? static_cast<std::ptrdiff_t>(q - ov) : -static_cast<std::ptrdiff_t>(q - ov));
    auto const kind = static_cast<Clutter>(rng.below(3));
    paint_clutter(out.image, rng, kind, r, c, q, spec.n_classes);
    --clutter;
  }

  Rect const zone{h / 4, w / 4, h - 2 * (h / 4), w - 2 * (w / 4)};
  for (std::size_t k = 0; k < clutter; ++k)
  {
    auto const        kind = static_cast<Clutter>(rng.below(4));
    std::size_t const size =
        kind == Clutter::decoy ? q : std::max<std::size_t>(2, q - 2 + rng.below(4));
    if (size > h || size > w)
    {
      continue;
    }
    // Rejection-sample a spot in the outer band; give up quietly if it is too thin.
    for (int attempt = 0; attempt < 64; ++attempt)
    {
      Rect const spot{rng.below(h - size + 1), rng.below(w - size + 1), size, size};
      if (!spot.intersects(zone))
      {
        paint_clutter(out.image, rng, kind, static_cast<std::ptrdiff_t>(spot.row),
                      static_cast<std::ptrdiff_t>(spot.col), size, spec.n_classes);
        break;
      }
    }
  }
  return out;
}

std::string_view to_string(Split split) noexcept
{
  switch (split)
  {
  case Split::train:
    return "train";
  case Split::val:
    return "val";
  case Split::test:
    return "test";
  }
  return "train";
}

Split parse_split(std::string_view text)
{
  if (text == "train")
  {
    return Split::train;
  }
  if (text == "val")
  {
    return Split::val;
  }
  if (text == "test")
  {
    return Split::test;
  }
  throw ConfigError("unknown split '" + std::string(text) + "'");
}

std::array<std::size_t, 3> split_counts(std::size_t n)
{
  // Quotas are n * {3, 1, 1} / 5.
  constexpr std::array<std::size_t, 3> weights{3, 1, 1};
  std::array<std::size_t, 3>           counts{};
  std::array<std::size_t, 3>           remainders{};
  std::size_t                          assigned = 0;
  for (std::size_t i = 0; i < 3; ++i)
  {
    counts[i]     = n * weights[i] / 5;
    remainders[i] = n * weights[i] % 5;
    assigned += counts[i];
  }
  for (std::size_t left = n - assigned; left > 0; --left)
  {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i)
    {
      if (remainders[i] > remainders[best])
      {
        best = i;
      }
    }
    ++counts[best];
    remainders[best] = 0;
  }
  return counts;
}

std::vector<ManifestRow> split_dataset(std::vector<LabeledItem> const &items, std::uint64_t seed)
{
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < items.size(); ++i)
  {
    by_class[items[i].label].push_back(i);
  }

  std::vector<ManifestRow> rows;
  rows.reserve(items.size());
  for (auto const &item : items)
  {
    rows.push_back({item.path, item.label, Split::train});
  }
  for (auto &[label, members] : by_class)
  {
    SplitMix64 rng(derive_seed(seed, label));
    rng.shuffle(std::span<std::size_t>(members));
    auto const  counts = split_counts(members.size());
    std::size_t k      = 0;
    for (; k < counts[0]; ++k)
    {
      rows[members[k]].split = Split::train;
    }
    for (; k < counts[0] + counts[1]; ++k)
    {
      rows[members[k]].split = Split::val;
    }
    for (; k < members.size(); ++k)
    {
      rows[members[k]].split = Split::test;
    }
  }
  return rows;
}

std::size_t DatasetManifest::n_classes() const
{
  if (scene)
  {
    return scene->n_classes;
  }
  std::size_t n = 0;
  for (auto const &r : rows)
  {
    n = std::max(n, r.label + 1);
  }
  return n;
}

std::size_t DatasetManifest::count(Split split) const
{
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [split](auto const &r) { return r.split == split; }));
}

void DatasetManifest::validate() const
{
  std::set<std::string> seen;
  std::size_t const     n = n_classes();
  for (auto const &r : rows)
  {
    if (!seen.insert(r.path).second)
    {
      throw ConfigError("duplicate manifest path '" + r.path + "'");
    }
    if (r.label >= n)
    {
      throw ConfigError("label " + std::to_string(r.label) + " of '" + r.path + "' exceeds " +
                        std::to_string(n) + " classes");
    }
  }
  if (!cues.empty() && cues.size() != rows.size())
  {
    throw ConfigError("cue annotations do not cover every manifest row");
  }
}

void write_manifest(DatasetManifest const &manifest, std::filesystem::path const &csv_path)
{
  manifest.validate();
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open " + csv_path.string() + " for writing");
  }
  out << "path,label,split\n";
  for (auto const &r : manifest.rows)
  {
    out << r.path << ',' << r.label << ',' << to_string(r.split) << '\n';
  }

  auto const dir = csv_path.parent_path();
  if (manifest.scene)
  {
    std::ofstream spec_out(dir / kSceneSpecFile, std::ios::trunc);
    spec_out << to_json(*manifest.scene).dump(2) << '\n';
    if (!spec_out)
    {
      throw IoError("failed writing " + (dir / kSceneSpecFile).string());
    }
  }
  if (!manifest.cues.empty())
  {
    std::ofstream cue_out(dir / kCueFile, std::ios::trunc);
    cue_out << "path,row,col,size\n";
    for (std::size_t i = 0; i < manifest.rows.size(); ++i)
    {
      auto const &c = manifest.cues[i];
      cue_out << manifest.rows[i].path << ',' << c.row << ',' << c.col << ',' << c.size << '\n';
    }
    if (!cue_out)
    {
      throw IoError("failed writing " + (dir / kCueFile).string());
    }
  }
  if (!out)
  {
    throw IoError("failed writing " + csv_path.string());
  }
}

DatasetManifest read_manifest(std::filesystem::path const &csv_path)
{
  std::ifstream in(csv_path);
  if (!in)
  {
    throw IoError("cannot open manifest " + csv_path.string());
  }
  DatasetManifest manifest;
  manifest.root = csv_path.parent_path();

  std::string line;
  if (!std::getline(in, line) || line != "path,label,split")
  {
    throw ConfigError("manifest must start with header 'path,label,split'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line))
  {
    ++line_no;
    if (line.empty())
    {
      continue;
    }
    auto const fields = split_csv_line(line);
    if (fields.size() != 3)
    {
      throw ConfigError("manifest line " + std::to_string(line_no) + " needs 3 fields");
    }
    manifest.rows.push_back(
        {fields[0], parse_index(fields[1], "label"), parse_split(fields[2])});
  }

  auto const spec_path = manifest.root / kSceneSpecFile;
  if (std::filesystem::exists(spec_path))
  {
    std::ifstream spec_in(spec_path);
    try
    {
      manifest.scene = scene_from_json(nlohmann::json::parse(spec_in));
    }
    catch (nlohmann::json::exception const &err)
    {
      throw ConfigError(spec_path.string() + ": " + err.what());
    }
  }

  auto const cue_path = manifest.root / kCueFile;
  if (std::filesystem::exists(cue_path))
  {
    std::ifstream                 cue_in(cue_path);
    std::map<std::string, CueBox> boxes;
    std::getline(cue_in, line);
    while (std::getline(cue_in, line))
    {
      if (line.empty())
      {
        continue;
      }
      auto const f = split_csv_line(line);
      if (f.size() != 4)
      {
        throw ConfigError("malformed cue annotation line '" + line + "'");
      }
      boxes[f[0]] = CueBox{parse_index(f[1], "cue row"), parse_index(f[2], "cue col"),
                           parse_index(f[3], "cue size")};
    }
    for (auto const &r : manifest.rows)
    {
      auto it = boxes.find(r.path);
      if (it == boxes.end())
      {
        manifest.cues.clear();
        break;
      }
      manifest.cues.push_back(it->second);
    }
  }
  manifest.validate();
  return manifest;
}

DatasetManifest generate_dataset(SceneSpec const &spec, std::filesystem::path const &out_dir)
{
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
  {
    throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  }

  DatasetManifest manifest;
  manifest.root  = out_dir;
  manifest.scene = spec;

  std::vector<LabeledItem> items;
  for (std::size_t label = 0; label < spec.n_classes; ++label)
  {
    for (std::size_t i = 0; i < spec.images_per_class; ++i)
    {
      std::uint64_t const index = label * spec.images_per_class + i;
      SceneImage          scene = render_scene(spec, label, derive_seed(spec.seed, index));
      std::string const   name  = format_index(label, i);
      write_image(scene.image, out_dir / name);
      items.push_back({name, label});
      manifest.cues.push_back(scene.cue);
    }
  }
  manifest.rows = split_dataset(items, derive_seed(spec.seed, kSplitStream));
  write_manifest(manifest, out_dir / kManifestFile);
  return manifest;
}

std::vector<Sample const *> LoadedDataset::split(Split which) const
{
  std::vector<Sample const *> out;
  for (auto const &s : samples)
  {
    if (s.split == which)
    {
      out.push_back(&s);
    }
  }
  return out;
}

std::size_t LoadedDataset::count(Split which) const
{
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [which](auto const &s) { return s.split == which; }));
}

LoadedDataset load_dataset(DatasetManifest const &manifest, std::optional<ImageSize> resize)
{
  manifest.validate();
  LoadedDataset data;
  data.n_classes = manifest.n_classes();
  data.scene     = manifest.scene;
  data.samples.reserve(manifest.rows.size());
  for (std::size_t i = 0; i < manifest.rows.size(); ++i)
  {
    auto const &row = manifest.rows[i];
    Sample      s;
    s.path   = row.path;
    s.label  = row.label;
    s.split  = row.split;
    s.pixels = read_image8(manifest.root / row.path);
    if (resize)
    {
      s.pixels = resize_nearest(s.pixels, *resize);
    }
    s.image = to_tensor(s.pixels);
    if (!manifest.cues.empty() && !resize)
    {
      s.cue = manifest.cues[i];
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

}  // namespace maskselect
