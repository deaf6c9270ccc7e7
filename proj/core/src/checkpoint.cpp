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

#include "maskselect/checkpoint.hpp"

#include "maskselect/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

namespace maskselect {

namespace {

constexpr std::size_t kMagicLength = sizeof(kCheckpointMagic) - 1;
constexpr char        kMetaName[]  = "meta.input_shape";

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i)
  {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_f64(std::vector<std::uint8_t> &out, double v)
{
  auto const bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i)
  {
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
}

class Reader
{
public:
  explicit Reader(std::vector<std::uint8_t> const &bytes)
    : bytes_(bytes)
  {}

  std::uint32_t u32(std::string const &field)
  {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
    {
      v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    }
    return v;
  }

  double f64(std::string const &field)
  {
    need(8, field);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
    {
      bits |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    }
    return std::bit_cast<double>(bits);
  }

  std::string text(std::size_t n, std::string const &field)
  {
    need(n, field);
    std::string s(reinterpret_cast<char const *>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  bool at_end() const noexcept
  {
    return pos_ == bytes_.size();
  }

private:
  void need(std::size_t n, std::string const &field) const
  {
    if (bytes_.size() - pos_ < n)
    {
      throw LoadError("truncated " + field);
    }
  }

  std::vector<std::uint8_t> const &bytes_;
  std::size_t                      pos_{0};
};

struct Entry
{
  std::string name;
  Shape       shape;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(ModelParams const &params)
{
  params.validate();

  Tensor const meta = Tensor::vector({static_cast<double>(params.config.channels),
                                      static_cast<double>(params.config.height),
                                      static_cast<double>(params.config.width)});
  std::vector<std::string>    names   = params.parameter_names();
  std::vector<Tensor const *> tensors = params.parameters();
  names.insert(names.begin(), kMetaName);
  tensors.insert(tensors.begin(), &meta);

  std::vector<std::uint8_t> out(kCheckpointMagic, kCheckpointMagic + kMagicLength);
  put_u32(out, static_cast<std::uint32_t>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i)
  {
    put_u32(out, static_cast<std::uint32_t>(names[i].size()));
    out.insert(out.end(), names[i].begin(), names[i].end());
    put_u32(out, static_cast<std::uint32_t>(tensors[i]->rank()));
    for (auto d : tensors[i]->shape())
    {
      put_u32(out, static_cast<std::uint32_t>(d));
    }
  }
  for (auto const *t : tensors)
  {
    for (auto v : t->data())
    {
      put_f64(out, v);
    }
  }
  return out;
}

ModelParams decode_checkpoint(std::vector<std::uint8_t> const &bytes,
                              std::optional<Variant>           expected)
{
  if (bytes.size() < kMagicLength ||
      std::memcmp(bytes.data(), kCheckpointMagic, kMagicLength) != 0)
  {
    throw LoadError("bad magic");
  }
  Reader in(bytes);
  in.text(kMagicLength, "magic");

  std::uint32_t const count = in.u32("tensor count");
  std::vector<Entry>  entries;
  for (std::uint32_t i = 0; i < count; ++i)
  {
    std::string const where = "manifest entry " + std::to_string(i);
    std::uint32_t     len   = in.u32(where + " name length");
    Entry             e;
    e.name             = in.text(len, where + " name");
    std::uint32_t rank = in.u32("rank of tensor \"" + e.name + "\"");
    if (rank == 0)
    {
      throw LoadError("tensor \"" + e.name + "\" has rank 0");
    }
    for (std::uint32_t r = 0; r < rank; ++r)
    {
      std::uint32_t d = in.u32("dims of tensor \"" + e.name + "\"");
      if (d == 0)
      {
        throw LoadError("tensor \"" + e.name + "\" has a zero dimension");
      }
      e.shape.push_back(d);
    }
    entries.push_back(std::move(e));
  }

  std::map<std::string, Tensor> tensors;
  for (auto const &e : entries)
  {
    std::vector<double> data(shape_size(e.shape));
    for (auto &v : data)
    {
      v = in.f64("tensor \"" + e.name + "\"");
    }
    if (!tensors.emplace(e.name, Tensor(e.shape, std::move(data))).second)
    {
      throw LoadError("duplicate tensor \"" + e.name + "\"");
    }
  }
  if (!in.at_end())
  {
    throw LoadError("trailing bytes after tensor data");
  }

  auto take = [&tensors](std::string const &name) {
    auto it = tensors.find(name);
    if (it == tensors.end())
    {
      throw LoadError("missing tensor \"" + name + "\"");
    }
    Tensor t = std::move(it->second);
    tensors.erase(it);
    return t;
  };

  ModelParams p;
  Tensor      meta = take(kMetaName);
  if (meta.shape() != Shape{3})
  {
    throw LoadError("tensor \"meta.input_shape\" must hold 3 values");
  }
  p.config.channels = static_cast<std::size_t>(meta[0]);
  p.config.height   = static_cast<std::size_t>(meta[1]);
  p.config.width    = static_cast<std::size_t>(meta[2]);
  p.config.block_channels.clear();

  for (std::size_t i = 0; tensors.count("encoder." + std::to_string(i) + ".kernels") != 0; ++i)
  {
    std::string const prefix = "encoder." + std::to_string(i);
    ConvBlockParams   block{take(prefix + ".kernels"), take(prefix + ".bias")};
    if (block.kernels.rank() != 4)
    {
      throw LoadError("tensor \"" + prefix + ".kernels\" must have rank 4");
    }
    p.config.block_channels.push_back(block.kernels.dim(0));
    p.blocks.push_back(std::move(block));
  }
  if (p.blocks.empty())
  {
    throw LoadError("missing tensor \"encoder.0.kernels\"");
  }

  bool const has_mask = tensors.count("mask.logits") != 0;
  if (expected == Variant::baseline && has_mask)
  {
    throw LoadError("unexpected tensor \"mask.logits\" for a baseline model");
  }
  if (expected == Variant::masked && !has_mask)
  {
    throw LoadError("missing tensor \"mask.logits\" for a masked model");
  }
  if (has_mask)
  {
    p.mask = MaskParams{take("mask.logits")};
  }
  p.head_weights = take("head.weights");
  p.head_bias    = take("head.bias");
  if (!tensors.empty())
  {
    throw LoadError("unknown tensor \"" + tensors.begin()->first + "\"");
  }
  p.config.n_classes = p.head_weights.dim(0);

  try
  {
    p.validate();
  }
  catch (Error const &err)
  {
    throw LoadError(std::string("inconsistent checkpoint: ") + err.what());
  }
  return p;
}

void save_checkpoint(ModelParams const &params, std::filesystem::path const &path)
{
  auto const    bytes = encode_checkpoint(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<char const *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
  {
    throw IoError("failed writing " + path.string());
  }
}

ModelParams load_checkpoint(std::filesystem::path const &path, std::optional<Variant> expected)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw IoError("cannot open checkpoint " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes, expected);
}

}  // namespace maskselect
