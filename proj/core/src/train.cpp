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

#include "maskselect/train.hpp"

#include "maskselect/adam.hpp"
#include "maskselect/errors.hpp"
#include "maskselect/format.hpp"
#include "maskselect/rng.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace maskselect {

namespace {
constexpr std::uint64_t kInitStream    = 1;
constexpr std::uint64_t kShuffleStream = 2;
}  // namespace

void TrainConfig::validate() const
{
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
  {
    throw ConfigError("learning rate must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
  {
    throw ConfigError("lambda must be nonnegative");
  }
  if (batch_size == 0 || max_epochs == 0 || patience == 0)
  {
    throw ConfigError("batch_size, max_epochs and patience must be positive");
  }
}

std::string TrainRecord::to_csv() const
{
  std::ostringstream out;
  out << "epoch,train_loss,val_loss,val_acc\n";
  for (auto const &e : epochs)
  {
    out << e.epoch << ',' << format_number(e.train_loss) << ',' << format_number(e.val_loss) << ','
        << format_number(e.val_accuracy) << '\n';
  }
  return out.str();
}

void TrainRecord::write_csv(std::filesystem::path const &path) const
{
  std::ofstream out(path, std::ios::trunc);
  out << to_csv();
  if (!out)
  {
    throw IoError("failed writing " + path.string());
  }
}

SampleGradient compute_gradient(ModelParams const &params, Tensor const &image, std::size_t label,
                                double lambda)
{
  Tape       tape;
  auto const graph = build_forward(tape, params, image);
  Var const  ce    = ops::softmax_cross_entropy(graph.logits, label);

  SampleGradient out;
  Var            objective = ce;
  if (graph.mask)
  {
    MaskedLoss loss = total_loss(ce, *graph.mask, lambda);
    out.loss        = loss.breakdown;
    objective       = loss.total;
  }
  else
  {
    out.loss.prediction_loss = ce.value().item();
    out.loss.lambda          = 0.0;
    out.loss.total           = out.loss.prediction_loss;
  }

  tape.backward(objective);
  out.grads.reserve(graph.parameters.size());
  for (auto const &p : graph.parameters)
  {
    out.grads.push_back(p.grad());
  }
  return out;
}

EncoderConfig encoder_config_for(LoadedDataset const &data, std::vector<std::size_t> block_channels)
{
  if (data.samples.empty())
  {
    throw ConfigError("dataset is empty");
  }
  auto const   &first = data.samples.front().image;
  EncoderConfig cfg;
  cfg.channels       = first.dim(0);
  cfg.height         = first.dim(1);
  cfg.width          = first.dim(2);
  cfg.block_channels = std::move(block_channels);
  cfg.n_classes      = data.n_classes;
  cfg.validate();
  return cfg;
}

double mean_prediction_loss(ModelParams const &params, LoadedDataset const &data, Split split)
{
  auto const samples = data.split(split);
  if (samples.empty())
  {
    throw ConfigError("split '" + std::string(to_string(split)) + "' is empty");
  }
  double total = 0.0;
  for (auto const *s : samples)
  {
    Tensor const logits = predict(params, s->image);
    Tape         tape;
    total += ops::softmax_cross_entropy(tape.constant(logits), s->label).value().item();
  }
  return total / static_cast<double>(samples.size());
}

TrainResult train(TrainConfig const &config, LoadedDataset const &data)
{
  config.validate();
  auto const train_set = data.split(Split::train);
  if (train_set.empty())
  {
    throw ConfigError("training split is empty");
  }
  if (data.count(Split::val) == 0)
  {
    throw ConfigError("validation split is empty");
  }
  for (auto const &s : data.samples)
  {
    if (s.label >= data.n_classes)
    {
      throw ConfigError("label " + std::to_string(s.label) + " of '" + s.path + "' exceeds " +
                        std::to_string(data.n_classes) + " classes");
    }
  }

  auto const start = std::chrono::steady_clock::now();

  EncoderConfig const encoder = encoder_config_for(data, config.block_channels);
  ModelParams params = ModelParams::initialize(encoder, config.variant, derive_seed(config.seed, kInitStream));
  std::vector<Tensor *> const tensors = params.parameters();
  std::vector<Tensor const *> const_tensors(tensors.begin(), tensors.end());
  AdamState                   adam = AdamState::zeros_like(const_tensors);
  SplitMix64                  shuffler(derive_seed(config.seed, kShuffleStream));

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{params, {}};
  double      best_val = std::numeric_limits<double>::infinity();
  std::size_t stale    = 0;

  std::vector<Tensor> batch_grads;
  for (auto const *t : tensors)
  {
    batch_grads.emplace_back(t->shape());
  }

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch)
  {
    shuffler.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;

    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index)
    {
      std::size_t const end = std::min(order.size(), begin + config.batch_size);
      for (auto &g : batch_grads)
      {
        g.fill(0.0);
      }
      for (std::size_t i = begin; i < end; ++i)
      {
        Sample const  &s    = *train_set[order[i]];
        SampleGradient step = compute_gradient(params, s.image, s.label, config.lambda);
        if (!std::isfinite(step.loss.total))
        {
          throw TrainingFailure("non-finite loss", static_cast<int>(epoch),
                                static_cast<int>(batch_index));
        }
        epoch_loss += step.loss.total;
        for (std::size_t p = 0; p < batch_grads.size(); ++p)
        {
          auto dst = batch_grads[p].data();
          auto src = step.grads[p].data();
          for (std::size_t j = 0; j < dst.size(); ++j)
          {
            dst[j] += src[j];
          }
        }
      }
      double const inv = 1.0 / static_cast<double>(end - begin);
      for (auto &g : batch_grads)
      {
        for (auto &v : g.data())
        {
          v *= inv;
        }
      }
      adam_step(tensors, batch_grads, adam, config.learning_rate);
    }

    EpochStats stats;
    stats.epoch        = epoch;
    stats.train_loss   = epoch_loss / static_cast<double>(order.size());
    {
      auto const val     = data.split(Split::val);
      double     loss    = 0.0;
      std::size_t correct = 0;
      for (auto const *s : val)
      {
        Tensor const logits = predict(params, s->image);
        Tape         tape;
        loss += ops::softmax_cross_entropy(tape.constant(logits), s->label).value().item();
        correct += argmax(logits) == s->label ? 1 : 0;
      }
      stats.val_loss     = loss / static_cast<double>(val.size());
      stats.val_accuracy = static_cast<double>(correct) / static_cast<double>(val.size());
    }
    if (!std::isfinite(stats.val_loss))
    {
      throw TrainingFailure("non-finite validation loss", static_cast<int>(epoch),
                            static_cast<int>(batch_index));
    }
    result.record.epochs.push_back(stats);
    result.record.stopping_epoch = epoch;

    if (stats.val_loss < best_val)
    {
      best_val                 = stats.val_loss;
      stale                    = 0;
      result.params            = params;
      result.record.best_epoch = epoch;
    }
    else if (++stale >= config.patience)
    {
      result.record.stopped_early = true;
      break;
    }
  }

  result.record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

EvalResult score_predictions(std::vector<std::size_t> const &predicted,
                             std::vector<std::size_t> const &labels, std::size_t n_classes)
{
  if (predicted.size() != labels.size())
  {
    throw InputError("prediction and label counts differ");
  }
  if (labels.empty())
  {
    throw ConfigError("cannot score an empty split");
  }
  EvalResult r;
  r.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i)
  {
    if (labels[i] >= n_classes || predicted[i] >= n_classes)
    {
      throw InputError("class index out of range");
    }
    ++r.confusion[labels[i]][predicted[i]];
    if (labels[i] == predicted[i])
    {
      ++r.correct;
    }
  }
  r.total    = labels.size();
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

EvalResult evaluate(ModelParams const &params, std::vector<Tensor> const &images,
                    std::vector<std::size_t> const &labels)
{
  if (images.empty())
  {
    throw ConfigError("cannot evaluate an empty split");
  }
  std::vector<std::size_t> predicted;
  predicted.reserve(images.size());
  for (auto const &img : images)
  {
    predicted.push_back(argmax(predict(params, img)));
  }
  return score_predictions(predicted, labels, params.config.n_classes);
}

EvalResult evaluate(ModelParams const &params, LoadedDataset const &data, Split split)
{
  auto const samples = data.split(split);
  if (samples.empty())
  {
    throw ConfigError("split '" + std::string(to_string(split)) + "' is empty");
  }
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> labels;
  for (auto const *s : samples)
  {
    predicted.push_back(argmax(predict(params, s->image)));
    labels.push_back(s->label);
  }
  return score_predictions(predicted, labels, params.config.n_classes);
}

}  // namespace maskselect
