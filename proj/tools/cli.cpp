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

#include "cli.hpp"

#include "maskselect/checkpoint.hpp"
#include "maskselect/errors.hpp"
#include "maskselect/format.hpp"
#include "maskselect/gradcam.hpp"
#include "maskselect/report.hpp"
#include "maskselect/scene.hpp"
#include "maskselect/sweep.hpp"
#include "maskselect/train.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace maskselect::cli {

namespace {

struct GlobalOptions
{
  std::uint64_t seed{0};
  double        lambda{0.1};
  double        learning_rate{1e-3};
  bool          noise_as_stddev{false};
};

struct TrainingOptions
{
  std::string              variant{"masked"};
  std::size_t              batch_size{16};
  std::size_t              max_epochs{200};
  std::size_t              patience{10};
  std::vector<std::size_t> blocks{8, 16};
};

void add_training_flags(CLI::App *cmd, TrainingOptions &t)
{
  cmd->add_option("--batch-size", t.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--max-epochs", t.max_epochs, "Epoch limit")->capture_default_str();
  cmd->add_option("--patience", t.patience, "Early-stopping patience in epochs")->capture_default_str();
  cmd->add_option("--blocks", t.blocks, "Conv block channel counts, comma separated")
      ->delimiter(',')
      ->capture_default_str();
}

TrainConfig make_train_config(GlobalOptions const &g, TrainingOptions const &t)
{
  TrainConfig cfg;
  cfg.learning_rate  = g.learning_rate;
  cfg.lambda         = g.lambda;
  cfg.seed           = g.seed;
  cfg.batch_size     = t.batch_size;
  cfg.max_epochs     = t.max_epochs;
  cfg.patience       = t.patience;
  cfg.block_channels = t.blocks;
  cfg.variant        = parse_variant(t.variant);
  return cfg;
}

std::optional<ImageSize> resize_option(std::size_t edge)
{
  if (edge == 0)
  {
    return std::nullopt;
  }
  return ImageSize{edge, edge};
}

void write_text(std::filesystem::path const &path, std::string const &text)
{
  std::ofstream f(path, std::ios::trunc);
  f << text;
  if (!f)
  {
    throw IoError("failed writing " + path.string());
  }
}

}  // namespace

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Learnable spatial mask feature selection for scene recognition", "maskselect"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for data generation, initialization and shuffling")
      ->capture_default_str();
  app.add_option("--lambda", g.lambda, "Weight of the L1 mask regularizer")->capture_default_str();
  app.add_option("--lr", g.learning_rate, "Adam learning rate")->capture_default_str();
  app.add_flag("--noise-as-stddev", g.noise_as_stddev,
               "Treat Gaussian noise levels as standard deviations instead of variances");

  // gen-data
  SceneSpec   scene;
  std::string data_dir;
  auto       *gen = app.add_subcommand("gen-data", "Render the synthetic scene dataset");
  gen->add_option("--out", data_dir, "Output directory")->required();
  gen->add_option("--classes", scene.n_classes)->capture_default_str();
  gen->add_option("--per-class", scene.images_per_class)->capture_default_str();
  gen->add_option("--height", scene.image_height)->capture_default_str();
  gen->add_option("--width", scene.image_width)->capture_default_str();
  gen->add_option("--cue-size", scene.cue_size)->capture_default_str();
  gen->add_option("--clutter", scene.clutter_count)->capture_default_str();
  gen->add_option("--occlusion", scene.occlusion_prob)->capture_default_str();

  // train
  TrainingOptions training;
  std::string     manifest_path;
  std::string     checkpoint_path;
  std::string     record_path;
  std::size_t     resize = 0;
  auto           *train_cmd = app.add_subcommand("train", "Train one model and save a checkpoint");
  train_cmd->add_option("--manifest", manifest_path, "Dataset manifest CSV")->required();
  train_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint output path")->required();
  train_cmd->add_option("--record", record_path, "Per-epoch training record CSV output");
  train_cmd->add_option("--variant", training.variant, "baseline or masked")
      ->check(CLI::IsMember({"baseline", "masked"}))
      ->capture_default_str();
  train_cmd->add_option("--resize", resize, "Nearest-neighbor resize images to N x N on load");
  add_training_flags(train_cmd, training);

  // eval
  std::string split_name = "test";
  auto       *eval_cmd   = app.add_subcommand("eval", "Print the accuracy of a checkpoint on one split");
  eval_cmd->add_option("--checkpoint", checkpoint_path)->required();
  eval_cmd->add_option("--manifest", manifest_path)->required();
  eval_cmd->add_option("--split", split_name)
      ->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();
  eval_cmd->add_option("--resize", resize);

  // robustness
  std::vector<std::string>   checkpoints;
  std::string                noise_kind = "gaussian";
  std::vector<double>        levels;
  std::vector<std::uint64_t> seeds = kDefaultSeeds;
  std::string                csv_path;
  auto *robust = app.add_subcommand("robustness", "Accuracy of checkpoints under test-time noise");
  robust->add_option("--checkpoints", checkpoints, "Checkpoint paths, comma separated")
      ->delimiter(',')
      ->required();
  robust->add_option("--manifest", manifest_path)->required();
  robust->add_option("--kind", noise_kind)
      ->check(CLI::IsMember({"gaussian", "salt_pepper"}))
      ->capture_default_str();
  robust->add_option("--levels", levels, "Noise levels; defaults to the family's standard set")
      ->delimiter(',');
  robust->add_option("--seeds", seeds)->delimiter(',')->capture_default_str();
  robust->add_option("--out", csv_path, "CSV output path")->required();
  robust->add_option("--resize", resize);

  // sweep
  SensitivityGrid grid;
  std::size_t     workers = 1;
  auto *sweep_cmd = app.add_subcommand("sweep", "Learning-rate x lambda sensitivity of the masked model");
  sweep_cmd->add_option("--manifest", manifest_path)->required();
  sweep_cmd->add_option("--lrs", grid.learning_rates)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--lambdas", grid.lambdas)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--seeds", grid.seeds)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--workers", workers, "Concurrent training runs")->capture_default_str();
  sweep_cmd->add_option("--out", csv_path)->required();
  sweep_cmd->add_option("--resize", resize);
  add_training_flags(sweep_cmd, training);

  // explain
  std::string image_path;
  std::size_t target_class = 0;
  std::string heatmap_path;
  auto       *explain = app.add_subcommand("explain", "Write a Grad-CAM heatmap for one image");
  explain->add_option("--checkpoint", checkpoint_path)->required();
  explain->add_option("--image", image_path, "PPM or PGM input image")->required();
  explain->add_option("--class", target_class, "Target class index")->required();
  explain->add_option("--out", heatmap_path, "Heatmap PGM output path")->required();

  // mask-report
  auto *report_cmd = app.add_subcommand("mask-report", "Per-cell values and summary of a trained mask");
  report_cmd->add_option("--checkpoint", checkpoint_path)->required();
  report_cmd->add_option("--out", csv_path, "CSV output path; stdout when omitted");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("maskselect");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char const *> argv;
  for (auto const &a : argv_store)
  {
    argv.push_back(a.c_str());
  }

  try
  {
    app.parse(static_cast<int>(argv.size()), argv.data());
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e, out, err);
    if (code == 0)
    {
      return kExitOk;
    }
    err << app.help();
    return kExitUsage;
  }

  try
  {
    if (*gen)
    {
      scene.seed          = g.seed;
      auto const manifest = generate_dataset(scene, data_dir);
      out << "wrote " << manifest.rows.size() << " images (" << manifest.count(Split::train)
          << " train, " << manifest.count(Split::val) << " val, " << manifest.count(Split::test)
          << " test) to " << data_dir << '\n';
    }
    else if (*train_cmd)
    {
      auto const data   = load_dataset(read_manifest(manifest_path), resize_option(resize));
      auto const config = make_train_config(g, training);
      auto const result = train(config, data);
      save_checkpoint(result.params, checkpoint_path);
      if (!record_path.empty())
      {
        result.record.write_csv(record_path);
      }
      auto const &best = result.record.epochs.at(result.record.best_epoch - 1);
      out << "variant=" << to_string(config.variant) << " best_epoch=" << result.record.best_epoch
          << " stopping_epoch=" << result.record.stopping_epoch
          << " val_loss=" << format_number(best.val_loss)
          << " val_acc=" << format_number(best.val_accuracy) << '\n';
    }
    else if (*eval_cmd)
    {
      auto const params = load_checkpoint(checkpoint_path);
      auto const data   = load_dataset(read_manifest(manifest_path), resize_option(resize));
      out << format_number(evaluate(params, data, parse_split(split_name)).accuracy) << '\n';
    }
    else if (*robust)
    {
      auto const             data = load_dataset(read_manifest(manifest_path), resize_option(resize));
      std::vector<NamedModel> models;
      for (auto const &path : checkpoints)
      {
        models.push_back({std::filesystem::path(path).stem().string(), load_checkpoint(path)});
      }
      RobustnessOptions options;
      options.kind            = parse_noise_kind(noise_kind);
      options.levels          = !levels.empty() ? levels
                                : options.kind == NoiseKind::gaussian ? kGaussianLevels
                                                                      : kSaltPepperLevels;
      options.seeds           = seeds;
      options.level_is_stddev = g.noise_as_stddev;
      auto const rows         = robustness_sweep(models, data, options);
      write_text(csv_path, robustness_csv(rows));
      out << "wrote " << rows.size() << " rows to " << csv_path << '\n';
    }
    else if (*sweep_cmd)
    {
      auto const data  = load_dataset(read_manifest(manifest_path), resize_option(resize));
      auto       base  = make_train_config(g, training);
      auto const cells = sensitivity_sweep(grid, data, base, workers);
      std::vector<SensitivityRow> rows;
      for (auto const &c : cells)
      {
        rows.push_back(c.row);
      }
      write_text(csv_path, sensitivity_csv(rows));
      out << "wrote " << rows.size() << " rows to " << csv_path << '\n';
    }
    else if (*explain)
    {
      auto const params = load_checkpoint(checkpoint_path);
      auto const image  = read_image(image_path, ImageSize{params.config.height, params.config.width});
      auto const heat   = grad_cam(params, image, target_class);
      write_image(heat.upsampled, heatmap_path);
      out << "class=" << target_class << " confidence=" << format_number(heat.confidence) << '\n';
    }
    else if (*report_cmd)
    {
      auto const report = mask_report(load_checkpoint(checkpoint_path));
      if (csv_path.empty())
      {
        out << report.to_csv();
      }
      else
      {
        write_text(csv_path, report.to_csv());
        out << "mean=" << format_number(report.mean) << " suppressed=" << report.suppressed << '\n';
      }
    }
  }
  catch (std::exception const &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace maskselect::cli
