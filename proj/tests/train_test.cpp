#include "maskselect/errors.hpp"
#include "maskselect/train.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace maskselect;
using namespace maskselect::testing;

namespace {

LoadedDataset const &shared_data()
{
  static TempDir       dir;
  static LoadedDataset data = tiny_dataset(dir.path());
  return data;
}

void check_stopping_contract(TrainRecord const &rec, TrainConfig const &cfg)
{
  REQUIRE(rec.stopping_epoch == rec.epochs.size());
  CHECK(rec.stopping_epoch <= cfg.max_epochs);
  double      best       = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t stale      = 0;
  for (auto const &e : rec.epochs)
  {
    if (e.val_loss < best)
    {
      best       = e.val_loss;
      best_epoch = e.epoch;
      stale      = 0;
    }
    else
    {
      ++stale;
    }
  }
  CHECK(rec.best_epoch == best_epoch);
  if (rec.stopped_early)
  {
    CHECK(stale == cfg.patience);
    CHECK(rec.stopping_epoch == rec.best_epoch + cfg.patience);
  }
  else
  {
    CHECK(rec.stopping_epoch == cfg.max_epochs);
  }
}

}  // namespace

TEST_CASE("training defaults")
{
  TrainConfig const c;
  CHECK(c.learning_rate == 1e-3);
  CHECK(c.lambda == 0.1);
  CHECK(c.batch_size == 16);
  CHECK(c.max_epochs == 200);
  CHECK(c.patience == 10);
  CHECK(c.variant == Variant::masked);
}

TEST_CASE("training is bitwise reproducible for a fixed seed")
{
  auto const cfg = tiny_train_config(5);
  auto const a   = train(cfg, shared_data());
  auto const b   = train(cfg, shared_data());
  CHECK(bitwise_equal(a.params, b.params));
  CHECK(a.record.epochs == b.record.epochs);
  CHECK(a.record.to_csv() == b.record.to_csv());
  check_stopping_contract(a.record, cfg);

  auto const c = train(tiny_train_config(6), shared_data());
  CHECK_FALSE(bitwise_equal(a.params, c.params));
}

TEST_CASE("early stopping restores the best epoch and honors patience")
{
  auto cfg          = tiny_train_config(1);
  cfg.learning_rate = 0.5;
  cfg.patience      = 1;
  cfg.max_epochs    = 30;
  auto const r      = train(cfg, shared_data());
  CHECK(r.record.stopped_early);
  check_stopping_contract(r.record, cfg);

  // The returned parameters reproduce the best epoch's validation loss.
  double const best = r.record.epochs[r.record.best_epoch - 1].val_loss;
  CHECK(mean_prediction_loss(r.params, shared_data(), Split::val) == best);
}

TEST_CASE("record CSV layout")
{
  TrainRecord rec;
  rec.epochs.push_back({1, 0.5, 0.25, 0.75});
  CHECK(rec.to_csv() == "epoch,train_loss,val_loss,val_acc\n1,0.5,0.25,0.75\n");
}

TEST_CASE("with lambda 0 the regularizer never enters the objective")
{
  auto const   p   = ModelParams::initialize(EncoderConfig{}, Variant::masked, 2);
  Tensor const img = random_tensor({3, 32, 32}, 3, 0.0, 1.0);
  auto const   g0  = compute_gradient(p, img, 1, 0.0);
  CHECK(g0.loss.total == g0.loss.prediction_loss);
  CHECK(g0.loss.regularization_loss > 0.0);

  auto const g1   = compute_gradient(p, img, 1, 0.1);
  auto const mask = p.parameter_names();
  for (std::size_t i = 0; i < mask.size(); ++i)
  {
    bool const same = bitwise_equal(g0.grads[i], g1.grads[i]);
    CHECK(same == (mask[i] != "mask.logits"));
  }

  auto cfg   = tiny_train_config(4);
  cfg.lambda = 0.0;
  auto const r = train(cfg, shared_data());
  auto const init = ModelParams::initialize(r.params.config, Variant::masked,
                                            derive_seed(cfg.seed, 1));
  CHECK_FALSE(bitwise_equal(r.params.mask->logits, init.mask->logits));
}

TEST_CASE("baseline variant trains without a mask")
{
  auto cfg    = tiny_train_config(2);
  cfg.variant = Variant::baseline;
  auto const r = train(cfg, shared_data());
  CHECK_FALSE(r.params.mask.has_value());
}

TEST_CASE("invalid configurations and data are rejected")
{
  auto cfg = tiny_train_config();
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train(cfg, shared_data()), ConfigError);

  LoadedDataset no_val = shared_data();
  std::erase_if(no_val.samples, [](Sample const &s) { return s.split == Split::val; });
  CHECK_THROWS_AS(train(tiny_train_config(), no_val), ConfigError);

  LoadedDataset bad_label = shared_data();
  bad_label.samples.front().label = 7;
  CHECK_THROWS_AS(train(tiny_train_config(), bad_label), ConfigError);
}

TEST_CASE("a non-finite loss reports the epoch and batch")
{
  LoadedDataset data = shared_data();
  for (auto &s : data.samples)
  {
    if (s.split == Split::train)
    {
      s.image[0] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  try
  {
    train(tiny_train_config(), data);
    FAIL("expected a training failure");
  }
  catch (TrainingFailure const &e)
  {
    CHECK(e.epoch() == 1);
    CHECK(e.batch() == 0);
  }
}

TEST_CASE("accuracy and confusion counts")
{
  auto const r = score_predictions({0, 1, 1}, {0, 1, 0}, 2);
  CHECK(r.accuracy == 2.0 / 3.0);
  CHECK(r.confusion[0][1] == 1);

  auto const perfect = score_predictions({0, 1, 2, 2}, {0, 1, 2, 2}, 3);
  CHECK(perfect.accuracy == 1.0);
  for (std::size_t i = 0; i < 3; ++i)
  {
    for (std::size_t j = 0; j < 3; ++j)
    {
      CHECK((i == j) == (perfect.confusion[i][j] > 0));
    }
  }

  CHECK(score_predictions({1, 1, 1, 1}, {0, 1, 0, 1}, 2).accuracy == 0.5);
  CHECK_THROWS_AS(score_predictions({}, {}, 2), ConfigError);
  CHECK_THROWS_AS(score_predictions({0}, {0, 1}, 2), InputError);
}

TEST_CASE("evaluate counts argmax hits on a split")
{
  auto const p = ModelParams::initialize(encoder_config_for(shared_data(), {4, 6}),
                                         Variant::masked, 9);
  auto const r = evaluate(p, shared_data(), Split::test);
  CHECK(r.total == shared_data().count(Split::test));
  std::size_t hits = 0;
  for (auto const *s : shared_data().split(Split::test))
  {
    hits += argmax(predict(p, s->image)) == s->label ? 1 : 0;
  }
  CHECK(r.correct == hits);

  LoadedDataset empty = shared_data();
  std::erase_if(empty.samples, [](Sample const &s) { return s.split == Split::test; });
  CHECK_THROWS_AS(evaluate(p, empty, Split::test), ConfigError);
}
