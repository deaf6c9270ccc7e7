#include "maskselect/autodiff.hpp"
#include "maskselect/errors.hpp"
#include "maskselect/mask.hpp"
#include "support/fixtures.hpp"
#include "support/gradient_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace maskselect;
using maskselect::testing::check_gradients;
using maskselect::testing::random_tensor;

namespace {

constexpr double kTolerance = 1e-4;

// Direct seven-loop cross-correlation, independent of the production kernel layout.
Tensor naive_conv(Tensor const &x, Tensor const &k, Tensor const &b, std::size_t stride,
                  std::size_t pad)
{
  std::size_t const ci = x.dim(0), h = x.dim(1), w = x.dim(2), co = k.dim(0);
  std::size_t const ho = (h + 2 * pad - 3) / stride + 1;
  std::size_t const wo = (w + 2 * pad - 3) / stride + 1;
  Tensor            out({co, ho, wo});
  for (std::size_t o = 0; o < co; ++o)
    for (std::size_t y = 0; y < ho; ++y)
      for (std::size_t xx = 0; xx < wo; ++xx)
      {
        double acc = b[o];
        for (std::size_t c = 0; c < ci; ++c)
          for (std::size_t ky = 0; ky < 3; ++ky)
            for (std::size_t kx = 0; kx < 3; ++kx)
            {
              long const iy = static_cast<long>(y * stride + ky) - static_cast<long>(pad);
              long const ix = static_cast<long>(xx * stride + kx) - static_cast<long>(pad);
              if (iy < 0 || ix < 0 || iy >= static_cast<long>(h) || ix >= static_cast<long>(w))
                continue;
              acc += k[((o * ci + c) * 3 + ky) * 3 + kx] *
                     x[(c * h + static_cast<std::size_t>(iy)) * w + static_cast<std::size_t>(ix)];
            }
        out.at(o, y, xx) = acc;
      }
  return out;
}

}  // namespace

TEST_CASE("conv2d on a ones image counts the taps inside the image")
{
  Tape  tape;
  Var   x = tape.leaf(Tensor({1, 3, 3}, 1.0));
  Var   k = tape.leaf(Tensor({1, 1, 3, 3}, 1.0));
  Var   b = tape.leaf(Tensor({1}, 0.0));
  auto &y = ops::conv2d(x, k, b, 1, 1).value();
  CHECK(y.at(0, 0, 0) == 4.0);
  CHECK(y.at(0, 0, 1) == 6.0);
  CHECK(y.at(0, 1, 1) == 9.0);
}

TEST_CASE("conv2d matches a direct loop across strides and paddings")
{
  for (auto [stride, pad] : {std::pair{1u, 0u}, std::pair{1u, 1u}, std::pair{2u, 1u}, std::pair{2u, 0u}})
  {
    Tensor const x = random_tensor({3, 7, 6}, 11 + stride);
    Tensor const k = random_tensor({4, 3, 3, 3}, 12 + pad);
    Tensor const b = random_tensor({4}, 13);
    Tape         tape;
    Tensor const got = ops::conv2d(tape.leaf(x), tape.leaf(k), tape.leaf(b), stride, pad).value();
    CHECK(max_abs_diff(got, naive_conv(x, k, b, stride, pad)) < 1e-12);
  }
}

TEST_CASE("conv2d validates its operands")
{
  Tape tape;
  Var  x = tape.leaf(Tensor({2, 4, 4}));
  CHECK_THROWS_AS(ops::conv2d(x, tape.leaf(Tensor({1, 3, 3, 3})), tape.leaf(Tensor({1})), 1, 1),
                  ConfigError);
  CHECK_THROWS_AS(ops::conv2d(x, tape.leaf(Tensor({1, 2, 3, 3})), tape.leaf(Tensor({2})), 1, 1),
                  ConfigError);
  CHECK_THROWS_AS(ops::conv2d(tape.leaf(Tensor({2, 2, 2})), tape.leaf(Tensor({1, 2, 3, 3})),
                              tape.leaf(Tensor({1})), 1, 0),
                  ConfigError);
}

TEST_CASE("every primitive's adjoint agrees with central differences")
{
  using V = std::vector<Var>;

  SUBCASE("conv2d stride 1, padding 1")
  {
    auto r = check_gradients(
        [](Tape &, V const &v) { return ops::sum(ops::conv2d(v[0], v[1], v[2], 1, 1)); },
        {random_tensor({2, 5, 5}, 1), random_tensor({3, 2, 3, 3}, 2), random_tensor({3}, 3)});
    CHECK(r.max_rel_error <= kTolerance);
  }
  SUBCASE("conv2d stride 2, padding 1, nonuniform upstream gradient")
  {
    Tensor const weights = random_tensor({3, 3, 3}, 9);
    auto         r       = check_gradients(
        [&](Tape &t, V const &v) {
          return ops::sum(ops::mul(ops::conv2d(v[0], v[1], v[2], 2, 1), t.constant(weights)));
        },
        {random_tensor({2, 6, 6}, 4), random_tensor({3, 2, 3, 3}, 5), random_tensor({3}, 6)});
    CHECK(r.max_rel_error <= kTolerance);
  }
  SUBCASE("relu")
  {
    auto r = check_gradients([](Tape &, V const &v) { return ops::sum(ops::relu(v[0])); },
                             {random_tensor({40}, 7)});
    CHECK(r.max_rel_error <= kTolerance);
  }
  SUBCASE("gap")
  {
    Tensor const w = random_tensor({3}, 8);
    auto         r = check_gradients(
        [&](Tape &t, V const &v) { return ops::sum(ops::mul(ops::gap(v[0]), t.constant(w))); },
        {random_tensor({3, 4, 5}, 9)});
    CHECK(r.max_rel_error <= kTolerance);
  }
  SUBCASE("sigmoid")
  {
    auto r = check_gradients([](Tape &, V const &v) { return ops::sum(ops::sigmoid(v[0])); },
                             {random_tensor({30}, 10)});
    CHECK(r.max_rel_error <= kTolerance);
  }
  SUBCASE("linear")
  {
    auto r = check_gradients(
        [](Tape &, V const &v) { return ops::sum(ops::relu(ops::linear(v[0], v[1], v[2]))); },
        {random_tensor({5}, 11), random_tensor({4, 5}, 12), random_tensor({4}, 13)});
    CHECK(r.max_rel_error <= kTolerance);
  }
  SUBCASE("softmax cross-entropy")
  {
    for (std::size_t label = 0; label < 4; ++label)
    {
      auto r = check_gradients(
          [label](Tape &, V const &v) { return ops::softmax_cross_entropy(v[0], label); },
          {random_tensor({4}, 14 + label)});
      CHECK(r.max_rel_error <= kTolerance);
    }
  }
  SUBCASE("add, mul, scale")
  {
    auto r = check_gradients(
        [](Tape &, V const &v) {
          return ops::sum(ops::scale(ops::mul(ops::add(v[0], v[1]), v[1]), -1.5));
        },
        {random_tensor({6}, 20), random_tensor({6}, 21)});
    CHECK(r.max_rel_error <= kTolerance);
  }
  SUBCASE("abs_sum")
  {
    auto r = check_gradients([](Tape &, V const &v) { return ops::abs_sum(v[0]); },
                             {random_tensor({25}, 22)});
    CHECK(r.max_rel_error <= kTolerance);
  }
  SUBCASE("apply_mask")
  {
    Tensor const w = random_tensor({2, 3, 3}, 23);
    auto         r = check_gradients(
        [&](Tape &t, V const &v) {
          return ops::sum(ops::mul(apply_mask(v[0], mask_from_logits(v[1])), t.constant(w)));
        },
        {random_tensor({2, 3, 3}, 24), random_tensor({3, 3}, 25)});
    CHECK(r.max_rel_error <= kTolerance);
  }
}

TEST_CASE("relu subgradient at zero is zero")
{
  Tape tape;
  Var  x = tape.leaf(Tensor::vector({-1.0, 0.0, 2.0}));
  tape.backward(ops::sum(ops::relu(x)));
  CHECK(x.grad()[0] == 0.0);
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 1.0);
}

TEST_CASE("softmax sums to one and survives large logits")
{
  for (std::uint64_t seed = 0; seed < 20; ++seed)
  {
    Tensor const p     = softmax(random_tensor({6}, seed, -50.0, 50.0));
    double       total = 0.0;
    for (auto v : p.data())
    {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  Tape tape;
  CHECK(std::isfinite(ops::softmax_cross_entropy(tape.leaf(Tensor::vector({1000, -1000})), 1)
                          .value()
                          .item()));
}

TEST_CASE("gap is linear")
{
  Tensor const x = random_tensor({3, 4, 4}, 30);
  Tensor const y = random_tensor({3, 4, 4}, 31);
  double const a = 0.7;
  double const b = -1.3;
  Tensor       mix({3, 4, 4});
  for (std::size_t i = 0; i < mix.size(); ++i)
  {
    mix[i] = a * x[i] + b * y[i];
  }
  Tape         tape;
  Tensor const lhs = ops::gap(tape.leaf(mix)).value();
  Tensor const gx  = ops::gap(tape.leaf(x)).value();
  Tensor const gy  = ops::gap(tape.leaf(y)).value();
  for (std::size_t c = 0; c < 3; ++c)
  {
    CHECK(std::abs(lhs[c] - (a * gx[c] + b * gy[c])) <= 1e-12);
  }
}

TEST_CASE("repeated backward passes give bitwise-identical gradients")
{
  Tape tape;
  Var  x    = tape.leaf(random_tensor({2, 5, 5}, 40));
  Var  k    = tape.leaf(random_tensor({3, 2, 3, 3}, 41));
  Var  b    = tape.leaf(random_tensor({3}, 42));
  Var  loss = ops::softmax_cross_entropy(ops::gap(ops::relu(ops::conv2d(x, k, b, 2, 1))), 1);
  tape.backward(loss);
  Tensor const first_k = k.grad();
  Tensor const first_x = x.grad();
  tape.backward(loss);
  CHECK(bitwise_equal(first_k, k.grad()));
  CHECK(bitwise_equal(first_x, x.grad()));
}

TEST_CASE("constants receive no gradient")
{
  Tape tape;
  Var  c = tape.constant(Tensor::vector({1.0, 2.0}));
  Var  w = tape.leaf(Tensor::vector({3.0, 4.0}));
  tape.backward(ops::sum(ops::mul(c, w)));
  CHECK(c.grad()[0] == 0.0);
  CHECK(c.grad()[1] == 0.0);
  CHECK(w.grad()[0] == 1.0);
  CHECK(w.grad()[1] == 2.0);
}

TEST_CASE("operands from different tapes are rejected")
{
  Tape a;
  Tape b;
  CHECK_THROWS_AS(ops::add(a.leaf(Tensor({2})), b.leaf(Tensor({2}))), UsageError);
  CHECK_THROWS_AS(ops::add(a.leaf(Tensor({2})), a.leaf(Tensor({3}))), ShapeError);
  CHECK_THROWS_AS(a.backward(a.leaf(Tensor({2}))), UsageError);
}
