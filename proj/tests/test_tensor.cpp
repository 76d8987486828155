#include "gfgn/tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "gfgn/error.hpp"
#include "gfgn/rng.hpp"
#include "oracles.hpp"

using gfgn::Tensor;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, gfgn::Rng& rng, bool requires_grad = true,
                     double lo = -1.0, double hi = 1.0) {
  Tensor t(r, c, 0.0, requires_grad);
  for (std::size_t i = 0; i < t.size(); ++i) t.value()[i] = rng.uniform(lo, hi);
  return t;
}

TEST(Matmul, KnownProduct) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor b = Tensor::from_rows({{5, 6}, {7, 8}});
  const Tensor c = gfgn::matmul(a, b);
  EXPECT_EQ(c.at(0, 0), 19.0);
  EXPECT_EQ(c.at(0, 1), 22.0);
  EXPECT_EQ(c.at(1, 0), 43.0);
  EXPECT_EQ(c.at(1, 1), 50.0);
}

TEST(Matmul, ShapeMismatchThrows) {
  const Tensor a(2, 3);
  const Tensor b(2, 2);
  EXPECT_THROW(gfgn::matmul(a, b), gfgn::DimensionError);
}

TEST(Matmul, MatchesLoopOracle) {
  gfgn::Rng rng(11);
  const Tensor a = random_tensor(5, 7, rng, false);
  const Tensor b = random_tensor(7, 3, rng, false);
  const Tensor c = gfgn::matmul(a, b);
  const std::vector<double> ref = oracle::dense_matmul(a.value(), 5, 7, b.value(), 3);
  EXPECT_LT(oracle::max_abs_diff(c.value(), ref), 1e-15);
}

TEST(Elementwise, BasicValues) {
  const Tensor a = Tensor::from_rows({{1, -2}, {3, 4}});
  const Tensor b = Tensor::from_rows({{10, 20}, {30, 40}});
  EXPECT_EQ(gfgn::add(a, b).at(1, 1), 44.0);
  EXPECT_EQ(gfgn::sub(b, a).at(0, 1), 22.0);
  EXPECT_EQ(gfgn::mul(a, b).at(1, 0), 90.0);
  EXPECT_EQ(gfgn::scale(a, -2.0).at(0, 0), -2.0);
  EXPECT_EQ(gfgn::relu(a).at(0, 1), 0.0);
  EXPECT_EQ(gfgn::relu(a).at(1, 0), 3.0);
  EXPECT_EQ(gfgn::sigmoid(Tensor(1, 1)).at(0, 0), 0.5);
}

TEST(Elementwise, RowBroadcast) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor s = Tensor::from_rows({{10, 100}});
  const Tensor out = gfgn::mul(a, s);
  EXPECT_EQ(out.at(0, 0), 10.0);
  EXPECT_EQ(out.at(0, 1), 200.0);
  EXPECT_EQ(out.at(1, 0), 30.0);
  EXPECT_EQ(out.at(1, 1), 400.0);
  EXPECT_THROW(gfgn::add(a, Tensor(1, 3)), gfgn::DimensionError);
  EXPECT_THROW(gfgn::add(a, Tensor(3, 2)), gfgn::DimensionError);
}

TEST(ConcatCols, JoinsAndHandlesEmpty) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor b = Tensor::from_rows({{5}, {6}});
  const Tensor c = gfgn::concat_cols(a, b);
  ASSERT_EQ(c.cols(), 3u);
  EXPECT_EQ(c.at(0, 2), 5.0);
  EXPECT_EQ(c.at(1, 2), 6.0);
  const Tensor empty(2, 0);
  const Tensor same = gfgn::concat_cols(a, empty);
  EXPECT_EQ(same.cols(), 2u);
  EXPECT_EQ(same.at(1, 1), 4.0);
  EXPECT_THROW(gfgn::concat_cols(a, Tensor(3, 1)), gfgn::DimensionError);
}

TEST(RowMean, PoolsAcrossRows) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor m = gfgn::row_mean(a);
  ASSERT_EQ(m.rows(), 1u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_EQ(m.at(0, 0), 2.0);
  EXPECT_EQ(m.at(0, 1), 3.0);
}

TEST(Dropout, IdentityCases) {
  gfgn::Rng rng(3);
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor same_p0 = gfgn::dropout(a, 0.0, true, rng);
  EXPECT_EQ(same_p0.data_ptr().get(), a.data_ptr().get());
  const Tensor same_eval = gfgn::dropout(a, 0.9, false, rng);
  EXPECT_EQ(same_eval.data_ptr().get(), a.data_ptr().get());
  EXPECT_THROW(gfgn::dropout(a, 1.0, true, rng), gfgn::ConfigError);
  EXPECT_THROW(gfgn::dropout(a, -0.1, true, rng), gfgn::ConfigError);
}

TEST(Dropout, InvertedScalingAndRate) {
  gfgn::Rng rng(7);
  const double p = 0.5;
  const Tensor a(40, 50, 1.0);
  const Tensor out = gfgn::dropout(a, p, true, rng);
  std::size_t kept = 0;
  for (const double v : out.value()) {
    ASSERT_TRUE(v == 0.0 || v == 2.0);  // inverted scaling: kept entries * 1/(1-p)
    kept += v != 0.0;
  }
  const double keep_rate = static_cast<double>(kept) / static_cast<double>(out.size());
  EXPECT_NEAR(keep_rate, 1.0 - p, 0.05);
}

TEST(Dropout, DeterministicPerSeed) {
  const Tensor a(8, 8, 1.0);
  gfgn::Rng r1(42), r2(42);
  const Tensor o1 = gfgn::dropout(a, 0.3, true, r1);
  const Tensor o2 = gfgn::dropout(a, 0.3, true, r2);
  EXPECT_EQ(0, std::memcmp(o1.value().data(), o2.value().data(), o1.size() * sizeof(double)));
}

TEST(SoftmaxCrossEntropy, UniformLogitsGiveLogC) {
  for (const std::size_t c : {2u, 3u, 7u}) {
    const Tensor logits(5, c, 0.0);
    std::vector<int> labels(5, static_cast<int>(c) - 1);
    std::vector<int> mask{0, 2, 4};
    const Tensor loss = gfgn::softmax_cross_entropy(logits, labels, mask);
    EXPECT_NEAR(loss.at(0, 0), std::log(static_cast<double>(c)), 1e-14);
  }
}

TEST(SoftmaxCrossEntropy, ValidatesInputs) {
  const Tensor logits(4, 3, 0.0);
  const std::vector<int> labels{0, 1, 2, 0};
  EXPECT_THROW(gfgn::softmax_cross_entropy(logits, labels, {}), gfgn::DimensionError);
  EXPECT_THROW(gfgn::softmax_cross_entropy(logits, labels, {4}), gfgn::DimensionError);
  EXPECT_THROW(gfgn::softmax_cross_entropy(logits, {0, 1, 3, 0}, {2}), gfgn::DimensionError);
  EXPECT_THROW(gfgn::softmax_cross_entropy(logits, {0, 1}, {0}), gfgn::DimensionError);
}

TEST(SoftmaxCrossEntropy, LargeLogitsStayFinite) {
  const Tensor logits = Tensor::from_rows({{1000.0, 0.0}, {-1000.0, -999.0}});
  const Tensor loss = gfgn::softmax_cross_entropy(logits, {0, 1}, {0, 1});
  EXPECT_TRUE(std::isfinite(loss.at(0, 0)));
}

TEST(GatherScatter, ValuesAndBounds) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const Tensor g = gfgn::gather_rows(a, {2, 0, 2});
  EXPECT_EQ(g.at(0, 0), 5.0);
  EXPECT_EQ(g.at(1, 1), 2.0);
  EXPECT_EQ(g.at(2, 1), 6.0);
  EXPECT_THROW(gfgn::gather_rows(a, {3}), gfgn::DimensionError);

  const Tensor s = gfgn::segment_sum_rows(g, {1, 1, 0}, 2);
  EXPECT_EQ(s.at(1, 0), 6.0);  // rows 0 and 1 of g -> segment 1
  EXPECT_EQ(s.at(0, 1), 6.0);  // row 2 of g -> segment 0
  EXPECT_THROW(gfgn::segment_sum_rows(g, {0, 1}, 2), gfgn::DimensionError);
  EXPECT_THROW(gfgn::segment_sum_rows(g, {0, 1, 2}, 2), gfgn::DimensionError);
}

TEST(ScaleRows, PerRowConstants) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor out = gfgn::scale_rows(a, std::vector<double>{2.0, -1.0});
  EXPECT_EQ(out.at(0, 1), 4.0);
  EXPECT_EQ(out.at(1, 0), -3.0);
  EXPECT_THROW(gfgn::scale_rows(a, std::vector<double>{1.0}), gfgn::DimensionError);
}

// --- gradient checks: analytic tape gradients vs central finite differences ---

constexpr double kGradTol = 1e-4;

TEST(Gradients, MatmulChain) {
  gfgn::Rng rng(101);
  Tensor a = random_tensor(3, 4, rng);
  Tensor b = random_tensor(4, 2, rng);
  const auto loss_fn = [&]() { return gfgn::sum_all(gfgn::sigmoid(gfgn::matmul(a, b))); };
  EXPECT_LT(oracle::max_grad_rel_err({a, b}, loss_fn), kGradTol);
}

TEST(Gradients, ElementwiseFamily) {
  gfgn::Rng rng(102);
  Tensor a = random_tensor(4, 3, rng);
  Tensor b = random_tensor(4, 3, rng);
  const auto loss_fn = [&]() {
    const Tensor t = gfgn::mul(gfgn::add(a, b), gfgn::sub(a, gfgn::scale(b, 0.5)));
    return gfgn::sum_all(gfgn::sigmoid(t));
  };
  EXPECT_LT(oracle::max_grad_rel_err({a, b}, loss_fn), kGradTol);
}

TEST(Gradients, ReluAwayFromKink) {
  gfgn::Rng rng(103);
  Tensor a = random_tensor(4, 4, rng);
  for (double& v : a.value()) v += (v >= 0.0 ? 0.5 : -0.5);  // keep |v| > h
  const auto loss_fn = [&]() { return gfgn::sum_all(gfgn::relu(a)); };
  EXPECT_LT(oracle::max_grad_rel_err({a}, loss_fn), kGradTol);
}

TEST(Gradients, RowBroadcastOperand) {
  gfgn::Rng rng(104);
  Tensor a = random_tensor(5, 3, rng);
  Tensor s = random_tensor(1, 3, rng);
  const auto loss_fn = [&]() { return gfgn::sum_all(gfgn::sigmoid(gfgn::mul(a, s))); };
  EXPECT_LT(oracle::max_grad_rel_err({a, s}, loss_fn), kGradTol);
}

TEST(Gradients, ConcatRowMeanGatherSegment) {
  gfgn::Rng rng(105);
  Tensor a = random_tensor(4, 2, rng);
  Tensor b = random_tensor(4, 3, rng);
  const std::vector<int> idx{3, 1, 1, 0, 2};
  const std::vector<int> seg{0, 2, 2, 1, 0};
  const auto loss_fn = [&]() {
    const Tensor cat = gfgn::concat_cols(a, b);
    const Tensor picked = gfgn::gather_rows(cat, idx);
    const Tensor pooled = gfgn::segment_sum_rows(picked, seg, 3);
    const Tensor scaled = gfgn::scale_rows(pooled, std::vector<double>{0.5, 2.0, -1.0});
    return gfgn::sum_all(gfgn::sigmoid(gfgn::row_mean(scaled)));
  };
  EXPECT_LT(oracle::max_grad_rel_err({a, b}, loss_fn), kGradTol);
}

TEST(Gradients, DropoutWithFixedMask) {
  gfgn::Rng rng(106);
  Tensor a = random_tensor(4, 5, rng);
  // Reseeding per evaluation fixes the mask, making the loss differentiable.
  const auto loss_fn = [&]() {
    gfgn::Rng mask_rng(999);
    return gfgn::sum_all(gfgn::sigmoid(gfgn::dropout(a, 0.4, true, mask_rng)));
  };
  EXPECT_LT(oracle::max_grad_rel_err({a}, loss_fn), kGradTol);
}

TEST(Gradients, SoftmaxCrossEntropy) {
  gfgn::Rng rng(107);
  Tensor logits = random_tensor(5, 3, rng);
  const std::vector<int> labels{2, 0, 1, 1, 0};
  const std::vector<int> mask{0, 1, 3};
  const auto loss_fn = [&]() { return gfgn::softmax_cross_entropy(logits, labels, mask); };
  EXPECT_LT(oracle::max_grad_rel_err({logits}, loss_fn), kGradTol);
}

TEST(Gradients, CorruptedGradientIsDetected) {
  // Negative control: the finite-difference comparator must flag a planted
  // error, otherwise every green gradient check above is meaningless.
  gfgn::Rng rng(108);
  Tensor a = random_tensor(3, 3, rng);
  Tensor b = random_tensor(3, 2, rng);
  const auto loss_fn = [&]() { return gfgn::sum_all(gfgn::sigmoid(gfgn::matmul(a, b))); };

  a.zero_grad();
  b.zero_grad();
  std::vector<double> analytic;
  {
    gfgn::Tape tape;
    gfgn::Tape::Scope scope(tape);
    tape.backward(loss_fn());
    analytic = a.grad();
  }
  analytic[0] *= 1.10;  // plant a 10% error
  double worst = 0.0;
  const double h = 1e-5;
  for (std::size_t e = 0; e < a.size(); ++e) {
    const double x0 = a.value()[e];
    a.value()[e] = x0 + h;
    const double fp = loss_fn().value()[0];
    a.value()[e] = x0 - h;
    const double fm = loss_fn().value()[0];
    a.value()[e] = x0;
    worst = std::max(worst, oracle::rel_err(analytic[e], (fp - fm) / (2.0 * h)));
  }
  EXPECT_GT(worst, kGradTol);
}

// --- tape mechanics ---

TEST(Tape, BackwardRequiresScalarAndActiveTape) {
  Tensor a(2, 2, 1.0, true);
  gfgn::Tape tape;
  gfgn::Tape::Scope scope(tape);
  const Tensor out = gfgn::scale(a, 2.0);
  EXPECT_THROW(tape.backward(out), gfgn::DimensionError);
}

TEST(Tape, NoActiveTapeRecordsNothing) {
  Tensor a(2, 2, 1.0, true);
  const Tensor out = gfgn::scale(a, 2.0);
  EXPECT_EQ(out.at(0, 0), 2.0);
  gfgn::Tape tape;
  {
    gfgn::Tape::Scope scope(tape);
    (void)gfgn::scale(a, 3.0);
  }
  EXPECT_EQ(tape.size(), 1u);
  (void)gfgn::scale(a, 4.0);  // scope ended: nothing recorded
  EXPECT_EQ(tape.size(), 1u);
}

TEST(Tape, RepeatedBackwardAccumulates) {
  Tensor a = Tensor::from_rows({{1, 2}, {3, 4}}, true);
  gfgn::Tape tape;
  gfgn::Tape::Scope scope(tape);
  const Tensor loss = gfgn::sum_all(gfgn::scale(a, 3.0));
  tape.backward(loss);
  EXPECT_EQ(a.grad_at(0, 0), 3.0);
  tape.backward(loss);
  EXPECT_EQ(a.grad_at(0, 0), 6.0);  // += semantics, no implicit reset
}

TEST(Tape, RequiresGradFalseStaysZero) {
  Tensor a = Tensor::from_rows({{1, 2}}, false);
  Tensor b = Tensor::from_rows({{3, 4}}, true);
  gfgn::Tape tape;
  gfgn::Tape::Scope scope(tape);
  const Tensor loss = gfgn::sum_all(gfgn::mul(a, b));
  tape.backward(loss);
  EXPECT_EQ(a.grad_at(0, 0), 0.0);
  EXPECT_EQ(a.grad_at(0, 1), 0.0);
  EXPECT_EQ(b.grad_at(0, 0), 1.0);
  EXPECT_EQ(b.grad_at(0, 1), 2.0);
}

TEST(Tape, BitwiseDeterministicReplay) {
  const auto run = [](std::vector<double>& grads_out) {
    gfgn::Rng rng(555);
    Tensor a = random_tensor(6, 5, rng);
    Tensor b = random_tensor(5, 4, rng);
    gfgn::Tape tape;
    gfgn::Tape::Scope scope(tape);
    gfgn::Rng drop(77);
    const Tensor h = gfgn::dropout(gfgn::sigmoid(gfgn::matmul(a, b)), 0.3, true, drop);
    const Tensor loss = gfgn::sum_all(h);
    tape.backward(loss);
    grads_out = a.grad();
    grads_out.insert(grads_out.end(), b.grad().begin(), b.grad().end());
  };
  std::vector<double> g1, g2;
  run(g1);
  run(g2);
  ASSERT_EQ(g1.size(), g2.size());
  EXPECT_EQ(0, std::memcmp(g1.data(), g2.data(), g1.size() * sizeof(double)));
}

}  // namespace
