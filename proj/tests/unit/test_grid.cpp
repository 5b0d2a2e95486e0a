#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tracelab/grid.hpp"

using namespace tracelab;
using namespace tracelab::grid;

TEST(Grid1D, MidpointNodes) {
  const auto g = Grid1D::half_line(0.1, 10);
  EXPECT_DOUBLE_EQ(g.node(0), 0.05);
  EXPECT_DOUBLE_EQ(g.node(9), 0.95);
  EXPECT_DOUBLE_EQ(g.end(), 1.0);
  EXPECT_TRUE(g.is_half_line());
  const auto t = g.nodes();
  for (std::size_t n = 1; n < t.size(); ++n) EXPECT_LT(t[n - 1], t[n]);
}

TEST(Grid1D, SymmetricGridAvoidsZero) {
  const auto g = Grid1D::symmetric(0.25, 4);
  EXPECT_FALSE(g.is_half_line());
  EXPECT_EQ(g.count(), 8U);
  EXPECT_DOUBLE_EQ(g.node(3), -0.125);
  EXPECT_DOUBLE_EQ(g.node(4), 0.125);
}

TEST(Grid1D, RejectsBadConstruction) {
  EXPECT_THROW(Grid1D(0.0, 0.0, 10), PreconditionError);
  EXPECT_THROW(Grid1D(0.0, 0.1, 1), PreconditionError);
  // origin -0.15, step 0.1: node 1 sits at 0.
  EXPECT_THROW(Grid1D(-0.15, 0.1, 4), PreconditionError);
}

TEST(Grid1D, NearestNode) {
  const auto g = Grid1D::half_line(0.5, 4);
  EXPECT_EQ(g.nearest(0.1), 0);
  EXPECT_EQ(g.nearest(0.74), 1);
  EXPECT_EQ(g.nearest(1.99), 3);
  EXPECT_EQ(g.nearest(2.0), -1);
  EXPECT_EQ(g.nearest(-0.01), -1);
}

TEST(PowerWeight, MuckenhouptFlag) {
  EXPECT_TRUE(PowerWeight(0.5).in_ap(2.0));
  EXPECT_FALSE(PowerWeight(1.0).in_ap(2.0));
  EXPECT_THROW(PowerWeight(1.5).require_ap(2.0), HypothesisError);
  EXPECT_THROW(PowerWeight(-1.0), PreconditionError);
  EXPECT_DOUBLE_EQ(PowerWeight(2.0)(-3.0), 9.0);
}

TEST(DyadicLevels, ScalesAndCovering) {
  const DyadicLevels lv(-2, 3, 1.0);
  EXPECT_EQ(lv.size(), 6U);
  EXPECT_DOUBLE_EQ(lv.scale(-2), 4.0);
  EXPECT_DOUBLE_EQ(lv.scale(3), 0.125);
  EXPECT_NEAR(DyadicLevels::log_weight(), std::log(2.0), 1e-16);
  const auto c = DyadicLevels::covering(0.01, 10.0);
  EXPECT_LE(c.scale(c.j_max()), 0.01);
  EXPECT_GE(c.scale(c.j_min()), 10.0);
  EXPECT_THROW(DyadicLevels(3, 2), PreconditionError);
}

TEST(WeightedLp, ZeroFunction) {
  const auto f = ScalarFunction::sample(Grid1D::half_line(0.01, 100), [](double) { return 0.0; });
  EXPECT_EQ(weighted_lp_norm(f, 2.0, PowerWeight(0.5)), 0.0);
}

TEST(WeightedLp, ConstantWithLinearWeight) {
  // int_0^1 t dt = 1/2, and the midpoint rule is exact on linear integrands.
  const auto f = ScalarFunction::sample(Grid1D::half_line(1e-3, 1000), [](double) { return 1.0; });
  EXPECT_NEAR(weighted_lp_norm(f, 2.0, PowerWeight(1.0)), std::sqrt(0.5), 1e-12);
}

TEST(WeightedLp, LinearFunctionL1) {
  const auto f = ScalarFunction::sample(Grid1D::half_line(1e-3, 1000), [](double t) { return t; });
  EXPECT_NEAR(weighted_lp_norm(f, 1.0, PowerWeight()), 0.5, 1e-12);
}

TEST(WeightedLp, SupNorm) {
  const auto f =
      ScalarFunction::sample(Grid1D::half_line(0.1, 10), [](double t) { return -3.0 * t; });
  EXPECT_DOUBLE_EQ(weighted_lp_norm(f, kInf, PowerWeight()), 3.0 * 0.95);
}

TEST(WeightedLp, SecondOrderConvergenceWithWeight) {
  // Successive differences of a smooth weighted integral shrink by 4.
  const auto value = [](std::size_t n) {
    const auto f = ScalarFunction::sample(Grid1D::half_line(1.0 / n, n),
                                          [](double t) { return std::cos(t) + t * t; });
    return std::pow(weighted_lp_norm(f, 2.0, PowerWeight(2.0)), 2.0);
  };
  const double v1 = value(40);
  const double v2 = value(80);
  const double v3 = value(160);
  const double v4 = value(320);
  const double o1 = std::log2(std::abs(v1 - v2) / std::abs(v2 - v3));
  const double o2 = std::log2(std::abs(v2 - v3) / std::abs(v3 - v4));
  EXPECT_GE(o1, 1.9);
  EXPECT_GE(o2, 1.9);
}

TEST(WeightedLp, ConvergenceAgainstClosedForm) {
  // int_0^1 sin(t)^2 dt = 1/2 - sin(2)/4.
  const double exact = 0.5 - std::sin(2.0) / 4.0;
  std::vector<double> err;
  for (std::size_t n : {25U, 50U, 100U, 200U}) {
    const auto f =
        ScalarFunction::sample(Grid1D::half_line(1.0 / n, n), [](double t) { return std::sin(t); });
    err.push_back(std::abs(std::pow(weighted_lp_norm(f, 2.0, PowerWeight()), 2.0) - exact));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_GE(std::log2(err[i - 1] / err[i]), 1.9);
}

TEST(WeightedLp, HomogeneityAndSubadditivity) {
  const auto g = Grid1D::half_line(0.01, 300);
  const auto f = ScalarFunction::sample(g, [](double t) { return std::sin(3.0 * t) + 0.2; });
  const auto h = ScalarFunction::sample(g, [](double t) { return std::exp(-t) - 0.5; });
  const PowerWeight w(0.3);
  for (double p : {1.5, 2.0, 4.0}) {
    auto cf = f;
    for (auto& v : cf.values()) v *= -2.5;
    EXPECT_NEAR(weighted_lp_norm(cf, p, w), 2.5 * weighted_lp_norm(f, p, w),
                1e-14 * weighted_lp_norm(cf, p, w));
    auto sum = f;
    for (std::size_t n = 0; n < g.count(); ++n) sum[n] += h[n];
    EXPECT_LE(weighted_lp_norm(sum, p, w), weighted_lp_norm(f, p, w) + weighted_lp_norm(h, p, w));
  }
}

TEST(WeightedLp, Errors) {
  EXPECT_THROW(ScalarFunction(Grid1D::half_line(0.1, 4), {1.0, 2.0}), PreconditionError);
  const auto f = ScalarFunction(Grid1D::half_line(0.1, 2), {1.0, std::nan("")});
  EXPECT_THROW(weighted_lp_norm(f, 2.0, PowerWeight()), PreconditionError);
}

TEST(WeightedLp, VectorValuedWithSequenceNorm) {
  const auto g = Grid1D::half_line(0.5, 2);
  VectorFunction f(g, {{3.0, 4.0}, {0.0, 0.0}});
  const WeightedSeqNorm norm{{1.0, 1.0}, 2.0};
  // ||f(t_0)|| = 5 on a cell of width 1/2.
  EXPECT_NEAR(weighted_lp_norm(f, 2.0, PowerWeight(), norm), std::sqrt(12.5), 1e-14);
}

TEST(CbmuNorm, CancelsPowerSingularity) {
  const auto f = ScalarFunction::sample(Grid1D::half_line(0.01, 100),
                                        [](double t) { return std::pow(t, -0.7); });
  EXPECT_NEAR(cbmu_norm(f, 0.7), 1.0, 1e-14);
}

TEST(CbmuNorm, PlainSupForZeroExponent) {
  const auto f =
      ScalarFunction::sample(Grid1D::half_line(0.01, 100), [](double t) { return std::exp(-t); });
  EXPECT_DOUBLE_EQ(cbmu_norm(f, 0.0), weighted_lp_norm(f, kInf, PowerWeight()));
}

TEST(CbmuNorm, ExponentialMaximum) {
  const auto f =
      ScalarFunction::sample(Grid1D::half_line(1e-3, 10000), [](double t) { return std::exp(-t); });
  EXPECT_NEAR(cbmu_norm(f, 0.5), std::exp(-0.5) / std::sqrt(2.0), 1e-6);
}

TEST(CbmuNorm, RequiresHalfLine) {
  const auto f = ScalarFunction::sample(Grid1D::symmetric(0.1, 5), [](double) { return 1.0; });
  EXPECT_THROW(cbmu_norm(f, 0.5), PreconditionError);
}
