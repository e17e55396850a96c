#include "bwsel/asymptotics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bwsel;
using namespace bwsel::asymptotics;

namespace {

const Kernel kEpa = Kernel::epanechnikov();

// 4 int L(u - v) [L(v) + v L'(v)] dv - 4 [L(u) + u L'(u)], by the oracle rule
double
icv_rhs_oracle(const Kernel& l, double u)
{
  const auto sup = l.support();
  const double conv = oracle::simpson(
    [&](double v) { return l(u - v) * (l(v) + v * l.derivative(v)); }, sup.lo, sup.hi, 4000);
  return 4.0 * conv - 4.0 * (l(u) + u * l.derivative(u));
}

std::vector<double>
probes()
{
  std::vector<double> out;
  for (int i = 0; i < 20; ++i)
    out.push_back(-2.3 + 0.237 * i);
  return out;
}

} // namespace

TEST(HFunction, VanishesOutsideConvolutionSupport)
{
  EXPECT_EQ(h_function(kEpa, 3.0), 0.0);
  EXPECT_EQ(h_function(kEpa, -2.5), 0.0);
  EXPECT_NE(h_function(kEpa, 1.5), 0.0);
}

TEST(HFunction, EvenForSymmetricKernels)
{
  for (const auto& k : { kEpa, Kernel::quartic(), Kernel::gaussian() })
    for (double u : probes())
      EXPECT_NEAR(h_function(k, u), h_function(k, -u), 1e-10) << k.name() << " " << u;
}

TEST(HFunction, ValueAtOrigin)
{
  // H(0) = 4R(K) + 4 int v K K' = 4R(K) - 2R(K)
  for (const auto& k : { kEpa, Kernel::quartic(), Kernel::gaussian() })
    EXPECT_NEAR(h_function(k, 0.0), 2.0 * k.functionals().R, 1e-9) << k.name();
}

TEST(HFunction, FubiniMoments)
{
  // int H = 4 * 1 * int (K + vK') = 0 and int u^2 H = 4 int (mu2 + v^2)(K + vK') = -8 mu2
  for (const auto& k : { kEpa, Kernel::polynomial(3) }) {
    const auto h = [&](double u) { return h_function(k, u); };
    const double m0 = oracle::simpson(h, -2, 0, 2000) + oracle::simpson(h, 0, 2, 2000);
    const double m2 = oracle::simpson([&](double u) { return u * u * h(u); }, -2, 0, 2000) +
                      oracle::simpson([&](double u) { return u * u * h(u); }, 0, 2, 2000);
    EXPECT_NEAR(m0, 0.0, 1e-6) << k.name();
    EXPECT_NEAR(m2, -8.0 * k.functionals().mu2, 1e-6) << k.name();
  }
}

TEST(HIcv, ArgumentRescalingUnwinds)
{
  for (const auto& l : { Kernel::quartic(), Kernel::polynomial(8) }) {
    const double d = d_factor(kEpa, l);
    EXPECT_GT(d, 0.0);
    for (double u : { -1.7, -0.9, -0.2, 0.0, 0.35, 1.1, 1.9 })
      EXPECT_NEAR(h_icv_function(kEpa, l, d * u), icv_rhs_oracle(l, u), 1e-8) << l.name() << " " << u;
  }
}

TEST(HIcv, TargetKernelHasUnitScale)
{
  EXPECT_NEAR(d_factor(kEpa, kEpa), 1.0, 1e-15);
  for (double u : probes())
    EXPECT_NEAR(h_icv_function(kEpa, kEpa, u), icv_rhs_oracle(kEpa, u), 1e-8);
}

TEST(HIcv, VanishesFarOutside)
{
  const double d = d_factor(kEpa, Kernel::quartic());
  EXPECT_EQ(h_icv_function(kEpa, Kernel::quartic(), 2.5 * d), 0.0);
}

TEST(HOneSided, OriginHandReduction)
{
  // two coinciding convolution pairs: 4R(K_L) + 4 int v K_L K_L' - 2[2 K_L(0)]
  // with K_L(0) = 0 and 4 int v K_L K_L' = -2R(K_L)
  for (const auto& base : { kEpa, Kernel::quartic(), Kernel::gaussian() }) {
    const auto kl = onesided_equivalent(base, Side::left);
    const double r = kl.functionals().R;
    EXPECT_NEAR(h_onesided_rhs(kl, 0.0), 2.0 * r, 1e-8 * r) << base.name();
    const double cross = oracle::simpson(
      [&](double v) { return v * kl(v) * kl.derivative(v); }, kl.support().lo, -1e-15, 20000);
    EXPECT_NEAR(h_onesided_rhs(kl, 0.0), 4.0 * r + 4.0 * cross, 1e-6 * r) << base.name();
  }
}

TEST(HOneSided, IdoOrderOneIsDo)
{
  for (double w : probes())
    EXPECT_NEAR(h_ido_function(kEpa, kEpa, w), h_do_function(kEpa, w), 1e-9) << w;
}

TEST(HOneSided, EvenAndCompact)
{
  const auto kl = onesided_equivalent(kEpa, Side::left);
  for (double u : probes())
    EXPECT_NEAR(h_onesided_rhs(kl, u), h_onesided_rhs(kl, -u), 1e-9);
  const double d = d_factor(kEpa, kl);
  EXPECT_EQ(h_do_function(kEpa, 2.01 * d), 0.0);
  EXPECT_EQ(h_do_function(kEpa, -2.5 * d), 0.0);
}

TEST(Tabulate, TablesVanishOutsideSupport)
{
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i)
    grid.push_back(-6.0 + 0.06 * i);
  for (auto [kind, kernel] : { std::pair{ HKind::h, kEpa },
                               std::pair{ HKind::icv, Kernel::quartic() },
                               std::pair{ HKind::do_star, kEpa },
                               std::pair{ HKind::ido, Kernel::polynomial(4) } }) {
    const auto t = tabulate(kind, kEpa, kernel, grid);
    ASSERT_EQ(t.values.size(), grid.size());
    EXPECT_GT(t.d_factor, 0.0);
    // every H above is supported in [-2 d, 2 d] for the argument scale d
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (std::abs(grid[i]) > 2.0 * t.d_factor + 1e-9)
        EXPECT_LT(std::abs(t.values[i]), 1e-8) << static_cast<int>(kind) << " " << grid[i];
  }
}

TEST(Constants, ClassicalCvClosedForm)
{
  // H - H_CV = 4[K + uK'] for L = K, so I = 16 int (K + uK')^2 = 14.4
  const auto c = variance_constant(Family::cv, kEpa);
  EXPECT_NEAR(c.integral, 14.4, 1e-8);
  EXPECT_NEAR(c.value, 7.2, 1e-8);
  const auto anchored = variance_constant(Family::cv, kEpa, std::nullopt, Normalization::cv_anchor);
  EXPECT_NEAR(anchored.value, kCvAnchor, 1e-12);
}

TEST(Constants, IcvWithTargetIsCv)
{
  EXPECT_NEAR(variance_integral(Family::icv, kEpa, kEpa), variance_integral(Family::cv, kEpa), 1e-9);
  EXPECT_NEAR(variance_integral(Family::ido, kEpa, kEpa),
              variance_integral(Family::do_validation, kEpa),
              1e-9);
}

TEST(Constants, PluginIsSquaredH)
{
  const double direct = oracle::simpson([](double u) { return std::pow(h_function(kEpa, u), 2); }, -2, 0, 2000) +
                        oracle::simpson([](double u) { return std::pow(h_function(kEpa, u), 2); }, 0, 2, 2000);
  EXPECT_NEAR(variance_integral(Family::plugin, kEpa), direct, 1e-7);
}

TEST(Constants, MonotoneInOrderAboveGaussianLimit)
{
  for (Family f : { Family::icv, Family::ido }) {
    const double limit = variance_integral(f, kEpa, Kernel::gaussian());
    double previous = INFINITY;
    for (int r = 1; r <= 20; ++r) {
      const double v = variance_integral(f, kEpa, Kernel::polynomial(r));
      EXPECT_LT(v, previous) << to_string(f) << " r=" << r;
      EXPECT_GT(v, limit) << to_string(f) << " r=" << r;
      previous = v;
    }
  }
}

TEST(Constants, TableLayout)
{
  const auto rows = constant_table(kEpa, 8);
  ASSERT_EQ(rows.size(), 19u);
  EXPECT_EQ(rows.front().family, Family::cv);
  EXPECT_EQ(rows[1].indirect_label(), "2");
  EXPECT_EQ(rows[8].indirect_label(), "G");
  EXPECT_EQ(rows.back().family, Family::plugin);
  for (const auto& r : rows) {
    EXPECT_GT(r.value, 0.0);
    EXPECT_NEAR(r.value, r.normalization * r.integral, 1e-12 * r.value);
  }
}
