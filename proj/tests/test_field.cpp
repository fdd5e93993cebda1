#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "slipconvect/errors.hpp"
#include "slipconvect/field.hpp"

using namespace slipconvect;
using std::numbers::pi;

TEST(Grid, GeometryAndValidation) {
  const Grid g(16, 32, 2.0);
  EXPECT_EQ(g.modes(), 9);
  EXPECT_EQ(g.points(), 33);
  EXPECT_DOUBLE_EQ(g.h1(), 0.125);
  EXPECT_DOUBLE_EQ(g.x2(32), 1.0);
  EXPECT_DOUBLE_EQ(g.wavenumber(3), 3 * pi);
  EXPECT_EQ(g.dealias_cutoff(), 5);
  EXPECT_THROW(Grid(15, 32, 2.0), ValidationError);
  EXPECT_THROW(Grid(16, 4, 2.0), ValidationError);
}

TEST(Transform, RoundTripIsIdentity) {
  const Grid g(16, 8, 2.0, false);
  Transform tr(g);
  const ScalarField f = sample(tr, [](double x, double y) { return std::cos(pi * x) * y + std::sin(3 * pi * x); });
  const ScalarField back = tr.to_spectral(tr.to_physical(f));
  for (std::size_t i = 0; i < f.data().size(); ++i) EXPECT_NEAR(std::abs(back.data()[i] - f.data()[i]), 0.0, 1e-13);
}

TEST(Transform, SampleOfCosineIsHalfAmplitudeMode) {
  const Grid g(16, 8, 2.0, false);
  Transform tr(g);
  const ScalarField f = sample(tr, [](double x, double) { return 4.0 * std::cos(2 * pi * x / 2.0 * 2); });
  EXPECT_NEAR(f(2, 3).real(), 2.0, 1e-13);
  EXPECT_NEAR(std::abs(f(1, 3)), 0.0, 1e-13);
}

TEST(Derivatives, Ddx1IsSpectrallyExact) {
  const Grid g(32, 8, 2.0, false);
  Transform tr(g);
  const ScalarField f = sample(tr, [](double x, double y) { return std::sin(3 * pi * x) * (1 + y); });
  const PhysicalField d = tr.to_physical(ddx1(f));
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.points(); ++j)
      EXPECT_NEAR(d(i, j), 3 * pi * std::cos(3 * pi * g.x1(i)) * (1 + g.x2(j)), 1e-11);
}

// Error of ddx2 / d2x2 on exp(y) at n and 2n must drop by ~4 (walls included).
TEST(Derivatives, X2DifferencesAreSecondOrder) {
  const auto err = [](int n, bool second) {
    const Grid g(8, n, 2.0);
    std::vector<double> p(g.points());
    for (int j = 0; j < g.points(); ++j) p[j] = std::exp(g.x2(j));
    const ScalarField f = from_profile(g, p);
    const ScalarField d = second ? d2x2(f) : ddx2(f);
    double e = 0.0;
    for (int j = 0; j < g.points(); ++j) e = std::max(e, std::abs(d(0, j).real() - std::exp(g.x2(j))));
    return e;
  };
  for (bool second : {false, true}) {
    const double ratio = err(32, second) / err(64, second);
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
  }
}

TEST(Quadrature, IntegralAndInnerMatchHandValues) {
  const Grid g(16, 64, 2.0, false);
  Transform tr(g);
  // (1/gamma) int int (1 + cos(pi x)) y = 1/2 exactly under the trapezoid.
  const ScalarField f = sample(tr, [](double x, double y) { return (1 + std::cos(pi * x)) * y; });
  EXPECT_NEAR(integral(f), 0.5, 1e-14);
  // <cos^2(pi x)> = 1/2; trapezoid in y of a constant is exact.
  const ScalarField c = sample(tr, [](double x, double) { return std::cos(pi * x); });
  EXPECT_NEAR(inner(c, c), 0.5, 1e-14);
  EXPECT_NEAR(l2_norm_sq(c), 0.5, 1e-14);
  EXPECT_NEAR(l2_norm_sq(tr, c), 0.5, 1e-14);
  // L4 norm of cos: (3/8)^{1/4}.
  EXPECT_NEAR(lp_norm(tr, c, 4.0), std::pow(3.0 / 8.0, 0.25), 1e-12);
  EXPECT_THROW(lp_norm(tr, c, 0.5), std::invalid_argument);
}

TEST(Quadrature, RowInnerAndTraces) {
  const Grid g(16, 8, 2.0, false);
  Transform tr(g);
  const ScalarField a = sample(tr, [](double x, double y) { return std::sin(pi * x) * (1 + y); });
  const ScalarField b = sample(tr, [](double x, double) { return 2 * std::sin(pi * x); });
  EXPECT_NEAR(row_inner(a, b, 8), 2.0, 1e-13);  // (1+1) * 2 * 1/2
  const auto prof = inner_profile(a, b);
  EXPECT_NEAR(prof[0], 1.0, 1e-13);
  EXPECT_NEAR(trace_inner(wall_trace(a, Wall::top), wall_trace(b, Wall::top)), 2.0, 1e-13);
}

TEST(Dealias, ZeroesModesAboveTwoThirds) {
  const Grid g(24, 8, 2.0, true);
  Transform tr(g);
  ScalarField f = sample(tr, [](double x, double) { return std::cos(pi * 8 * x) + std::cos(pi * 9 * x); });
  f = dealias(f);
  EXPECT_GT(std::abs(f(8, 0)), 0.4);
  EXPECT_EQ(std::abs(f(9, 0)), 0.0);
}

TEST(Snapshot, EncodeDecodeIsBitExact) {
  const Grid g(8, 8, 2.0);
  Transform tr(g);
  Snapshot s;
  s.n1 = 8;
  s.n2 = 8;
  s.gamma = 2.0;
  s.time = 0.125;
  s.add_field("omega", sample(tr, [](double x, double y) { return std::sin(pi * x) * y * y; }));
  s.add_values("meta", {Complex(1.0, 2.0), Complex(1.0 / 3.0, 0.0)});
  const Snapshot back = decode_snapshot(encode_snapshot(s));
  EXPECT_EQ(back.time, 0.125);
  ASSERT_NE(back.find("meta"), nullptr);
  EXPECT_EQ(back.find("meta")->values[1], Complex(1.0 / 3.0, 0.0));
  const ScalarField w = back.field("omega", g);
  EXPECT_EQ(w.data(), s.field("omega", g).data());
  EXPECT_THROW(back.field("omega", Grid(16, 8, 2.0)), ParseError);
}

TEST(Snapshot, RejectsCorruptBytes) {
  Snapshot s;
  s.n1 = 8;
  s.n2 = 8;
  s.gamma = 1.0;
  auto bytes = encode_snapshot(s);
  bytes[0] = 'X';
  EXPECT_THROW(decode_snapshot(bytes), ParseError);
  auto short_bytes = encode_snapshot(s);
  short_bytes.resize(6);
  EXPECT_THROW(decode_snapshot(short_bytes), ParseError);
}
