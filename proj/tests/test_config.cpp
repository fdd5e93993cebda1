#include <cmath>

#include <gtest/gtest.h>

#include "slipconvect/config.hpp"
#include "slipconvect/errors.hpp"

using namespace slipconvect;

namespace {

const char* minimal = "ra = 5e4\npr = 1\nls = inf\ngamma = 2\n";

}  // namespace

TEST(Config, ParsesMinimalAndDefaults) {
  const RunConfig c = parse_config(minimal);
  EXPECT_EQ(c.physical.ra, 5e4);
  EXPECT_EQ(c.physical.pr.value(), 1.0);
  EXPECT_TRUE(c.physical.ls.is_infinite());
  EXPECT_EQ(c.grid.n1, 64);
  EXPECT_EQ(c.init.mode, InitMode::perturbed);
}

TEST(Config, InfinityIsABranchNotANumber) {
  const ExtendedReal inf = ExtendedReal::infinite();
  EXPECT_EQ(inf.reciprocal(), 0.0);
  EXPECT_TRUE(std::isinf(inf.as_double()));
  EXPECT_THROW(inf.value(), std::logic_error);
  EXPECT_EQ(ExtendedReal::finite(4.0).reciprocal(), 0.25);
}

TEST(Config, RoundTripsThroughText) {
  RunConfig c = parse_config(std::string(minimal) + "n1 = 32\nn2 = 48\nseed = 99\ninit = conduction\n");
  c.time.dt_max = 0.1 + 0.2;  // not exactly representable in short form
  const RunConfig back = parse_config(format_config(c));
  EXPECT_EQ(format_config(back), format_config(c));
  EXPECT_EQ(back.time.dt_max, c.time.dt_max);
  EXPECT_EQ(back.time.seed, 99u);
}

TEST(Config, MalformedTextIsAParseError) {
  EXPECT_THROW(parse_config("ra 5e4\n"), ParseError);
  EXPECT_THROW(parse_config("ra = 5e4\nra = 1\npr = 1\nls = 1\ngamma = 2\n"), ParseError);
  EXPECT_THROW(parse_config("ra = abc\npr = 1\nls = 1\ngamma = 2\n"), ParseError);
  EXPECT_THROW(parse_config("pr = 1\nls = 1\ngamma = 2\n"), ParseError);
  EXPECT_THROW(parse_config(std::string(minimal) + "colour = blue\n"), ParseError);
}

TEST(Config, InvariantsAreValidationErrors) {
  EXPECT_THROW(parse_config("ra = -1\npr = 1\nls = 1\ngamma = 2\n"), ValidationError);
  EXPECT_THROW(parse_config("ra = 1\npr = 0\nls = 1\ngamma = 2\n"), ValidationError);
  EXPECT_THROW(parse_config(std::string(minimal) + "n1 = 33\n"), ValidationError);
  EXPECT_THROW(parse_config(std::string(minimal) + "n2 = 4\n"), ValidationError);
  EXPECT_THROW(parse_config(std::string(minimal) + "t_end = 1\nt_transient = 2\n"), ValidationError);
  EXPECT_THROW(parse_config(std::string(minimal) + "cfl = 1.5\n"), ValidationError);
  EXPECT_THROW(parse_config(std::string(minimal) + "init = snapshot\n"), ValidationError);
}

TEST(Config, FormatRealIsShortestRoundTrip) {
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(format_real(ExtendedReal::infinite()), "inf");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_real(x)), x);
}

// Ls^2 Pr^2 >= Ra^{3/2}, evaluated by hand.
TEST(Config, RegimeCondition) {
  PhysicalParams p;
  p.ra = 1e4;  // Ra^{3/2} = 1e6
  p.pr = ExtendedReal::finite(10.0);
  p.ls = ExtendedReal::finite(100.0);  // 1e4 * 100 = 1e6: boundary case holds
  EXPECT_TRUE(regime_check(p).five_twelfths);
  EXPECT_DOUBLE_EQ(regime_check(p).rhs, 1e6);
  p.ls = ExtendedReal::finite(99.0);
  EXPECT_FALSE(regime_check(p).five_twelfths);
  EXPECT_THROW(require_five_twelfths_regime(p), ValidationError);
  p.ls = ExtendedReal::infinite();
  EXPECT_TRUE(regime_check(p).five_twelfths);
  p.ls = ExtendedReal::finite(1.0);
  p.pr = ExtendedReal::infinite();
  EXPECT_TRUE(regime_check(p).five_twelfths);
  EXPECT_TRUE(regime_check(p).universal_half);
}

TEST(Config, RegimeReportsExponentOfTheSlipScaling) {
  PhysicalParams p;
  p.ra = 1e6;
  p.ls = ExtendedReal::finite(std::pow(1e6, 0.5));  // alpha = 1/2
  const RegimeReport r = regime_check(p);
  EXPECT_NEAR(r.alpha, 0.5, 1e-12);
  ASSERT_TRUE(r.exponent.has_value());
  EXPECT_DOUBLE_EQ(*r.exponent, 5.0 / 12.0);
}
