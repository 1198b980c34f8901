#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "mmwave/radio.hpp"

using namespace mmwave;

namespace {

// Reference values computed outside the library from the closed forms
// SNR(d0) = P lambda^2 / (16 pi^2 N0 W) and R = W log2(1 + SNR).
constexpr double kSnrAtD0 = 331.38972189541516;
constexpr double kRadius10dB = 5.756645914900578;
constexpr double kRateAtD0 = 10052078354.130447;
constexpr double kRateAt2m = 7667633601.111062;

}  // namespace

TEST(Radio, DefaultNoiseDensity) {
  EXPECT_NEAR(RadioParams::table_one().noise_w_per_hz, 3.9810717055349696e-23, 1e-36);
}

TEST(Radio, SnrAtReferenceDistance) {
  const auto p = RadioParams::table_one();
  EXPECT_NEAR(snr(p, 1.0), kSnrAtD0, 1e-9 * kSnrAtD0);
  EXPECT_NEAR(to_db(snr(p, 1.0)), 25.2034, 1e-4);
}

TEST(Radio, SnrClampsBelowReferenceDistance) {
  const auto p = RadioParams::table_one();
  EXPECT_DOUBLE_EQ(snr(p, 0.25), snr(p, 1.0));
  EXPECT_DOUBLE_EQ(rate(p, 0.5), rate(p, 1.0));
}

TEST(Radio, RateMatchesClosedForm) {
  const auto p = RadioParams::table_one();
  EXPECT_NEAR(rate(p, 1.0), kRateAtD0, 1e-6 * 1e3);
  EXPECT_NEAR(rate(p, 2.0), kRateAt2m, 1e-6 * 1e3);
}

TEST(Radio, RateDecreasesWithDistance) {
  const auto p = RadioParams::table_one();
  double previous = rate(p, 1.0);
  for (double d = 1.5; d < 50.0; d += 0.5) {
    const double r = rate(p, d);
    EXPECT_LT(r, previous);
    previous = r;
  }
}

TEST(Radio, InterferenceLowersRateButNotSnr) {
  auto p = RadioParams::table_one();
  const double clean_rate = rate(p, 3.0);
  const double clean_snr = snr(p, 3.0);
  p.interference_w_per_hz = p.noise_w_per_hz;
  EXPECT_LT(rate(p, 3.0), clean_rate);
  EXPECT_DOUBLE_EQ(snr(p, 3.0), clean_snr);
}

TEST(Radio, NonPositiveDistanceIsRejected) {
  const auto p = RadioParams::table_one();
  EXPECT_THROW(rate(p, 0.0), DomainError);
  EXPECT_THROW(rate(p, -1.0), DomainError);
  EXPECT_THROW(snr(p, std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(Radio, ParameterValidation) {
  auto p = RadioParams::table_one();
  p.pathloss_exponent = 1.5;
  EXPECT_THROW(p.validate(), DomainError);
  p.pathloss_exponent = 6.5;
  EXPECT_THROW(p.validate(), DomainError);
  p = RadioParams::table_one();
  p.noise_w_per_hz = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
  EXPECT_THROW(rate(p, 2.0), DomainError);
}

TEST(Radio, CellRadiusForTenDb) {
  const auto p = RadioParams::table_one();
  const double r = cell_radius(p, 10.0);
  EXPECT_NEAR(r, kRadius10dB, 1e-9);
  EXPECT_NEAR(to_db(snr(p, r)), 10.0, 1e-9);
  EXPECT_NEAR(rate(p, r), 1.2e9 * std::log2(11.0), 1e-3);
}

TEST(Radio, CellRadiusTracksPathLossExponent) {
  auto p = RadioParams::table_one();
  p.pathloss_exponent = 3.0;
  EXPECT_NEAR(cell_radius(p, 10.0), std::cbrt(kSnrAtD0 / 10.0), 1e-9);
}

TEST(Radio, UnreachableSnrTarget) {
  EXPECT_THROW(cell_radius(RadioParams::table_one(), 30.0), SpecError);
}

TEST(Radio, IntegerScaling) {
  EXPECT_DOUBLE_EQ(scale_to_integer(7.66763, 2), 767.0);
  EXPECT_DOUBLE_EQ(scale_to_integer(4.151317942, 0), 4.0);
  EXPECT_DOUBLE_EQ(scale_to_integer(0.125, 3), 125.0);
}
