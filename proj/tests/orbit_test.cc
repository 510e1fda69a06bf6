//
// Copyright 2026 The Satkey Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "satkey/orbit.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

namespace satkey {
namespace {

// Law-of-cosines geometry written out independently of the library.
double OracleRange(double re, double h, double gamma) {
  const double rs = re + h;
  return std::sqrt(re * re + rs * rs - 2 * re * rs * std::cos(gamma));
}

double OracleElevationDeg(double re, double h, double gamma) {
  const double rs = re + h;
  return std::asin((rs * std::cos(gamma) - re) / OracleRange(re, h, gamma)) *
         180.0 / kPi;
}

TEST(OrbitalPeriod, MatchesKepler) {
  OrbitConfig cfg;
  cfg.gm_km3_s2 = 398600.0;
  cfg.altitude_km = 1e-9;
  EXPECT_NEAR(orbital_period(cfg), 5060.0, 2.0);
  cfg.altitude_km = 500.0;
  EXPECT_NEAR(orbital_period(cfg), 5669.0, 1.5);
}

TEST(OrbitalPeriod, OrbitsPerYear) {
  OrbitConfig cfg;
  EXPECT_NEAR(kSecondsPerYear / orbital_period(cfg), 5567.0, 2.0);
}

TEST(PassGeometry, ZenithCulmination) {
  OrbitConfig cfg;
  const OverpassGeometry g = pass_geometry(cfg, 0.0);
  ASSERT_FALSE(g.empty());
  const PassSample& top = g.samples[g.samples.size() / 2];
  EXPECT_EQ(top.t_s, 0.0);
  EXPECT_DOUBLE_EQ(top.elevation_deg, 90.0);
  EXPECT_NEAR(top.range_km, 500.0, 1e-9);
}

TEST(PassGeometry, ZenithVisibilityWindow) {
  OrbitConfig cfg;
  const OverpassGeometry g = pass_geometry(cfg, 0.0);
  EXPECT_NEAR(2 * g.visible_half_width_s, 442.0, 2.0);
  // Sample grid stays inside the window.
  EXPECT_LE(g.samples.back().t_s, g.visible_half_width_s);
  EXPECT_GT(g.samples.back().t_s + cfg.time_step_s, g.visible_half_width_s);
}

TEST(PassGeometry, EdgeRangeMatchesOracle) {
  OrbitConfig cfg;
  const double th = 10.0 * kDegToRad;
  const double gamma = std::acos(6371.0 * std::cos(th) / 6871.0) - th;
  EXPECT_NEAR(OracleElevationDeg(6371, 500, gamma), 10.0, 1e-9);
  EXPECT_NEAR(range_at_elevation(cfg, 10.0), OracleRange(6371, 500, gamma),
              1e-6);
  EXPECT_NEAR(range_at_elevation(cfg, 10.0), 1694.9, 0.5);
}

TEST(PassGeometry, SamplesFollowGroundTrackFormula) {
  OrbitConfig cfg;
  const double d = 420.0;
  const OverpassGeometry g = pass_geometry(cfg, d);
  const double omega = 2 * kPi / orbital_period(cfg);
  for (size_t i = 0; i < g.samples.size(); i += 97) {
    const PassSample& s = g.samples[i];
    const double gamma =
        std::acos(std::cos(d / 6371.0) * std::cos(omega * s.t_s));
    EXPECT_NEAR(s.range_km, OracleRange(6371, 500, gamma), 1e-6);
    if (s.t_s != 0.0) {
      EXPECT_NEAR(s.elevation_deg, OracleElevationDeg(6371, 500, gamma), 1e-9);
    }
  }
}

TEST(PassGeometry, InvariantsHoldAcrossOffsets) {
  OrbitConfig cfg;
  const double r_min_el = range_at_elevation(cfg, cfg.min_elevation_deg);
  for (double d : {0.0, 300.0, 900.0, 1500.0}) {
    const OverpassGeometry g = pass_geometry(cfg, d);
    ASSERT_FALSE(g.empty()) << d;
    const size_t n = g.samples.size();
    ASSERT_EQ(n % 2, 1u);
    const size_t c = n / 2;
    EXPECT_DOUBLE_EQ(g.samples[c].elevation_deg, g.theta_max_deg);
    for (size_t k = 1; k <= c; ++k) {
      const PassSample& a = g.samples[c + k];
      const PassSample& b = g.samples[c - k];
      EXPECT_EQ(a.elevation_deg, b.elevation_deg);
      EXPECT_LE(a.elevation_deg, g.samples[c + k - 1].elevation_deg);
      EXPECT_GE(a.elevation_deg, cfg.min_elevation_deg);
      EXPECT_LE(a.elevation_deg, g.theta_max_deg);
      EXPECT_GE(a.range_km, cfg.altitude_km - 1e-9);
      EXPECT_LE(a.range_km, r_min_el + 1e-6);
    }
  }
}

TEST(PassGeometry, EmptyBelowMinimumElevation) {
  OrbitConfig cfg;
  const double edge = max_visible_dmin(cfg);
  EXPECT_TRUE(pass_geometry(cfg, edge + 10.0).empty());
  EXPECT_FALSE(pass_geometry(cfg, edge - 10.0).empty());
  EXPECT_NEAR(theta_max_from_dmin(cfg, edge), cfg.min_elevation_deg, 1e-9);
}

TEST(PassGeometry, RejectsBadInput) {
  OrbitConfig cfg;
  EXPECT_THROW(pass_geometry(cfg, -1.0), std::invalid_argument);
  cfg.altitude_km = 0.0;
  EXPECT_THROW(pass_geometry(cfg, 0.0), std::invalid_argument);
  cfg = OrbitConfig();
  cfg.min_elevation_deg = 90.0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = OrbitConfig();
  cfg.time_step_s = 0.0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
}

TEST(PassGeometry, BinsTileTheVisibleWindow) {
  OrbitConfig cfg;
  const OverpassGeometry g = pass_geometry(cfg, 250.0);
  double total = 0;
  for (size_t i = 0; i < g.samples.size(); ++i) {
    total += g.bin_upper_s(i) - g.bin_lower_s(i);
    if (i > 0) EXPECT_DOUBLE_EQ(g.bin_lower_s(i), g.bin_upper_s(i - 1));
  }
  EXPECT_NEAR(total, 2 * g.visible_half_width_s, 1e-9);
}

TEST(ThetaMax, ZenithAndMonotone) {
  OrbitConfig cfg;
  EXPECT_DOUBLE_EQ(theta_max_from_dmin(cfg, 0.0), 90.0);
  double prev = 90.0;
  for (double d = 10.0; d < 2500.0; d += 10.0) {
    const double th = theta_max_from_dmin(cfg, d);
    EXPECT_LT(th, prev);
    prev = th;
  }
}

TEST(ThetaMax, SixtyDegreesByBisection) {
  OrbitConfig cfg;
  double lo = 0.0;
  double hi = 2000.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (OracleElevationDeg(6371, 500, mid / 6371.0) > 60.0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(dmin_from_theta_max(cfg, 60.0), lo, 1e-6);
  EXPECT_NEAR(theta_max_from_dmin(cfg, lo), 60.0, 1e-9);
}

TEST(ThetaMax, RoundTrip) {
  OrbitConfig cfg;
  for (double d : {0.0, 123.0, 800.0, 1400.0}) {
    const OverpassGeometry g = pass_geometry(cfg, d);
    EXPECT_NEAR(theta_max_from_dmin(cfg, g.d_min_km), g.theta_max_deg,
                1e-9 * g.theta_max_deg);
    EXPECT_NEAR(dmin_from_theta_max(cfg, g.theta_max_deg), d, 1e-6);
  }
}

TEST(GeometryCsv, HeaderAndRows) {
  OrbitConfig cfg;
  cfg.time_step_s = 10.0;
  const OverpassGeometry g = pass_geometry(cfg, 0.0);
  std::ostringstream os;
  write_geometry_csv(os, g);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t_s,elevation_deg,range_km");
  size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, g.samples.size());
}

}  // namespace
}  // namespace satkey
