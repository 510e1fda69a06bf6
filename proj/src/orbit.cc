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

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace satkey {
namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("orbit." + what);
}

// Great-circle angle between station and sub-satellite point at which the
// satellite sits at the minimum elevation.
double EdgeCentralAngle(const OrbitConfig& cfg) {
  const double theta = cfg.min_elevation_deg * kDegToRad;
  return std::acos(cfg.earth_radius_km * std::cos(theta) /
                   cfg.orbit_radius_km()) -
         theta;
}

}  // namespace

void OrbitConfig::Validate() const {
  Require(std::isfinite(altitude_km) && altitude_km > 0,
          "altitude_km: must be > 0");
  Require(std::isfinite(earth_radius_km) && earth_radius_km > 0,
          "earth_radius_km: must be > 0");
  Require(std::isfinite(gm_km3_s2) && gm_km3_s2 > 0,
          "gm_km3_s2: must be > 0");
  Require(min_elevation_deg >= 0 && min_elevation_deg < 90,
          "min_elevation_deg: must lie in [0, 90)");
  Require(std::isfinite(time_step_s) && time_step_s > 0,
          "time_step_s: must be > 0");
}

double OverpassGeometry::bin_lower_s(size_t i) const {
  return i == 0 ? -visible_half_width_s : samples[i].t_s - 0.5 * time_step_s;
}

double OverpassGeometry::bin_upper_s(size_t i) const {
  return i + 1 == samples.size() ? visible_half_width_s
                                 : samples[i].t_s + 0.5 * time_step_s;
}

double orbital_period(const OrbitConfig& cfg) {
  const double a = cfg.orbit_radius_km();
  return 2.0 * kPi * std::sqrt(a * a * a / cfg.gm_km3_s2);
}

double range_at_central_angle(const OrbitConfig& cfg,
                              double central_angle_rad) {
  const double re = cfg.earth_radius_km;
  const double rs = cfg.orbit_radius_km();
  const double r2 = re * re + rs * rs - 2.0 * re * rs * std::cos(central_angle_rad);
  return std::sqrt(std::max(r2, 0.0));
}

double elevation_at_central_angle(const OrbitConfig& cfg,
                                  double central_angle_rad) {
  const double range = range_at_central_angle(cfg, central_angle_rad);
  const double s =
      (cfg.orbit_radius_km() * std::cos(central_angle_rad) -
       cfg.earth_radius_km) /
      range;
  return std::asin(std::clamp(s, -1.0, 1.0)) * kRadToDeg;
}

double range_at_elevation(const OrbitConfig& cfg, double elevation_deg) {
  const double re = cfg.earth_radius_km;
  const double rs = cfg.orbit_radius_km();
  const double th = elevation_deg * kDegToRad;
  const double c = re * std::cos(th);
  return std::sqrt(rs * rs - c * c) - re * std::sin(th);
}

double theta_max_from_dmin(const OrbitConfig& cfg, double d_min_km) {
  if (!(d_min_km >= 0)) throw std::invalid_argument("d_min_km: must be >= 0");
  return elevation_at_central_angle(cfg, d_min_km / cfg.earth_radius_km);
}

double dmin_from_theta_max(const OrbitConfig& cfg, double theta_max_deg) {
  if (!(theta_max_deg > 0 && theta_max_deg <= 90)) {
    throw std::invalid_argument("theta_max_deg: must lie in (0, 90]");
  }
  const double th = theta_max_deg * kDegToRad;
  const double gamma =
      std::acos(cfg.earth_radius_km * std::cos(th) / cfg.orbit_radius_km()) -
      th;
  return std::max(gamma, 0.0) * cfg.earth_radius_km;
}

double max_visible_dmin(const OrbitConfig& cfg) {
  return EdgeCentralAngle(cfg) * cfg.earth_radius_km;
}

double visibility_half_width_s(const OrbitConfig& cfg, double d_min_km) {
  const double c_track = std::cos(d_min_km / cfg.earth_radius_km);
  const double c_edge = std::cos(EdgeCentralAngle(cfg));
  const double ratio = c_edge / c_track;
  if (ratio > 1.0) return 0.0;
  const double omega = 2.0 * kPi / orbital_period(cfg);
  return std::acos(ratio) / omega;
}

OverpassGeometry pass_geometry(const OrbitConfig& cfg, double d_min_km) {
  cfg.Validate();
  if (!(d_min_km >= 0)) throw std::invalid_argument("d_min_km: must be >= 0");

  OverpassGeometry geom;
  geom.d_min_km = d_min_km;
  geom.theta_max_deg = theta_max_from_dmin(cfg, d_min_km);
  geom.time_step_s = cfg.time_step_s;
  if (geom.theta_max_deg < cfg.min_elevation_deg) return geom;

  const double omega = 2.0 * kPi / orbital_period(cfg);
  const double c_track = std::cos(d_min_km / cfg.earth_radius_km);
  const double dt = cfg.time_step_s;

  auto sample_at = [&](long i) {
    const double t = static_cast<double>(i) * dt;
    const double gamma =
        std::acos(std::clamp(c_track * std::cos(omega * t), -1.0, 1.0));
    return PassSample{t, elevation_at_central_angle(cfg, gamma),
                      range_at_central_angle(cfg, gamma)};
  };

  geom.visible_half_width_s = visibility_half_width_s(cfg, d_min_km);
  long k = static_cast<long>(
      std::floor(geom.visible_half_width_s / dt + 1e-9));
  while (k > 0 && sample_at(k).elevation_deg < cfg.min_elevation_deg) --k;

  geom.samples.reserve(static_cast<size_t>(2 * k + 1));
  for (long i = -k; i <= k; ++i) {
    PassSample s = sample_at(i < 0 ? -i : i);
    s.t_s = static_cast<double>(i) * dt;
    geom.samples.push_back(s);
  }
  // Culmination is exact by construction.
  geom.samples[static_cast<size_t>(k)].elevation_deg = geom.theta_max_deg;
  return geom;
}

void write_geometry_csv(std::ostream& os, const OverpassGeometry& geom) {
  os << "t_s,elevation_deg,range_km\n";
  os.precision(17);
  for (const PassSample& s : geom.samples) {
    os << s.t_s << ',' << s.elevation_deg << ',' << s.range_km << '\n';
  }
}

}  // namespace satkey
