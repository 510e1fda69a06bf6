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

#ifndef SATKEY_ORBIT_H_
#define SATKEY_ORBIT_H_

#include <iosfwd>
#include <vector>

namespace satkey {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;
// Julian year.
inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

// Circular orbit and ground-station visibility settings.
struct OrbitConfig {
  double altitude_km = 500.0;
  double earth_radius_km = 6371.0;
  double gm_km3_s2 = 398600.4418;
  double min_elevation_deg = 10.0;
  double time_step_s = 0.1;

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;

  double orbit_radius_km() const { return earth_radius_km + altitude_km; }
};

struct PassSample {
  double t_s;            // relative to culmination
  double elevation_deg;
  double range_km;
};

// Elevation/range time series of one pass. Samples lie on the grid
// t = i * time_step_s, are symmetric about t = 0 and only cover the part of
// the pass above the minimum elevation.
//
// Sample i stands for the time bin [t_i - dt/2, t_i + dt/2]; the two outermost
// bins are stretched or cut so that the bins tile exactly
// [-visible_half_width_s, +visible_half_width_s].
struct OverpassGeometry {
  double d_min_km = 0.0;
  double theta_max_deg = 90.0;
  double time_step_s = 0.1;
  double visible_half_width_s = 0.0;
  std::vector<PassSample> samples;

  bool empty() const { return samples.empty(); }
  // Largest useful transmission half window; 0 for an empty pass.
  double max_half_window_s() const { return visible_half_width_s; }
  // Time interval covered by sample i.
  double bin_lower_s(size_t i) const;
  double bin_upper_s(size_t i) const;
};

// Kepler period of the circular orbit.
double orbital_period(const OrbitConfig& cfg);

// Elevation (deg) and slant range (km) seen from the ground station when the
// great-circle angle to the sub-satellite point is `central_angle_rad`.
double elevation_at_central_angle(const OrbitConfig& cfg,
                                  double central_angle_rad);
double range_at_central_angle(const OrbitConfig& cfg, double central_angle_rad);

// Slant range at a given elevation.
double range_at_elevation(const OrbitConfig& cfg, double elevation_deg);

// Maximum elevation of a pass whose ground track passes `d_min_km` (great
// circle distance) from the station.
double theta_max_from_dmin(const OrbitConfig& cfg, double d_min_km);

// Inverse of theta_max_from_dmin for theta_max in (0, 90].
double dmin_from_theta_max(const OrbitConfig& cfg, double theta_max_deg);

// Largest ground-track offset whose pass still culminates at or above the
// minimum elevation.
double max_visible_dmin(const OrbitConfig& cfg);

// Half-duration of the visibility window above the minimum elevation, from the
// closed form. Returns 0 if the pass never rises above it.
double visibility_half_width_s(const OrbitConfig& cfg, double d_min_km);

// Samples the pass on the time grid. Returns an empty sample list when the
// pass culminates below the minimum elevation. Earth rotation during the pass
// is ignored.
OverpassGeometry pass_geometry(const OrbitConfig& cfg, double d_min_km);

// CSV with header t_s,elevation_deg,range_km.
void write_geometry_csv(std::ostream& os, const OverpassGeometry& geom);

}  // namespace satkey

#endif  // SATKEY_ORBIT_H_
