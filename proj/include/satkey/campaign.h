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

#ifndef SATKEY_CAMPAIGN_H_
#define SATKEY_CAMPAIGN_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "satkey/counts.h"
#include "satkey/finite_key.h"
#include "satkey/link.h"
#include "satkey/optimizer.h"
#include "satkey/orbit.h"

namespace satkey {

// Everything needed to optimize the key of one pass.
struct SystemConfig {
  OrbitConfig orbit;
  LinkModel link;
  ErrorModel error;
  SecurityParams security;
  OptSpace space;

  void Validate() const;
};

struct FootprintSample {
  double d_min_km = 0;
  double theta_max_deg = 0;
  double ell = 0;
  double half_window_s = 0;
  ProtocolParams params;
};

struct FootprintCurve {
  // Ascending in d_min.
  std::vector<FootprintSample> samples;
  // Largest offset with positive key (bisection estimate), and the maximum
  // elevation of that pass. Both are 0 / 90 when no pass gives key.
  double d_min_plus_km = 0;
  double theta_max_minus_deg = 90;
};

struct FootprintOptions {
  double step_km = 50.0;
  // Bisection stops when the bracket on d_min_plus is narrower than this.
  double edge_tolerance_km = 1.0;
};

// Default offsets 0, step, 2 step, ... up to the visibility limit, which is
// always included.
std::vector<double> default_dmin_grid(const OrbitConfig& orbit, double step_km);

FootprintCurve footprint_sweep(const SystemConfig& cfg,
                               const std::vector<double>& d_min_grid_km,
                               std::uint64_t seed,
                               const FootprintOptions& options = {});

struct AnnualEstimate {
  double skl_int_bit_m = 0;
  double n_orbits_year = 0;
  double l_lat_m = 0;
  double skl_year_bits = 0;
};

// SKL_int = 2 * trapezoid integral of SKL over d_min (in metres),
// SKL_year = N_orbits_year * SKL_int / L_lat.
AnnualEstimate annual_volume(const FootprintCurve& curve, double latitude_deg,
                             const OrbitConfig& orbit);

struct SensitivityAxes {
  std::vector<double> eta_sys_db;
  std::vector<double> p_ec;
  std::vector<double> qber_intrinsic;
  std::vector<double> source_rate_hz;
};

struct SensitivityCell {
  double eta_sys_db = 0;
  double p_ec = 0;
  double qber_intrinsic = 0;
  double source_rate_hz = 0;
  OptResult result;
};

// Optimized single-pass key at ground-track offset d_min for every cell of
// the Cartesian product of the axes. Empty axes take the value in `cfg`.
// Cells are ordered with the last axis varying fastest.
std::vector<SensitivityCell> sensitivity_grid(const SensitivityAxes& axes,
                                              const SystemConfig& cfg,
                                              double d_min_km,
                                              std::uint64_t seed);

// Instantaneous asymptotic key integrated over the window: the per-bin
// asymptotic key, clamped at zero, summed over the bins inside the window.
// Reference value only.
double continuous_asymptotic_oracle(const OverpassGeometry& geom,
                                    const LinkModel& link,
                                    const ProtocolParams& params,
                                    const ErrorModel& err,
                                    double half_window_s);

struct MultiPassRow {
  int passes = 1;
  OptResult result;
  // Asymptotic per-pass key at the same parameters and window.
  double asymptotic_per_pass = 0;
};

// Key from M aggregated identical passes, optimized separately for each M.
std::vector<MultiPassRow> multi_pass_table(const SystemConfig& cfg,
                                           double d_min_km,
                                           const std::vector<int>& passes,
                                           std::uint64_t seed);

struct ProtocolComparisonRow {
  double eta_sys_db = 0;
  OptResult efficient;
  OptResult standard;
};

// Optimized single-pass key of both variants across system efficiencies.
std::vector<ProtocolComparisonRow> compare_protocols(
    const SystemConfig& cfg, double d_min_km,
    const std::vector<double>& eta_sys_db, std::uint64_t seed);

// CSV export and import.
void write_footprint_csv(std::ostream& os, const FootprintCurve& curve);
FootprintCurve read_footprint_csv(std::istream& is);
void write_sensitivity_csv(std::ostream& os,
                           const std::vector<SensitivityCell>& cells);
void write_multi_pass_csv(std::ostream& os,
                          const std::vector<MultiPassRow>& rows);
void write_protocol_comparison_csv(
    std::ostream& os, const std::vector<ProtocolComparisonRow>& rows);
void write_trace_csv(std::ostream& os, const std::vector<TraceEntry>& trace);

}  // namespace satkey

#endif  // SATKEY_CAMPAIGN_H_
