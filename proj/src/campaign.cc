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

#include "satkey/campaign.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace satkey {
namespace {

FootprintSample EvaluateOffset(const SystemConfig& cfg, double d_min_km,
                               std::uint64_t seed, int threads) {
  FootprintSample s;
  s.d_min_km = d_min_km;
  s.theta_max_deg = theta_max_from_dmin(cfg.orbit, d_min_km);
  s.params = cfg.space.base;
  const OverpassGeometry geom = pass_geometry(cfg.orbit, d_min_km);
  if (geom.empty()) return s;
  OptSpace space = cfg.space;
  space.threads = threads;
  space.record_trace = false;
  const OptResult r = optimize_single_pass(geom, cfg.link, cfg.error,
                                           cfg.security, space, seed);
  s.ell = r.skl.ell;
  s.half_window_s = r.half_window_s;
  s.params = r.params;
  return s;
}

// Splits the thread budget between an outer map of `count` tasks and the
// optimizer inside each task.
int InnerThreads(int threads, int count) {
  return count >= threads ? 1 : std::max(1, threads / std::max(count, 1));
}

void WriteParams(std::ostream& os, const ProtocolParams& p) {
  os << p.mu[0] << ',' << p.mu[1] << ',' << p.probs[0] << ',' << p.probs[1]
     << ',' << p.probs[2] << ',' << p.p_x;
}

constexpr char kParamColumns[] = "mu1,mu2,p1,p2,p3,p_x";

}  // namespace

void SystemConfig::Validate() const {
  orbit.Validate();
  link.Validate();
  error.Validate();
  security.Validate();
  space.Validate();
}

std::vector<double> default_dmin_grid(const OrbitConfig& orbit,
                                      double step_km) {
  if (!(step_km > 0)) {
    throw std::invalid_argument("campaign.dmin_step_km: must be > 0");
  }
  const double limit = max_visible_dmin(orbit);
  std::vector<double> grid;
  for (int i = 0; i * step_km < limit - 1e-9; ++i) grid.push_back(i * step_km);
  grid.push_back(limit);
  return grid;
}

FootprintCurve footprint_sweep(const SystemConfig& cfg,
                               const std::vector<double>& d_min_grid_km,
                               std::uint64_t seed,
                               const FootprintOptions& options) {
  cfg.Validate();
  if (d_min_grid_km.empty()) {
    throw std::invalid_argument("campaign.dmin_grid: must not be empty");
  }
  for (size_t i = 0; i < d_min_grid_km.size(); ++i) {
    if (!(d_min_grid_km[i] >= 0) ||
        (i > 0 && !(d_min_grid_km[i] > d_min_grid_km[i - 1]))) {
      throw std::invalid_argument(
          "campaign.dmin_grid: must be ascending and start at >= 0");
    }
  }

  const int threads = cfg.space.threads;
  const int count = static_cast<int>(d_min_grid_km.size());
  FootprintCurve curve;
  curve.samples.resize(count);
  const int inner = InnerThreads(threads, count);
  parallel_for(count, threads / inner, [&](int i) {
    curve.samples[i] = EvaluateOffset(cfg, d_min_grid_km[i], seed, inner);
  });

  int last_positive = -1;
  for (int i = 0; i < count; ++i) {
    if (curve.samples[i].ell > 0) last_positive = i;
  }
  if (last_positive < 0) return curve;
  curve.d_min_plus_km = curve.samples[last_positive].d_min_km;
  if (last_positive + 1 < count) {
    // Refine the edge: the first split halves the grid step there, further
    // splits bisect down to the tolerance.
    double lo = curve.samples[last_positive].d_min_km;
    double hi = curve.samples[last_positive + 1].d_min_km;
    while (hi - lo > options.edge_tolerance_km) {
      const double mid = 0.5 * (lo + hi);
      FootprintSample s = EvaluateOffset(cfg, mid, seed, threads);
      (s.ell > 0 ? lo : hi) = mid;
      curve.samples.push_back(std::move(s));
    }
    curve.d_min_plus_km = lo;
    std::sort(curve.samples.begin(), curve.samples.end(),
              [](const FootprintSample& a, const FootprintSample& b) {
                return a.d_min_km < b.d_min_km;
              });
  }
  curve.theta_max_minus_deg = theta_max_from_dmin(cfg.orbit,
                                                  curve.d_min_plus_km);
  return curve;
}

AnnualEstimate annual_volume(const FootprintCurve& curve, double latitude_deg,
                             const OrbitConfig& orbit) {
  orbit.Validate();
  if (!(std::abs(latitude_deg) <= 80.0)) {
    throw std::invalid_argument(
        "campaign.latitude_deg: |latitude| must be <= 80 deg");
  }
  AnnualEstimate a;
  double integral = 0.0;
  for (size_t i = 1; i < curve.samples.size(); ++i) {
    const FootprintSample& p = curve.samples[i - 1];
    const FootprintSample& q = curve.samples[i];
    integral += 0.5 * (p.ell + q.ell) * (q.d_min_km - p.d_min_km) * 1e3;
  }
  a.skl_int_bit_m = 2.0 * integral;
  a.n_orbits_year = kSecondsPerYear / orbital_period(orbit);
  a.l_lat_m =
      2.0 * kPi * orbit.earth_radius_km * 1e3 * std::cos(latitude_deg * kDegToRad);
  a.skl_year_bits = a.n_orbits_year * a.skl_int_bit_m / a.l_lat_m;
  return a;
}

std::vector<SensitivityCell> sensitivity_grid(const SensitivityAxes& axes,
                                              const SystemConfig& cfg,
                                              double d_min_km,
                                              std::uint64_t seed) {
  cfg.Validate();
  auto or_default = [](const std::vector<double>& v, double d) {
    return v.empty() ? std::vector<double>{d} : v;
  };
  const auto etas = or_default(axes.eta_sys_db, cfg.link.eta_link_sys_db());
  const auto p_ecs = or_default(axes.p_ec, cfg.link.p_ec);
  const auto qbers = or_default(axes.qber_intrinsic, cfg.error.qber_intrinsic);
  const auto rates = or_default(axes.source_rate_hz, cfg.space.base.source_rate_hz);

  std::vector<SensitivityCell> cells;
  for (double eta : etas) {
    for (double p_ec : p_ecs) {
      for (double q : qbers) {
        for (double f : rates) {
          SensitivityCell c;
          c.eta_sys_db = eta;
          c.p_ec = p_ec;
          c.qber_intrinsic = q;
          c.source_rate_hz = f;
          cells.push_back(c);
        }
      }
    }
  }

  const OverpassGeometry geom = pass_geometry(cfg.orbit, d_min_km);
  const int count = static_cast<int>(cells.size());
  const int inner = InnerThreads(cfg.space.threads, count);
  parallel_for(count, cfg.space.threads / inner, [&](int i) {
    SensitivityCell& c = cells[i];
    LinkModel link = cfg.link.WithSystemEfficiency(c.eta_sys_db);
    link.p_ec = c.p_ec;
    link.Validate();
    ErrorModel err = cfg.error;
    err.qber_intrinsic = c.qber_intrinsic;
    OptSpace space = cfg.space;
    space.base.source_rate_hz = c.source_rate_hz;
    space.threads = inner;
    c.result =
        optimize_single_pass(geom, link, err, cfg.security, space, seed);
  });
  return cells;
}

double continuous_asymptotic_oracle(const OverpassGeometry& geom,
                                    const LinkModel& link,
                                    const ProtocolParams& params,
                                    const ErrorModel& err,
                                    double half_window_s) {
  params.Validate();
  err.Validate();
  if (!(half_window_s >= 0)) {
    throw std::invalid_argument("half_window_s: must be >= 0");
  }
  const double limit = std::min(half_window_s, geom.visible_half_width_s);
  const double x_sift = params.p_x * params.receiver_p_x();
  const double z_sift = (1.0 - params.p_x) * (1.0 - params.receiver_p_x());
  double total = 0.0;
  for (size_t i = 0; i < geom.samples.size(); ++i) {
    const double lo = std::max(geom.bin_lower_s(i), -limit);
    const double hi = std::min(geom.bin_upper_s(i), limit);
    if (hi <= lo) continue;
    const double p_d = link.transmittance(geom.samples[i].elevation_deg);
    BlockTallies bin;
    bin.params = params;
    for (int k = 0; k < kNumIntensities; ++k) {
      const double sent = params.source_rate_hz * (hi - lo) * params.probs[k];
      const double d = detection_prob(params.mu[k], p_d, link.p_ec, link.p_ap);
      const double e = error_prob(params.mu[k], p_d, link.p_ec, link.p_ap,
                                  err.qber_intrinsic, err.afterpulse_errors);
      bin.sent[k] = sent;
      bin.n_x[k] = sent * x_sift * d;
      bin.n_z[k] = sent * z_sift * d;
      bin.m_x[k] = sent * x_sift * e;
      bin.m_z[k] = sent * z_sift * e;
    }
    total += std::max(0.0, skl_asymptotic(bin).raw_length);
  }
  return total;
}

std::vector<MultiPassRow> multi_pass_table(const SystemConfig& cfg,
                                           double d_min_km,
                                           const std::vector<int>& passes,
                                           std::uint64_t seed) {
  cfg.Validate();
  const OverpassGeometry geom = pass_geometry(cfg.orbit, d_min_km);
  const WindowProfile profile(geom, cfg.link, cfg.error);
  std::vector<MultiPassRow> rows(passes.size());
  const int count = static_cast<int>(passes.size());
  const int inner = InnerThreads(cfg.space.threads, count);
  parallel_for(count, cfg.space.threads / inner, [&](int i) {
    if (passes[i] < 1) {
      throw std::invalid_argument("campaign.passes: entries must be >= 1");
    }
    OptSpace space = cfg.space;
    space.threads = inner;
    rows[i].passes = passes[i];
    rows[i].result =
        optimize_window(profile, cfg.security, space, seed, passes[i]);
    rows[i].asymptotic_per_pass =
        skl_asymptotic(profile.Tallies(rows[i].result.params,
                                       rows[i].result.half_window_s))
            .ell;
  });
  return rows;
}

std::vector<ProtocolComparisonRow> compare_protocols(
    const SystemConfig& cfg, double d_min_km,
    const std::vector<double>& eta_sys_db, std::uint64_t seed) {
  cfg.Validate();
  const OverpassGeometry geom = pass_geometry(cfg.orbit, d_min_km);
  std::vector<ProtocolComparisonRow> rows(eta_sys_db.size());
  const int count = static_cast<int>(rows.size());
  const int inner = InnerThreads(cfg.space.threads, 2 * count);
  parallel_for(2 * count, cfg.space.threads / inner, [&](int task) {
    const int i = task / 2;
    const bool standard = task % 2 == 1;
    const LinkModel link = cfg.link.WithSystemEfficiency(eta_sys_db[i]);
    OptSpace space = cfg.space;
    space.threads = inner;
    if (standard) {
      space.base.variant = ProtocolVariant::kStandardBB84;
      space.base.p_x = 0.5;
      space.base.p_x_receiver.reset();
      space.pin_p_x.reset();
    } else {
      space.base.variant = ProtocolVariant::kEfficientBB84;
      if (space.base.p_x == 0.5 && !space.pin_p_x) space.base.p_x = 0.9;
    }
    rows[i].eta_sys_db = eta_sys_db[i];
    OptResult r =
        optimize_single_pass(geom, link, cfg.error, cfg.security, space, seed);
    (standard ? rows[i].standard : rows[i].efficient) = std::move(r);
  });
  return rows;
}

void write_footprint_csv(std::ostream& os, const FootprintCurve& curve) {
  os.precision(17);
  os << "d_min_km,theta_max_deg,ell,half_window_s," << kParamColumns << '\n';
  for (const FootprintSample& s : curve.samples) {
    os << s.d_min_km << ',' << s.theta_max_deg << ',' << s.ell << ','
       << s.half_window_s << ',';
    WriteParams(os, s.params);
    os << '\n';
  }
}

FootprintCurve read_footprint_csv(std::istream& is) {
  FootprintCurve curve;
  std::string line;
  if (!std::getline(is, line) || line.rfind("d_min_km,", 0) != 0) {
    throw std::invalid_argument("footprint csv: missing header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> v;
    std::string field;
    while (std::getline(ss, field, ',')) v.push_back(std::stod(field));
    if (v.size() != 10) {
      throw std::invalid_argument("footprint csv: expected 10 columns");
    }
    FootprintSample s;
    s.d_min_km = v[0];
    s.theta_max_deg = v[1];
    s.ell = v[2];
    s.half_window_s = v[3];
    s.params.mu = {v[4], v[5], 0.0};
    s.params.probs = {v[6], v[7], v[8]};
    s.params.p_x = v[9];
    curve.samples.push_back(s);
  }
  for (const FootprintSample& s : curve.samples) {
    if (s.ell > 0) {
      curve.d_min_plus_km = s.d_min_km;
      curve.theta_max_minus_deg = s.theta_max_deg;
    }
  }
  return curve;
}

void write_sensitivity_csv(std::ostream& os,
                           const std::vector<SensitivityCell>& cells) {
  os.precision(17);
  os << "eta_sys_db,p_ec,qber_intrinsic,source_rate_hz,ell,zero_key,"
        "half_window_s,qber,"
     << kParamColumns << '\n';
  for (const SensitivityCell& c : cells) {
    os << c.eta_sys_db << ',' << c.p_ec << ',' << c.qber_intrinsic << ','
       << c.source_rate_hz << ',' << c.result.skl.ell << ','
       << (c.result.zero_key ? 1 : 0) << ',' << c.result.half_window_s << ','
       << c.result.skl.qber << ',';
    WriteParams(os, c.result.params);
    os << '\n';
  }
}

void write_multi_pass_csv(std::ostream& os,
                          const std::vector<MultiPassRow>& rows) {
  os.precision(17);
  os << "passes,ell,ell_per_pass,asymptotic_per_pass,half_window_s,"
     << kParamColumns << '\n';
  for (const MultiPassRow& r : rows) {
    os << r.passes << ',' << r.result.skl.ell << ','
       << r.result.per_pass_ell() << ',' << r.asymptotic_per_pass << ','
       << r.result.half_window_s << ',';
    WriteParams(os, r.result.params);
    os << '\n';
  }
}

void write_protocol_comparison_csv(
    std::ostream& os, const std::vector<ProtocolComparisonRow>& rows) {
  os.precision(17);
  os << "eta_sys_db,ell_efficient,ell_standard,p_x_efficient,"
        "disclosed_fraction_standard\n";
  for (const ProtocolComparisonRow& r : rows) {
    os << r.eta_sys_db << ',' << r.efficient.skl.ell << ','
       << r.standard.skl.ell << ',' << r.efficient.params.p_x << ','
       << r.standard.disclosed_fraction << '\n';
  }
}

void write_trace_csv(std::ostream& os, const std::vector<TraceEntry>& trace) {
  os.precision(17);
  os << "half_window_s,disclosed_fraction,raw_length,ell,qber,"
     << kParamColumns << '\n';
  for (const TraceEntry& t : trace) {
    os << t.half_window_s << ',' << t.disclosed_fraction << ','
       << t.raw_length << ',' << t.ell << ',' << t.qber << ',';
    WriteParams(os, t.params);
    os << '\n';
  }
}

}  // namespace satkey
