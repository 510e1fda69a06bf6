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

#ifndef SATKEY_COUNTS_H_
#define SATKEY_COUNTS_H_

#include <array>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "satkey/link.h"
#include "satkey/orbit.h"

namespace satkey {

inline constexpr int kNumIntensities = 3;
using PerIntensity = std::array<double, kNumIntensities>;

enum class ProtocolVariant {
  // Biased basis choice: X generates key, Z is used for testing only.
  kEfficientBB84,
  // Symmetric basis choice: both bases generate key.
  kStandardBB84,
};

std::string_view VariantName(ProtocolVariant v);
ProtocolVariant ParseVariant(std::string_view name);

// Two-decoy weak coherent pulse settings. Index 0 is the signal, 1 the decoy
// and 2 the vacuum intensity.
struct ProtocolParams {
  ProtocolVariant variant = ProtocolVariant::kEfficientBB84;
  PerIntensity mu = {0.5, 0.08, 0.0};
  PerIntensity probs = {0.72, 0.18, 0.10};
  // Transmitter X-basis probability. The receiver uses the same value unless
  // `p_x_receiver` is set.
  double p_x = 0.9;
  std::optional<double> p_x_receiver;
  double source_rate_hz = 1e8;

  double receiver_p_x() const { return p_x_receiver.value_or(p_x); }

  // Throws std::invalid_argument naming the violated constraint.
  void Validate() const;

  bool operator==(const ProtocolParams&) const = default;
};

struct ErrorModel {
  double qber_intrinsic = 0.005;
  // Afterpulses contribute random bits (half errors) when enabled.
  bool afterpulse_errors = true;

  void Validate() const;
};

// Expected (or sampled) block data: pulses sent per intensity and sifted
// detections/errors per basis and intensity. Tallies remember the protocol
// settings that produced them.
struct BlockTallies {
  ProtocolParams params;
  PerIntensity sent{};
  PerIntensity n_x{};
  PerIntensity n_z{};
  PerIntensity m_x{};
  PerIntensity m_z{};

  double n_x_total() const { return n_x[0] + n_x[1] + n_x[2]; }
  double n_z_total() const { return n_z[0] + n_z[1] + n_z[2]; }
  double m_x_total() const { return m_x[0] + m_x[1] + m_x[2]; }
  double m_z_total() const { return m_z[0] + m_z[1] + m_z[2]; }

  BlockTallies Scaled(double factor) const;
  // Component-wise sum. Throws std::invalid_argument when the protocol
  // settings differ.
  BlockTallies& operator+=(const BlockTallies& other);
  bool IsZero() const;
};

// Click probability per pulse: min(1, [1 - (1 - 2 p_ec) exp(-mu p_d)] (1 + p_ap)).
double detection_prob(double mu, double p_d, double p_ec, double p_ap);

// Error probability per pulse:
// min(D, p_ec + qber_i (1 - exp(-mu p_d)) + (p_ap / 2) D_raw).
double error_prob(double mu, double p_d, double p_ec, double p_ap,
                  double qber_intrinsic, bool afterpulse_errors = true);

// Expected tallies for the window [-half_window_s, +half_window_s] of the pass
// by direct summation over the time bins.
BlockTallies accumulate_window(const OverpassGeometry& geom,
                               const LinkModel& link,
                               const ProtocolParams& params,
                               const ErrorModel& err, double half_window_s);

// Expected tallies for an arbitrary interval [t_begin_s, t_end_s] of the pass
// (times relative to culmination). Disjoint intervals aggregate to the
// tallies of their union.
BlockTallies accumulate_interval(const OverpassGeometry& geom,
                                 const LinkModel& link,
                                 const ProtocolParams& params,
                                 const ErrorModel& err, double t_begin_s,
                                 double t_end_s);

// Component-wise sum; all inputs must share protocol settings.
BlockTallies aggregate(std::span<const BlockTallies> tallies);

// Poisson-sampled detections with binomially thinned errors. Means equal the
// expected-value tallies.
BlockTallies sample_tallies(const BlockTallies& expected, std::mt19937_64& rng);

// Precomputed transmittance moments of a pass so that tallies for any window
// and any intensity set cost O(series length) instead of O(time bins).
// Agrees with accumulate_window to rounding.
class WindowProfile {
 public:
  WindowProfile(const OverpassGeometry& geom, const LinkModel& link,
                const ErrorModel& err);

  BlockTallies Tallies(const ProtocolParams& params,
                       double half_window_s) const;

  double max_half_window_s() const { return max_half_window_s_; }

 private:
  static constexpr int kSeriesTerms = 40;

  // Time integrals of D and E over the window for one intensity.
  struct Sums {
    double time;
    double detections;
    double errors;
  };
  Sums IntensitySums(double mu, size_t full, double partial_s) const;
  Sums DirectSums(double mu, size_t full, double partial_s) const;

  double p_ec_;
  double p_ap_;
  double qber_i_;
  bool afterpulse_errors_;
  double max_half_window_s_;
  // The pass is symmetric, so the window is described in |t|. Segment j
  // covers |t| in [seg_lo_[j], seg_hi_[j]] at transmittance p_d_[j] and
  // counts twice (both sides of culmination).
  std::vector<double> seg_lo_;
  std::vector<double> seg_hi_;
  std::vector<double> p_d_;
  std::vector<double> p_d_prefix_max_;
  // moments_[j * (kSeriesTerms + 1) + n] = time-weighted sum over the first
  // j segments of p_d^n, n = 0..kSeriesTerms.
  std::vector<double> moments_;
};

}  // namespace satkey

#endif  // SATKEY_COUNTS_H_
