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

#ifndef SATKEY_FINITE_KEY_H_
#define SATKEY_FINITE_KEY_H_

#include <array>
#include <cstdint>
#include <optional>

#include "satkey/counts.h"

namespace satkey {

struct SecurityParams {
  double eps_c = 1e-15;  // correctness
  double eps_s = 1e-9;   // secrecy
  // Number of concentration-bound applications sharing eps_s.
  int n_chernoff_terms = 21;

  void Validate() const;
  // Failure probability charged to each Chernoff correction.
  double chernoff_eps() const { return eps_s / n_chernoff_terms; }
  // 6 log2(21 / eps_s) + log2(2 / eps_c).
  double composable_overhead_bits() const;
};

// Shannon binary entropy in bits. Throws std::domain_error outside [0, 1].
double binary_entropy(double x);

struct ChernoffDelta {
  double plus;
  double minus;
};

// Deviation terms of the inverse multiplicative Chernoff bound for an
// observed count y at failure probability eps, with beta = ln(1/eps):
//   plus  = beta + sqrt(2 beta y + beta^2)
//   minus = beta / 2 + sqrt(2 beta y + beta^2 / 4)
ChernoffDelta chernoff_delta(double y, double eps);

// Finite-size corrected tallies n^{+/-}_{b,k} = (e^{mu_k} / p_k)(n_{b,k} +/- delta),
// likewise for errors m. Index k follows ProtocolParams::mu.
struct CorrectedTallies {
  PerIntensity n_x_plus{}, n_x_minus{};
  PerIntensity n_z_plus{}, n_z_minus{};
  PerIntensity m_x_plus{}, m_x_minus{};
  PerIntensity m_z_plus{}, m_z_minus{};
};

// `eps` is the per-application failure probability; std::nullopt switches the
// corrections off (asymptotic statistics).
CorrectedTallies corrected_tallies(const BlockTallies& tallies,
                                   std::optional<double> eps);

struct DecoyEstimates {
  double s_x0 = 0;  // X-basis vacuum detections, lower bound
  double s_x1 = 0;  // X-basis single-photon detections, lower bound
  double s_z0 = 0;
  double s_z1 = 0;
  double v_z1 = 0;   // Z-basis single-photon errors, upper bound
  double phi_x = 0;  // X-basis single-photon phase error rate, upper bound
};

// Sampling-without-replacement correction to the phase error rate:
//   gamma(a, b, c, d) = sqrt((c + d)(1 - b) b / (c d ln 2)
//                            * log2((c + d) / (c d (1 - b) b) * 21^2 / a^2))
// Zero when b is 0 or the logarithm is non-positive.
double phase_error_sampling_term(double eps_sec, double error_ratio,
                                 double test_singles, double key_singles);

// Two-decoy yield and phase error bounds. `eps_sec` enables the sampling
// term; std::nullopt gives the asymptotic phase error v_z1 / s_z1.
// Yield estimates are clamped into [0, observed X detections].
DecoyEstimates decoy_estimates(const CorrectedTallies& corrected,
                               const BlockTallies& tallies,
                               std::optional<double> eps_sec);

// Smallest integer m in [0, n] with P(Binomial(n, p) <= m) >= eps.
std::int64_t binomial_quantile(double eps, std::int64_t n, double p);

// Error-correction leakage for a block of n_x bits at error rate q:
//   n h(q) + n (1-q) log2((1-q)/q) - (F^-1(eps_c; n, 1-q) - 1) log2((1-q)/q)
//   - log2(n) / 2 - log2(1/eps_c),
// clamped at zero. The quantile uses n rounded to the nearest integer.
double lambda_ec(double n_x, double q, double eps_c);

struct SklResult {
  double ell = 0;         // floored key length, >= 0
  double raw_length = 0;  // before floor and clamp
  double s_x0 = 0;
  double s_x1 = 0;
  double s_z1 = 0;
  double v_z1 = 0;
  double phi_x = 0;
  double lambda_ec = 0;
  double qber = 0;  // X-basis block QBER
  double n_x_total = 0;
  double overhead_bits = 0;
  CorrectedTallies corrected;
  // Standard BB84 only: key from the X and Z bases and the disclosed
  // fraction.
  std::optional<std::array<double, 2>> per_basis_ell;
  std::optional<double> disclosed_fraction;
};

// Knobs for the key length formula; the defaults give the finite-block key.
struct KeyLengthOptions {
  enum class Leakage { kFiniteBlock, kReconciliationFactor };

  bool finite_statistics = true;
  bool composable_overhead = true;
  Leakage leakage = Leakage::kFiniteBlock;
  double reconciliation_factor = 1.16;

  static KeyLengthOptions Finite() { return {}; }
  static KeyLengthOptions Asymptotic(double factor = 1.16) {
    return {false, false, Leakage::kReconciliationFactor, factor};
  }
};

// Key length from the X basis with the Z basis as test data:
//   ell = floor(s_x0 + s_x1 (1 - h(phi_x)) - lambda_ec - overhead)
SklResult key_length(const BlockTallies& tallies, const SecurityParams& sec,
                     const KeyLengthOptions& options);

// Composably secure key length of one block.
SklResult skl_finite(const BlockTallies& tallies, const SecurityParams& sec);

// Per-pass key length in the limit of many aggregated identical passes:
// no finite-size corrections, no composable overhead and leakage
// 1.16 n_x h(Q).
SklResult skl_asymptotic(const BlockTallies& single_pass_tallies);

// Symmetric-basis BB84 where both bases generate key. A fraction
// `disclosed_fraction` of each basis's sifted data is revealed and used as
// test data for the other basis; the rest is distilled. Throws
// std::invalid_argument unless the tallies come from standard BB84.
SklResult skl_standard_bb84(const BlockTallies& tallies,
                            const SecurityParams& sec,
                            double disclosed_fraction,
                            const KeyLengthOptions& options = {});

}  // namespace satkey

#endif  // SATKEY_FINITE_KEY_H_
