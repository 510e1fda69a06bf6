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

#include "satkey/finite_key.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace satkey {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

// P(Binomial(n, 1 - q) <= m), with q the failure probability.
double BinomialCdf(std::int64_t m, std::int64_t n, double q) {
  if (m < 0) return 0.0;
  if (m >= n) return 1.0;
  return boost::math::ibeta(static_cast<double>(n - m),
                            static_cast<double>(m + 1), q);
}

struct Bounds {
  double vacuum;
  double single;
};

// Two-decoy vacuum and single-photon lower bounds for one basis.
Bounds YieldBounds(const ProtocolParams& params, const PerIntensity& plus,
                   const PerIntensity& minus, double tau0, double tau1) {
  const double mu1 = params.mu[0];
  const double mu2 = params.mu[1];
  const double mu3 = params.mu[2];
  const double vacuum =
      std::max(0.0, tau0 * (mu2 * minus[2] - mu3 * plus[1]) / (mu2 - mu3));
  const double denom = mu1 * (mu2 - mu3) - mu2 * mu2 + mu3 * mu3;
  const double single = std::max(
      0.0, tau1 * mu1 *
               (minus[1] - plus[2] -
                (mu2 * mu2 - mu3 * mu3) / (mu1 * mu1) *
                    (plus[0] - vacuum / tau0)) /
               denom);
  return {vacuum, single};
}

}  // namespace

void SecurityParams::Validate() const {
  if (!(eps_c > 0 && eps_c < 1)) {
    throw std::invalid_argument("security.eps_c: must lie in (0, 1)");
  }
  if (!(eps_s > 0 && eps_s < 1)) {
    throw std::invalid_argument("security.eps_s: must lie in (0, 1)");
  }
  if (n_chernoff_terms < 1) {
    throw std::invalid_argument("security.n_chernoff_terms: must be >= 1");
  }
}

double SecurityParams::composable_overhead_bits() const {
  return 6.0 * std::log2(n_chernoff_terms / eps_s) + std::log2(2.0 / eps_c);
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("binary_entropy: argument outside [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

ChernoffDelta chernoff_delta(double y, double eps) {
  const double beta = std::log(1.0 / eps);
  const double root_term = 2.0 * beta * y;
  return {beta + std::sqrt(root_term + beta * beta),
          0.5 * beta + std::sqrt(root_term + 0.25 * beta * beta)};
}

CorrectedTallies corrected_tallies(const BlockTallies& tallies,
                                   std::optional<double> eps) {
  const ProtocolParams& params = tallies.params;
  CorrectedTallies c;
  auto correct = [&](double count, double gain, double& plus, double& minus) {
    ChernoffDelta d{0.0, 0.0};
    if (eps) d = chernoff_delta(count, *eps);
    plus = gain * (count + d.plus);
    minus = gain * (count - d.minus);
  };
  for (int k = 0; k < kNumIntensities; ++k) {
    const double gain = std::exp(params.mu[k]) / params.probs[k];
    correct(tallies.n_x[k], gain, c.n_x_plus[k], c.n_x_minus[k]);
    correct(tallies.n_z[k], gain, c.n_z_plus[k], c.n_z_minus[k]);
    correct(tallies.m_x[k], gain, c.m_x_plus[k], c.m_x_minus[k]);
    correct(tallies.m_z[k], gain, c.m_z_plus[k], c.m_z_minus[k]);
  }
  return c;
}

double phase_error_sampling_term(double eps_sec, double error_ratio,
                                 double test_singles, double key_singles) {
  const double b = error_ratio;
  const double c = test_singles;
  const double d = key_singles;
  if (!(b > 0.0) || b >= 1.0) return 0.0;
  if (!(c > 0.0 && d > 0.0)) return std::numeric_limits<double>::infinity();
  const double spread = (c + d) / (c * d * (1.0 - b) * b);
  const double log_arg = spread * 441.0 / (eps_sec * eps_sec);
  if (log_arg <= 1.0) return 0.0;
  return std::sqrt((c + d) * (1.0 - b) * b / (c * d * kLn2) *
                   std::log2(log_arg));
}

DecoyEstimates decoy_estimates(const CorrectedTallies& corrected,
                               const BlockTallies& tallies,
                               std::optional<double> eps_sec) {
  const ProtocolParams& params = tallies.params;
  double tau0 = 0.0;
  double tau1 = 0.0;
  for (int k = 0; k < kNumIntensities; ++k) {
    const double w = params.probs[k] * std::exp(-params.mu[k]);
    tau0 += w;
    tau1 += w * params.mu[k];
  }

  DecoyEstimates est;
  const Bounds x =
      YieldBounds(params, corrected.n_x_plus, corrected.n_x_minus, tau0, tau1);
  const Bounds z =
      YieldBounds(params, corrected.n_z_plus, corrected.n_z_minus, tau0, tau1);

  const double n_x = tallies.n_x_total();
  const double n_z = tallies.n_z_total();
  est.s_x0 = std::min(x.vacuum, n_x);
  est.s_x1 = std::min(x.single, n_x - est.s_x0);
  est.s_z0 = std::min(z.vacuum, n_z);
  est.s_z1 = std::min(z.single, n_z - est.s_z0);

  const double mu2 = params.mu[1];
  const double mu3 = params.mu[2];
  const double v = tau1 * (corrected.m_z_plus[1] - corrected.m_z_minus[2]) /
                   (mu2 - mu3);
  est.v_z1 = std::clamp(v, 0.0, est.s_z1);

  if (est.s_x1 <= 0.0) {
    // No single-photon key bits, the phase error is irrelevant.
    est.phi_x = 0.0;
  } else if (est.s_z1 <= 0.0) {
    est.phi_x = 0.5;
  } else {
    const double ratio = est.v_z1 / est.s_z1;
    double phi = ratio;
    if (eps_sec) {
      phi += phase_error_sampling_term(*eps_sec, ratio, est.s_z1, est.s_x1);
    }
    est.phi_x = std::clamp(phi, 0.0, 0.5);
  }
  return est;
}

std::int64_t binomial_quantile(double eps, std::int64_t n, double p) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("binomial_quantile: eps outside (0, 1)");
  }
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("binomial_quantile: bad n or p");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const double q = 1.0 - p;

  // Cornish-Fisher start, then bracket and bisect on the exact CDF.
  const double nd = static_cast<double>(n);
  const double sd = std::sqrt(nd * p * q);
  const double z = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * eps);
  const double skew = (q - p) / sd;
  const double guess = nd * p + sd * (z + skew * (z * z - 1.0) / 6.0) - 0.5;
  std::int64_t m0 = static_cast<std::int64_t>(std::llround(
      std::clamp(guess, 0.0, nd)));

  std::int64_t lo;  // CDF(lo) < eps
  std::int64_t hi;  // CDF(hi) >= eps
  if (BinomialCdf(m0, n, q) >= eps) {
    hi = m0;
    std::int64_t step = 1;
    lo = hi - step;
    while (lo >= 0 && BinomialCdf(lo, n, q) >= eps) {
      hi = lo;
      step *= 2;
      lo = hi - step;
    }
    lo = std::max<std::int64_t>(lo, -1);
  } else {
    lo = m0;
    std::int64_t step = 1;
    hi = lo + step;
    while (hi < n && BinomialCdf(hi, n, q) < eps) {
      lo = hi;
      step *= 2;
      hi = lo + step;
    }
    hi = std::min(hi, n);
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (BinomialCdf(mid, n, q) >= eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double lambda_ec(double n_x, double q, double eps_c) {
  if (!(n_x >= 1.0) || !std::isfinite(n_x)) {
    throw std::domain_error("lambda_ec: block size must be >= 1");
  }
  if (!(q > 0.0 && q < 0.5)) {
    throw std::domain_error("lambda_ec: qber must lie in (0, 0.5)");
  }
  if (!(eps_c > 0.0 && eps_c < 1.0)) {
    throw std::domain_error("lambda_ec: eps_c must lie in (0, 1)");
  }
  const auto n_int = static_cast<std::int64_t>(std::llround(n_x));
  const double ratio = std::log2((1.0 - q) / q);
  const double quantile =
      static_cast<double>(binomial_quantile(eps_c, n_int, 1.0 - q));
  const double value = n_x * binary_entropy(q) + n_x * (1.0 - q) * ratio -
                       (quantile - 1.0) * ratio - 0.5 * std::log2(n_x) -
                       std::log2(1.0 / eps_c);
  return std::max(0.0, value);
}

SklResult key_length(const BlockTallies& tallies, const SecurityParams& sec,
                     const KeyLengthOptions& options) {
  tallies.params.Validate();
  sec.Validate();

  SklResult r;
  r.corrected = corrected_tallies(
      tallies, options.finite_statistics
                   ? std::optional<double>(sec.chernoff_eps())
                   : std::nullopt);
  const DecoyEstimates est = decoy_estimates(
      r.corrected, tallies,
      options.finite_statistics ? std::optional<double>(sec.eps_s)
                                : std::nullopt);
  r.s_x0 = est.s_x0;
  r.s_x1 = est.s_x1;
  r.s_z1 = est.s_z1;
  r.v_z1 = est.v_z1;
  r.phi_x = est.phi_x;

  const double n_x = tallies.n_x_total();
  const double m_x = tallies.m_x_total();
  r.n_x_total = n_x;
  r.qber = n_x > 0.0 ? m_x / n_x : 0.0;

  if (n_x >= 1.0) {
    if (options.leakage == KeyLengthOptions::Leakage::kReconciliationFactor) {
      r.lambda_ec = options.reconciliation_factor * n_x *
                    binary_entropy(std::min(r.qber, 0.5));
    } else {
      // Zero observed errors: floor the QBER at one error per block.
      const double q = m_x > 0.0 ? r.qber : 1.0 / n_x;
      r.lambda_ec = q < 0.5 ? lambda_ec(n_x, q, sec.eps_c) : n_x;
    }
  }
  r.overhead_bits =
      options.composable_overhead ? sec.composable_overhead_bits() : 0.0;
  r.raw_length = r.s_x0 + r.s_x1 * (1.0 - binary_entropy(r.phi_x)) -
                 r.lambda_ec - r.overhead_bits;
  r.ell = std::floor(std::max(0.0, r.raw_length));
  return r;
}

SklResult skl_finite(const BlockTallies& tallies, const SecurityParams& sec) {
  return key_length(tallies, sec, KeyLengthOptions::Finite());
}

SklResult skl_asymptotic(const BlockTallies& single_pass_tallies) {
  return key_length(single_pass_tallies, SecurityParams{},
                    KeyLengthOptions::Asymptotic());
}

SklResult skl_standard_bb84(const BlockTallies& tallies,
                            const SecurityParams& sec,
                            double disclosed_fraction,
                            const KeyLengthOptions& options) {
  if (tallies.params.variant != ProtocolVariant::kStandardBB84) {
    throw std::invalid_argument(
        "skl_standard_bb84: tallies are not from standard-bb84");
  }
  if (!(disclosed_fraction >= 0.0 && disclosed_fraction <= 1.0)) {
    throw std::invalid_argument(
        "skl_standard_bb84: disclosed fraction must lie in [0, 1]");
  }
  const double f = disclosed_fraction;

  // Key from `key` basis data, tested with the disclosed part of `test`.
  auto split = [&](const PerIntensity& key_n, const PerIntensity& key_m,
                   const PerIntensity& test_n, const PerIntensity& test_m) {
    BlockTallies t;
    t.params = tallies.params;
    t.sent = tallies.sent;
    for (int k = 0; k < kNumIntensities; ++k) {
      t.n_x[k] = (1.0 - f) * key_n[k];
      t.m_x[k] = (1.0 - f) * key_m[k];
      t.n_z[k] = f * test_n[k];
      t.m_z[k] = f * test_m[k];
    }
    return key_length(t, sec, options);
  };

  SklResult x_key = split(tallies.n_x, tallies.m_x, tallies.n_z, tallies.m_z);
  const SklResult z_key =
      split(tallies.n_z, tallies.m_z, tallies.n_x, tallies.m_x);

  SklResult r = x_key;
  r.ell = x_key.ell + z_key.ell;
  r.raw_length = x_key.raw_length + z_key.raw_length;
  r.per_basis_ell = std::array<double, 2>{x_key.ell, z_key.ell};
  r.disclosed_fraction = f;
  return r;
}

}  // namespace satkey
