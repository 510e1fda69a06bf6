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

#include "satkey/counts.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace satkey {
namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool InOpenUnit(double x) { return x > 0 && x < 1; }

}  // namespace

std::string_view VariantName(ProtocolVariant v) {
  return v == ProtocolVariant::kEfficientBB84 ? "efficient-bb84"
                                               : "standard-bb84";
}

ProtocolVariant ParseVariant(std::string_view name) {
  if (name == "efficient-bb84" || name == "a-bb84") {
    return ProtocolVariant::kEfficientBB84;
  }
  if (name == "standard-bb84" || name == "s-bb84") {
    return ProtocolVariant::kStandardBB84;
  }
  throw std::invalid_argument("protocol.variant: unknown variant '" +
                              std::string(name) + "'");
}

void ProtocolParams::Validate() const {
  Require(mu[2] == 0.0, "protocol.mu3: vacuum intensity must be 0");
  Require(mu[1] > mu[2], "protocol.mu2: must satisfy mu2 > mu3");
  Require(mu[0] > mu[1], "protocol.mu1: must satisfy mu1 > mu2");
  Require(std::isfinite(mu[0]), "protocol.mu1: must be finite");
  Require(mu[0] - mu[1] > mu[2], "protocol.mu1: must satisfy mu1 - mu2 > mu3");
  Require(mu[0] * (mu[1] - mu[2]) - mu[1] * mu[1] + mu[2] * mu[2] > 0,
          "protocol.mu: degenerate decoy estimator denominator");
  for (double p : probs) {
    Require(InOpenUnit(p), "protocol.p: intensity probabilities must lie in (0, 1)");
  }
  Require(std::abs(probs[0] + probs[1] + probs[2] - 1.0) < 1e-9,
          "protocol.p: intensity probabilities must sum to 1");
  Require(std::isfinite(source_rate_hz) && source_rate_hz > 0,
          "protocol.source_rate_hz: must be > 0");
  if (variant == ProtocolVariant::kStandardBB84) {
    Require(p_x == 0.5 && receiver_p_x() == 0.5,
            "protocol.p_x: standard-bb84 requires p_x = 0.5");
  } else {
    Require(InOpenUnit(p_x), "protocol.p_x: must lie in (0, 1)");
    Require(InOpenUnit(receiver_p_x()),
            "protocol.p_x_receiver: must lie in (0, 1)");
  }
}

void ErrorModel::Validate() const {
  Require(qber_intrinsic >= 0 && qber_intrinsic < 0.5,
          "error.qber_intrinsic: must lie in [0, 0.5)");
}

BlockTallies BlockTallies::Scaled(double factor) const {
  BlockTallies out = *this;
  for (int k = 0; k < kNumIntensities; ++k) {
    out.sent[k] *= factor;
    out.n_x[k] *= factor;
    out.n_z[k] *= factor;
    out.m_x[k] *= factor;
    out.m_z[k] *= factor;
  }
  return out;
}

BlockTallies& BlockTallies::operator+=(const BlockTallies& other) {
  if (!(params == other.params)) {
    throw std::invalid_argument(
        "aggregate: tallies were produced with different protocol settings");
  }
  for (int k = 0; k < kNumIntensities; ++k) {
    sent[k] += other.sent[k];
    n_x[k] += other.n_x[k];
    n_z[k] += other.n_z[k];
    m_x[k] += other.m_x[k];
    m_z[k] += other.m_z[k];
  }
  return *this;
}

bool BlockTallies::IsZero() const {
  for (int k = 0; k < kNumIntensities; ++k) {
    if (sent[k] != 0 || n_x[k] != 0 || n_z[k] != 0 || m_x[k] != 0 ||
        m_z[k] != 0) {
      return false;
    }
  }
  return true;
}

double detection_prob(double mu, double p_d, double p_ec, double p_ap) {
  // Same as 1 - (1 - 2 p_ec) e^{-mu p_d}, without the cancellation.
  const double raw =
      -std::expm1(-mu * p_d) + 2.0 * p_ec * std::exp(-mu * p_d);
  return std::min(1.0, raw * (1.0 + p_ap));
}

double error_prob(double mu, double p_d, double p_ec, double p_ap,
                  double qber_intrinsic, bool afterpulse_errors) {
  const double d = detection_prob(mu, p_d, p_ec, p_ap);
  const double d_raw = detection_prob(mu, p_d, p_ec, 0.0);
  double e = p_ec + qber_intrinsic * -std::expm1(-mu * p_d);
  if (afterpulse_errors) e += 0.5 * p_ap * d_raw;
  return std::min(d, e);
}

BlockTallies accumulate_window(const OverpassGeometry& geom,
                               const LinkModel& link,
                               const ProtocolParams& params,
                               const ErrorModel& err, double half_window_s) {
  Require(half_window_s >= 0, "half_window_s: must be >= 0");
  return accumulate_interval(geom, link, params, err, -half_window_s,
                             half_window_s);
}

BlockTallies accumulate_interval(const OverpassGeometry& geom,
                                 const LinkModel& link,
                                 const ProtocolParams& params,
                                 const ErrorModel& err, double t_begin_s,
                                 double t_end_s) {
  params.Validate();
  err.Validate();
  Require(t_begin_s <= t_end_s, "interval: begin must not exceed end");

  BlockTallies out;
  out.params = params;
  const double x_sift = params.p_x * params.receiver_p_x();
  const double z_sift = (1.0 - params.p_x) * (1.0 - params.receiver_p_x());

  for (size_t i = 0; i < geom.samples.size(); ++i) {
    const double lo = std::max(geom.bin_lower_s(i), t_begin_s);
    const double hi = std::min(geom.bin_upper_s(i), t_end_s);
    if (hi <= lo) continue;
    const double p_d = link.transmittance(geom.samples[i].elevation_deg);
    for (int k = 0; k < kNumIntensities; ++k) {
      const double sent = params.source_rate_hz * (hi - lo) * params.probs[k];
      const double d = detection_prob(params.mu[k], p_d, link.p_ec, link.p_ap);
      const double e =
          error_prob(params.mu[k], p_d, link.p_ec, link.p_ap,
                     err.qber_intrinsic, err.afterpulse_errors);
      out.sent[k] += sent;
      out.n_x[k] += sent * x_sift * d;
      out.n_z[k] += sent * z_sift * d;
      out.m_x[k] += sent * x_sift * e;
      out.m_z[k] += sent * z_sift * e;
    }
  }
  return out;
}

BlockTallies aggregate(std::span<const BlockTallies> tallies) {
  Require(!tallies.empty(), "aggregate: empty tally list");
  BlockTallies out = tallies.front();
  for (size_t i = 1; i < tallies.size(); ++i) out += tallies[i];
  return out;
}

BlockTallies sample_tallies(const BlockTallies& expected,
                            std::mt19937_64& rng) {
  BlockTallies out = expected;
  auto draw = [&](double mean, double errors, double& n, double& m) {
    const auto clicks = mean > 0
                            ? std::poisson_distribution<long long>(mean)(rng)
                            : 0LL;
    long long errs = 0;
    if (clicks > 0 && mean > 0) {
      const double q = std::clamp(errors / mean, 0.0, 1.0);
      errs = std::binomial_distribution<long long>(clicks, q)(rng);
    }
    n = static_cast<double>(clicks);
    m = static_cast<double>(errs);
  };
  for (int k = 0; k < kNumIntensities; ++k) {
    out.sent[k] = std::round(expected.sent[k]);
    draw(expected.n_x[k], expected.m_x[k], out.n_x[k], out.m_x[k]);
    draw(expected.n_z[k], expected.m_z[k], out.n_z[k], out.m_z[k]);
  }
  return out;
}

WindowProfile::WindowProfile(const OverpassGeometry& geom,
                             const LinkModel& link, const ErrorModel& err)
    : p_ec_(link.p_ec),
      p_ap_(link.p_ap),
      qber_i_(err.qber_intrinsic),
      afterpulse_errors_(err.afterpulse_errors),
      max_half_window_s_(geom.max_half_window_s()) {
  err.Validate();
  constexpr int kRow = kSeriesTerms + 1;
  moments_.assign(kRow, 0.0);
  if (geom.empty()) return;

  const size_t center = geom.samples.size() / 2;
  double running_max = 0.0;
  for (size_t i = center; i < geom.samples.size(); ++i) {
    const double lo = i == center ? 0.0 : geom.bin_lower_s(i);
    const double hi = geom.bin_upper_s(i);
    const double p = link.transmittance(geom.samples[i].elevation_deg);
    seg_lo_.push_back(lo);
    seg_hi_.push_back(hi);
    p_d_.push_back(p);
    running_max = std::max(running_max, p);
    p_d_prefix_max_.push_back(running_max);

    const size_t prev = moments_.size() - kRow;
    double weight = 2.0 * (hi - lo);
    for (int n = 0; n < kRow; ++n) {
      moments_.push_back(moments_[prev + n] + weight);
      weight *= p;
    }
  }
}

WindowProfile::Sums WindowProfile::DirectSums(double mu, size_t full,
                                              double partial_s) const {
  Sums s{0.0, 0.0, 0.0};
  auto add = [&](size_t j, double time) {
    s.time += time;
    s.detections += time * detection_prob(mu, p_d_[j], p_ec_, p_ap_);
    s.errors += time * error_prob(mu, p_d_[j], p_ec_, p_ap_, qber_i_,
                                  afterpulse_errors_);
  };
  for (size_t j = 0; j < full; ++j) add(j, 2.0 * (seg_hi_[j] - seg_lo_[j]));
  if (partial_s > 0.0) add(full, 2.0 * partial_s);
  return s;
}

WindowProfile::Sums WindowProfile::IntensitySums(double mu, size_t full,
                                                 double partial_s) const {
  const size_t last = partial_s > 0.0 ? full : full - (full > 0 ? 1 : 0);
  if (full == 0 && partial_s <= 0.0) return {0.0, 0.0, 0.0};
  const double x_max = mu * p_d_prefix_max_[last];
  const double worst_raw = 1.0 - (1.0 - 2.0 * p_ec_) * std::exp(-x_max);
  // The series is only used where it converges fast and neither min() in
  // the per-pulse probabilities can bind.
  if (x_max > 1.0 || worst_raw * (1.0 + p_ap_) > 1.0 || p_ec_ > 0.25) {
    return DirectSums(mu, full, partial_s);
  }

  const double* m = &moments_[full * (kSeriesTerms + 1)];
  const double time = m[0];
  // Time integral of 1 - exp(-mu p_d).
  double one_minus = 0.0;
  double coeff = 1.0;
  for (int n = 1; n <= kSeriesTerms; ++n) {
    coeff *= mu / n;
    const double term = coeff * m[n];
    one_minus += (n % 2 == 1) ? term : -term;
    if (term <= 1e-18 * std::abs(one_minus)) break;
  }
  const double raw = one_minus + 2.0 * p_ec_ * (time - one_minus);
  Sums s;
  s.time = time;
  s.detections = raw * (1.0 + p_ap_);
  s.errors = time * p_ec_ + qber_i_ * one_minus;
  if (afterpulse_errors_) s.errors += 0.5 * p_ap_ * raw;

  if (partial_s > 0.0) {
    const double t = 2.0 * partial_s;
    s.time += t;
    s.detections += t * detection_prob(mu, p_d_[full], p_ec_, p_ap_);
    s.errors += t * error_prob(mu, p_d_[full], p_ec_, p_ap_, qber_i_,
                               afterpulse_errors_);
  }
  return s;
}

BlockTallies WindowProfile::Tallies(const ProtocolParams& params,
                                    double half_window_s) const {
  BlockTallies out;
  out.params = params;
  const double limit = std::clamp(half_window_s, 0.0, max_half_window_s_);
  if (seg_hi_.empty() || limit <= 0.0) return out;
  const size_t full = static_cast<size_t>(
      std::upper_bound(seg_hi_.begin(), seg_hi_.end(), limit) -
      seg_hi_.begin());
  const double partial_s =
      full < seg_lo_.size() ? std::max(0.0, limit - seg_lo_[full]) : 0.0;

  const double x_sift = params.p_x * params.receiver_p_x();
  const double z_sift = (1.0 - params.p_x) * (1.0 - params.receiver_p_x());
  for (int k = 0; k < kNumIntensities; ++k) {
    const double rate = params.source_rate_hz * params.probs[k];
    const Sums s = IntensitySums(params.mu[k], full, partial_s);
    out.sent[k] = rate * s.time;
    out.n_x[k] = rate * x_sift * s.detections;
    out.n_z[k] = rate * z_sift * s.detections;
    out.m_x[k] = rate * x_sift * s.errors;
    out.m_z[k] = rate * z_sift * s.errors;
  }
  return out;
}

}  // namespace satkey
