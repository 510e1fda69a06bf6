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

#include "satkey/optimizer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "satkey/nelder_mead.h"

namespace satkey {
namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("optimizer." + what);
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of the search at window grid index j.
std::uint64_t PointSeed(std::uint64_t seed, long j) {
  return SplitMix64(SplitMix64(seed) ^ static_cast<std::uint64_t>(j));
}

double Lerp(double lo, double hi, double u) { return lo + u * (hi - lo); }

double InvLerp(double lo, double hi, double x) {
  if (hi <= lo) return 0.5;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

bool IsStandard(const OptSpace& space) {
  return space.base.variant == ProtocolVariant::kStandardBB84;
}

// Best result of the local searches at one window.
struct PointResult {
  long j = 0;
  double half_window_s = 0;
  ParamMapping::Candidate best;
  SklResult skl;
  std::int64_t evaluations = 0;
  std::optional<ParamMapping::Candidate> lowest_qber;
  double lowest_qber_value = std::numeric_limits<double>::infinity();
  std::vector<TraceEntry> trace;
};

std::vector<std::vector<double>> LatinHypercube(int count, int dim,
                                                std::mt19937_64& rng) {
  std::vector<std::vector<double>> points(count, std::vector<double>(dim));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> strata(count);
  for (int d = 0; d < dim; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int i = 0; i < count; ++i) {
      points[i][d] = (strata[i] + unit(rng)) / count;
    }
  }
  return points;
}

PointResult SearchWindow(const WindowProfile& profile,
                         const SecurityParams& sec, const OptSpace& space,
                         const ParamMapping& mapping,
                         const ParamMapping::Candidate& warm, long j,
                         double half_window_s, std::uint64_t seed,
                         int passes) {
  PointResult out;
  out.j = j;
  out.half_window_s = half_window_s;
  double best_raw = -std::numeric_limits<double>::infinity();

  auto objective = [&](std::span<const double> u) {
    const ParamMapping::Candidate c = mapping.Map(u);
    const SklResult r = evaluate_candidate(profile, sec, c.params,
                                           half_window_s,
                                           c.disclosed_fraction, passes);
    ++out.evaluations;
    if (r.raw_length > best_raw) {
      best_raw = r.raw_length;
      out.best = c;
      out.skl = r;
    }
    if (r.n_x_total > 0 && r.qber < out.lowest_qber_value) {
      out.lowest_qber_value = r.qber;
      out.lowest_qber = c;
    }
    if (space.record_trace) {
      out.trace.push_back({c.params, half_window_s, c.disclosed_fraction,
                           r.raw_length, r.ell, r.qber});
    }
    return -r.raw_length;
  };

  NelderMeadOptions nm;
  nm.rel_tol = space.rel_tol;
  nm.max_evaluations = space.max_evaluations_per_start;

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> starts{mapping.Unmap(warm)};
  for (auto& p : LatinHypercube(space.starts, mapping.dimension(), rng)) {
    starts.push_back(std::move(p));
  }
  for (const auto& x0 : starts) {
    nelder_mead_unit_box(objective, x0, nm);
    if (mapping.dimension() == 0) break;
  }
  return out;
}

// Strict ordering of window results: larger key, then larger window.
bool Better(const PointResult& a, const PointResult& b) {
  if (a.skl.raw_length != b.skl.raw_length) {
    return a.skl.raw_length > b.skl.raw_length;
  }
  return a.j < b.j;
}

}  // namespace

void OptSpace::Validate() const {
  base.Validate();
  Require(p_x_min > 0 && p_x_min <= p_x_max && p_x_max < 1,
          "p_x: bounds must satisfy 0 < min <= max < 1");
  Require(mu2_min > 0, "mu2_min: must be > 0");
  Require(mu_gap > 0, "mu_gap: must be > 0");
  Require(mu1_min <= mu1_max && mu1_max >= mu2_min + mu_gap,
          "mu1: bounds leave no room above mu2");
  Require(p_min > 0 && 3 * p_min < 1, "p_min: must lie in (0, 1/3)");
  Require(f_pe_min > 0 && f_pe_min <= f_pe_max && f_pe_max < 1,
          "f_pe: bounds must satisfy 0 < min <= max < 1");
  Require(dt_step_s > 0, "dt_step_s: must be > 0");
  Require(dt_coarse_steps >= 1, "dt_coarse_steps: must be >= 1");
  Require(starts >= 1, "starts: must be >= 1");
  Require(rel_tol > 0, "rel_tol: must be > 0");
  Require(max_evaluations_per_start >= 1,
          "max_evaluations_per_start: must be >= 1");
  Require(threads >= 1, "threads: must be >= 1");
  if (pin_dt) Require(*pin_dt >= 0, "pin_dt: must be >= 0");
  if (pin_mu1 && pin_mu2) {
    Require(*pin_mu1 > *pin_mu2, "pin_mu1: must exceed pin_mu2");
  }
  if (pin_p1 && pin_p2) {
    Require(*pin_p1 + *pin_p2 <= 1 - p_min,
            "pin_p1: pinned probabilities leave p3 below p_min");
  }
  if (pin_p_x) {
    Require(*pin_p_x > 0 && *pin_p_x < 1, "pin_p_x: must lie in (0, 1)");
  }
  if (pin_f_pe) {
    Require(*pin_f_pe >= 0 && *pin_f_pe <= 1, "pin_f_pe: must lie in [0, 1]");
  }
}

ParamMapping::ParamMapping(const OptSpace& space) : space_(space) {
  pins_[kPx] = space.pin_p_x;
  pins_[kMu1] = space.pin_mu1;
  pins_[kMu2] = space.pin_mu2;
  pins_[kP1] = space.pin_p1;
  pins_[kP2] = space.pin_p2;
  pins_[kFpe] = space.pin_f_pe;
  if (IsStandard(space)) {
    pins_[kPx] = 0.5;
  } else {
    pins_[kFpe] = 0.0;
  }
  for (int v = 0; v < kNumVars; ++v) {
    if (!pins_[v]) free_.push_back(static_cast<Var>(v));
  }
}

ParamMapping::Candidate ParamMapping::Map(std::span<const double> u) const {
  std::array<double, kNumVars> unit{};
  unit.fill(0.5);
  for (size_t i = 0; i < free_.size() && i < u.size(); ++i) {
    unit[free_[i]] = u[i];
  }
  auto value = [&](Var v, double lo, double hi) {
    return pins_[v] ? *pins_[v] : Lerp(lo, std::max(lo, hi), unit[v]);
  };
  const OptSpace& s = space_;
  Candidate c;
  c.params = s.base;
  c.params.p_x = value(kPx, s.p_x_min, s.p_x_max);
  const double mu1_lo =
      std::max(s.mu1_min, (pins_[kMu2] ? *pins_[kMu2] : s.mu2_min) + s.mu_gap);
  const double mu1 = value(kMu1, mu1_lo, s.mu1_max);
  const double mu2 = value(kMu2, s.mu2_min, mu1 - s.mu_gap);
  const double p1_hi = 1.0 - s.p_min - (pins_[kP2] ? *pins_[kP2] : s.p_min);
  const double p1 = value(kP1, s.p_min, p1_hi);
  const double p2 = value(kP2, s.p_min, 1.0 - p1 - s.p_min);
  c.params.mu = {mu1, mu2, 0.0};
  c.params.probs = {p1, p2, 1.0 - p1 - p2};
  c.disclosed_fraction = value(kFpe, s.f_pe_min, s.f_pe_max);
  return c;
}

std::vector<double> ParamMapping::Unmap(const Candidate& c) const {
  const OptSpace& s = space_;
  std::array<double, kNumVars> unit{};
  const double mu1 = c.params.mu[0];
  const double p1 = c.params.probs[0];
  unit[kPx] = InvLerp(s.p_x_min, s.p_x_max, c.params.p_x);
  const double mu1_lo =
      std::max(s.mu1_min, (pins_[kMu2] ? *pins_[kMu2] : s.mu2_min) + s.mu_gap);
  unit[kMu1] = InvLerp(mu1_lo, s.mu1_max, mu1);
  const double mu1_mapped = pins_[kMu1] ? *pins_[kMu1]
                                        : Lerp(mu1_lo, s.mu1_max, unit[kMu1]);
  unit[kMu2] = InvLerp(s.mu2_min, mu1_mapped - s.mu_gap, c.params.mu[1]);
  const double p1_hi = 1.0 - s.p_min - (pins_[kP2] ? *pins_[kP2] : s.p_min);
  unit[kP1] = InvLerp(s.p_min, p1_hi, p1);
  const double p1_mapped =
      pins_[kP1] ? *pins_[kP1] : Lerp(s.p_min, p1_hi, unit[kP1]);
  unit[kP2] = InvLerp(s.p_min, 1.0 - p1_mapped - s.p_min, c.params.probs[1]);
  unit[kFpe] = InvLerp(s.f_pe_min, s.f_pe_max, c.disclosed_fraction);
  std::vector<double> u;
  for (Var v : free_) u.push_back(unit[v]);
  return u;
}

SklResult evaluate_candidate(const WindowProfile& profile,
                             const SecurityParams& sec,
                             const ProtocolParams& params,
                             double half_window_s, double disclosed_fraction,
                             int passes) {
  BlockTallies t = profile.Tallies(params, half_window_s);
  if (passes != 1) t = t.Scaled(passes);
  if (params.variant == ProtocolVariant::kStandardBB84) {
    return skl_standard_bb84(t, sec, disclosed_fraction);
  }
  return skl_finite(t, sec);
}

std::vector<double> half_window_grid(double dt_max, double step) {
  if (!(step > 0)) throw std::invalid_argument("dt_step_s: must be > 0");
  std::vector<double> grid;
  if (!(dt_max > 0)) return {0.0};
  const long count = static_cast<long>(std::ceil(dt_max / step - 1e-9));
  for (long j = count; j >= 0; --j) {
    grid.push_back(std::max(0.0, dt_max - static_cast<double>(j) * step));
  }
  return grid;
}

OptResult optimize_window(const WindowProfile& profile,
                          const SecurityParams& sec, const OptSpace& space,
                          std::uint64_t seed, int passes) {
  space.Validate();
  sec.Validate();
  if (passes < 1) throw std::invalid_argument("passes: must be >= 1");
  const ParamMapping mapping(space);

  // Window index j stands for dt_max - j * step.
  const double dt_max = profile.max_half_window_s();
  const long last_j =
      dt_max > 0 ? static_cast<long>(std::ceil(dt_max / space.dt_step_s - 1e-9))
                 : 0;
  auto window_at = [&](long j) {
    if (space.pin_dt) return std::min(*space.pin_dt, dt_max);
    return std::max(0.0, dt_max - static_cast<double>(j) * space.dt_step_s);
  };

  std::vector<PointResult> evaluated;
  ParamMapping::Candidate warm{space.base, 0.5 * (space.f_pe_min +
                                                  space.f_pe_max)};
  if (space.pin_f_pe) warm.disclosed_fraction = *space.pin_f_pe;

  auto run_level = [&](const std::vector<long>& js) {
    std::vector<PointResult> level(js.size());
    parallel_for(static_cast<int>(js.size()), space.threads, [&](int i) {
      level[i] = SearchWindow(profile, sec, space, mapping, warm, js[i],
                              window_at(js[i]), PointSeed(seed, js[i]),
                              passes);
    });
    for (auto& r : level) evaluated.push_back(std::move(r));
  };
  auto best_index = [&]() {
    size_t b = 0;
    for (size_t i = 1; i < evaluated.size(); ++i) {
      if (Better(evaluated[i], evaluated[b])) b = i;
    }
    return b;
  };
  auto seen = [&](long j) {
    return std::any_of(evaluated.begin(), evaluated.end(),
                       [j](const PointResult& r) { return r.j == j; });
  };

  if (space.pin_dt || last_j == 0) {
    run_level({0});
  } else {
    // Coarse pass over the grid, then halve the spacing around the best.
    long stride = std::min<long>(space.dt_coarse_steps, last_j);
    std::vector<long> coarse;
    for (long j = 0; j < last_j; j += stride) coarse.push_back(j);
    if (coarse.size() == 1 && last_j > 0) coarse.push_back(last_j);
    run_level(coarse);
    while (stride > 1) {
      stride = (stride + 1) / 2;
      const PointResult& best = evaluated[best_index()];
      warm = best.best;
      std::vector<long> next;
      for (long j : {best.j - stride, best.j + stride}) {
        if (j >= 0 && j <= last_j && !seen(j)) next.push_back(j);
      }
      if (!next.empty()) run_level(next);
    }
  }

  OptResult result;
  result.passes = passes;
  const PointResult& best = evaluated[best_index()];
  result.params = best.best.params;
  result.disclosed_fraction = best.best.disclosed_fraction;
  result.half_window_s = best.half_window_s;
  result.skl = best.skl;
  for (const PointResult& r : evaluated) {
    result.evaluations += r.evaluations;
    if (space.record_trace) {
      result.trace.insert(result.trace.end(), r.trace.begin(), r.trace.end());
    }
  }
  if (result.skl.ell <= 0) {
    result.zero_key = true;
    const PointResult* pick = nullptr;
    for (const PointResult& r : evaluated) {
      if (r.lowest_qber &&
          (!pick || r.lowest_qber_value < pick->lowest_qber_value)) {
        pick = &r;
      }
    }
    if (pick) {
      result.params = pick->lowest_qber->params;
      result.disclosed_fraction = pick->lowest_qber->disclosed_fraction;
      result.half_window_s = pick->half_window_s;
      result.skl = evaluate_candidate(profile, sec, result.params,
                                      result.half_window_s,
                                      result.disclosed_fraction, passes);
    }
  }
  if (result.params.variant != ProtocolVariant::kStandardBB84) {
    result.disclosed_fraction = 0;
  }
  return result;
}

OptResult optimize_single_pass(const OverpassGeometry& geom,
                               const LinkModel& link, const ErrorModel& err,
                               const SecurityParams& sec,
                               const OptSpace& space, std::uint64_t seed) {
  return optimize_multi_pass(1, geom, link, err, sec, space, seed);
}

OptResult optimize_multi_pass(int passes, const OverpassGeometry& geom,
                              const LinkModel& link, const ErrorModel& err,
                              const SecurityParams& sec,
                              const OptSpace& space, std::uint64_t seed) {
  link.Validate();
  const WindowProfile profile(geom, link, err);
  return optimize_window(profile, sec, space, seed, passes);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

int resolve_threads(std::optional<int> requested) {
  if (requested) {
    if (*requested < 1) throw std::invalid_argument("threads: must be >= 1");
    return *requested;
  }
  if (const char* env = std::getenv("SATKEY_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("SATKEY_THREADS: must be a positive integer");
  }
  return 1;
}

}  // namespace satkey
