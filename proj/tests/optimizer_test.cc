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

#include <atomic>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace satkey {
namespace {

struct Fixture {
  OrbitConfig orbit;
  OverpassGeometry geom;
  LinkModel link;
  ErrorModel err;
  SecurityParams sec;

  explicit Fixture(double eta_db = 27.0, double d_min = 0.0) {
    orbit.time_step_s = 0.5;
    geom = pass_geometry(orbit, d_min);
    link = LinkModel::Parametric(orbit).WithSystemEfficiency(eta_db);
  }
  WindowProfile Profile() const { return WindowProfile(geom, link, err); }
};

OptSpace QuickSpace() {
  OptSpace s;
  s.starts = 3;
  s.dt_step_s = 4.0;
  s.max_evaluations_per_start = 300;
  return s;
}

void ExpectFeasible(const ParamMapping::Candidate& c, const OptSpace& s) {
  const ProtocolParams& p = c.params;
  EXPECT_NO_THROW(p.Validate());
  EXPECT_GE(p.p_x, s.p_x_min - 1e-12);
  EXPECT_LE(p.p_x, s.p_x_max + 1e-12);
  EXPECT_GE(p.mu[0], s.mu1_min - 1e-12);
  EXPECT_LE(p.mu[0], s.mu1_max + 1e-12);
  EXPECT_GE(p.mu[1], s.mu2_min - 1e-12);
  EXPECT_GE(p.mu[0] - p.mu[1], s.mu_gap - 1e-12);
  EXPECT_EQ(p.mu[2], 0.0);
  for (double q : p.probs) EXPECT_GE(q, s.p_min - 1e-12);
  EXPECT_NEAR(p.probs[0] + p.probs[1] + p.probs[2], 1.0, 1e-12);
}

TEST(ParamMapping, DimensionsAndPins) {
  OptSpace s;
  EXPECT_EQ(ParamMapping(s).dimension(), 5);
  s.base.variant = ProtocolVariant::kStandardBB84;
  s.base.p_x = 0.5;
  EXPECT_EQ(ParamMapping(s).dimension(), 5);
  s.pin_mu2 = 0.1;
  s.pin_f_pe = 0.2;
  EXPECT_EQ(ParamMapping(s).dimension(), 3);
}

TEST(ParamMapping, EveryPointIsFeasible) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OptSpace s;
  const ParamMapping m(s);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> u(m.dimension());
    for (double& v : u) v = (i % 7 == 0) ? std::round(unit(rng)) : unit(rng);
    ExpectFeasible(m.Map(u), s);
  }
}

TEST(ParamMapping, PinsAreHonoured) {
  OptSpace s;
  s.pin_p_x = 0.8;
  s.pin_mu2 = 0.2;
  s.pin_p2 = 0.3;
  const ParamMapping m(s);
  ASSERT_EQ(m.dimension(), 2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto c = m.Map(std::vector<double>{unit(rng), unit(rng)});
    ExpectFeasible(c, s);
    EXPECT_EQ(c.params.p_x, 0.8);
    EXPECT_EQ(c.params.mu[1], 0.2);
    EXPECT_EQ(c.params.probs[1], 0.3);
  }
}

TEST(ParamMapping, StandardVariantFixesBasisChoice) {
  OptSpace s;
  s.base.variant = ProtocolVariant::kStandardBB84;
  s.base.p_x = 0.5;
  const ParamMapping m(s);
  const auto c = m.Map(std::vector<double>(m.dimension(), 0.9));
  EXPECT_EQ(c.params.p_x, 0.5);
  EXPECT_GE(c.disclosed_fraction, s.f_pe_min);
  EXPECT_LE(c.disclosed_fraction, s.f_pe_max);
}

TEST(ParamMapping, UnmapRoundTrip) {
  OptSpace s;
  const ParamMapping m(s);
  const std::vector<double> u{0.2, 0.4, 0.6, 0.3, 0.7};
  const auto c = m.Map(u);
  const auto back = m.Unmap(c);
  ASSERT_EQ(back.size(), u.size());
  for (size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(back[i], u[i], 1e-12);
}

TEST(HalfWindowGrid, AnchoredAtMaximum) {
  const auto g = half_window_grid(10.5, 2.0);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  EXPECT_DOUBLE_EQ(g.back(), 10.5);
  EXPECT_EQ(half_window_grid(0.0, 1.0), std::vector<double>{0.0});
  EXPECT_THROW(half_window_grid(5.0, 0.0), std::invalid_argument);
}

TEST(OptSpace, Validation) {
  OptSpace s;
  s.mu_gap = 0;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = OptSpace();
  s.pin_mu1 = 0.1;
  s.pin_mu2 = 0.2;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = OptSpace();
  s.pin_p1 = 0.6;
  s.pin_p2 = 0.395;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
}

TEST(Optimizer, DeterministicForSeedAndThreads) {
  const Fixture f(33.0);
  const WindowProfile profile = f.Profile();
  OptSpace s = QuickSpace();
  const OptResult a = optimize_window(profile, f.sec, s, 42);
  const OptResult b = optimize_window(profile, f.sec, s, 42);
  s.threads = 4;
  const OptResult c = optimize_window(profile, f.sec, s, 42);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.skl.ell, b.skl.ell);
  EXPECT_EQ(a.params, c.params);
  EXPECT_EQ(a.half_window_s, c.half_window_s);
  EXPECT_EQ(a.evaluations, c.evaluations);
}

TEST(Optimizer, BeatsRandomFeasibleCandidates) {
  const Fixture f(33.0);
  const WindowProfile profile = f.Profile();
  const OptSpace s = QuickSpace();
  const OptResult best = optimize_window(profile, f.sec, s, 1);
  ASSERT_FALSE(best.zero_key);
  const ParamMapping m(s);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto grid = half_window_grid(profile.max_half_window_s(), 4.0);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> u(m.dimension());
    for (double& v : u) v = unit(rng);
    const double dt = grid[rng() % grid.size()];
    const SklResult r =
        evaluate_candidate(profile, f.sec, m.Map(u).params, dt, 0, 1);
    EXPECT_LE(r.ell, best.skl.ell * (1 + 1e-9));
  }
}

TEST(Optimizer, ResultIsConsistent) {
  const Fixture f(30.0);
  const WindowProfile profile = f.Profile();
  const OptResult r = optimize_window(profile, f.sec, QuickSpace(), 3);
  const SklResult again =
      evaluate_candidate(profile, f.sec, r.params, r.half_window_s, 0, 1);
  EXPECT_EQ(again.ell, r.skl.ell);
  EXPECT_GT(r.evaluations, 0);
  EXPECT_LE(r.half_window_s, f.geom.max_half_window_s());
  EXPECT_EQ(r.per_pass_ell(), r.skl.ell);
}

TEST(Optimizer, SinglePassEqualsOneAggregatedPass) {
  const Fixture f(33.0);
  const OptSpace s = QuickSpace();
  const OptResult a = optimize_single_pass(f.geom, f.link, f.err, f.sec, s, 8);
  const OptResult b =
      optimize_multi_pass(1, f.geom, f.link, f.err, f.sec, s, 8);
  EXPECT_EQ(a.skl.ell, b.skl.ell);
  EXPECT_EQ(a.params, b.params);
}

TEST(Optimizer, MorePassesNeverHurtPerPassKey) {
  const Fixture f(40.0);
  OptSpace s = QuickSpace();
  const OptResult one =
      optimize_multi_pass(1, f.geom, f.link, f.err, f.sec, s, 2);
  const OptResult four =
      optimize_multi_pass(4, f.geom, f.link, f.err, f.sec, s, 2);
  EXPECT_GE(four.per_pass_ell(), one.per_pass_ell());
}

TEST(Optimizer, PinnedWindowIsUsed) {
  const Fixture f(27.0);
  OptSpace s = QuickSpace();
  s.pin_dt = 50.0;
  const OptResult r =
      optimize_single_pass(f.geom, f.link, f.err, f.sec, s, 1);
  EXPECT_EQ(r.half_window_s, 50.0);
}

TEST(Optimizer, TraceRecordsEveryEvaluation) {
  const Fixture f(27.0);
  OptSpace s = QuickSpace();
  s.pin_dt = 100.0;
  s.starts = 1;
  s.record_trace = true;
  const OptResult r =
      optimize_single_pass(f.geom, f.link, f.err, f.sec, s, 1);
  EXPECT_EQ(static_cast<std::int64_t>(r.trace.size()), r.evaluations);
  for (const TraceEntry& t : r.trace) EXPECT_EQ(t.half_window_s, 100.0);
}

TEST(Optimizer, HopelessLinkReportsLowestQberCandidate) {
  const Fixture f(80.0);
  OptSpace s = QuickSpace();
  s.pin_dt = 150.0;
  s.record_trace = true;
  const OptResult r =
      optimize_single_pass(f.geom, f.link, f.err, f.sec, s, 1);
  EXPECT_TRUE(r.zero_key);
  EXPECT_EQ(r.skl.ell, 0.0);
  double lowest = 1.0;
  for (const TraceEntry& t : r.trace) lowest = std::min(lowest, t.qber);
  EXPECT_DOUBLE_EQ(r.skl.qber, lowest);
}

TEST(Optimizer, EmptyPassGivesZeroKey) {
  const Fixture f(27.0, 5000.0);
  ASSERT_TRUE(f.geom.empty());
  const OptResult r = optimize_single_pass(f.geom, f.link, f.err, f.sec,
                                           QuickSpace(), 1);
  EXPECT_TRUE(r.zero_key);
  EXPECT_EQ(r.skl.ell, 0.0);
}

TEST(Optimizer, StandardVariantSearchesDisclosure) {
  const Fixture f(27.0);
  OptSpace s = QuickSpace();
  s.base.variant = ProtocolVariant::kStandardBB84;
  s.base.p_x = 0.5;
  s.pin_dt = 200.0;
  const OptResult r =
      optimize_single_pass(f.geom, f.link, f.err, f.sec, s, 1);
  EXPECT_GT(r.skl.ell, 0.0);
  EXPECT_GT(r.disclosed_fraction, 0.0);
  EXPECT_LT(r.disclosed_fraction, 1.0);
  EXPECT_EQ(r.params.p_x, 0.5);
}

TEST(ParallelFor, CoversAllIndicesAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(100, 8, [&](int i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](int i) {
                              if (i == 7) throw std::runtime_error("x");
                            }),
               std::runtime_error);
  parallel_for(0, 4, [](int) { FAIL(); });
}

TEST(ResolveThreads, ExplicitThenEnvironment) {
  EXPECT_EQ(resolve_threads(3), 3);
  setenv("SATKEY_THREADS", "5", 1);
  EXPECT_EQ(resolve_threads(std::nullopt), 5);
  unsetenv("SATKEY_THREADS");
  EXPECT_EQ(resolve_threads(std::nullopt), 1);
}

}  // namespace
}  // namespace satkey
