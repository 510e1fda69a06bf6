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

#include "satkey/nelder_mead.h"

#include <cmath>

#include <gtest/gtest.h>

namespace satkey {
namespace {

TEST(NelderMead, QuadraticInterior) {
  auto f = [](std::span<const double> x) {
    return 10 + (x[0] - 0.3) * (x[0] - 0.3) + 2 * (x[1] - 0.7) * (x[1] - 0.7);
  };
  NelderMeadOptions opt;
  opt.rel_tol = 1e-12;
  const NelderMeadResult r = nelder_mead_unit_box(f, {0.9, 0.1}, opt);
  EXPECT_NEAR(r.x[0], 0.3, 1e-4);
  EXPECT_NEAR(r.x[1], 0.7, 1e-4);
  EXPECT_NEAR(r.value, 10.0, 1e-8);
  EXPECT_LE(r.evaluations, opt.max_evaluations * (opt.restarts + 1));
}

TEST(NelderMead, OptimumOnBoundary) {
  auto f = [](std::span<const double> x) {
    return (x[0] + 1) * (x[0] + 1) + (x[1] - 2) * (x[1] - 2);
  };
  NelderMeadOptions opt;
  opt.rel_tol = 1e-12;
  const NelderMeadResult r = nelder_mead_unit_box(f, {0.5, 0.5}, opt);
  EXPECT_NEAR(r.x[0], 0.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(NelderMead, NeverLeavesBox) {
  bool outside = false;
  auto f = [&](std::span<const double> x) {
    for (double v : x) outside |= (v < 0 || v > 1);
    return -x[0] - x[1] - x[2];
  };
  nelder_mead_unit_box(f, {0.0, 1.0, 0.5});
  EXPECT_FALSE(outside);
}

TEST(NelderMead, Rosenbrock) {
  auto f = [](std::span<const double> u) {
    const double x = 4 * u[0] - 2;
    const double y = 4 * u[1] - 2;
    return 1 + 100 * (y - x * x) * (y - x * x) + (1 - x) * (1 - x);
  };
  NelderMeadOptions opt;
  opt.rel_tol = 1e-14;
  opt.max_evaluations = 5000;
  opt.restarts = 3;
  const NelderMeadResult r = nelder_mead_unit_box(f, {0.2, 0.8}, opt);
  EXPECT_NEAR(r.x[0], 0.75, 1e-3);
  EXPECT_NEAR(r.x[1], 0.75, 1e-3);
}

TEST(NelderMead, EvaluationBudget) {
  int calls = 0;
  auto f = [&](std::span<const double> x) {
    ++calls;
    return std::sin(40 * x[0]) * std::cos(33 * x[1]);
  };
  NelderMeadOptions opt;
  opt.rel_tol = 0;
  opt.max_evaluations = 50;
  opt.restarts = 0;
  const NelderMeadResult r = nelder_mead_unit_box(f, {0.5, 0.5}, opt);
  EXPECT_EQ(r.evaluations, calls);
  EXPECT_LE(calls, 55);
}

TEST(NelderMead, ZeroDimensions) {
  const NelderMeadResult r =
      nelder_mead_unit_box([](std::span<const double>) { return 4.0; }, {});
  EXPECT_EQ(r.value, 4.0);
  EXPECT_TRUE(r.x.empty());
}

}  // namespace
}  // namespace satkey
