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

#ifndef SATKEY_NELDER_MEAD_H_
#define SATKEY_NELDER_MEAD_H_

#include <functional>
#include <span>
#include <vector>

namespace satkey {

struct NelderMeadOptions {
  // Stop when the spread of simplex values is below
  // rel_tol * max(|best|, abs_floor).
  double rel_tol = 1e-4;
  double abs_floor = 1.0;
  double initial_step = 0.15;
  int max_evaluations = 1500;
  // Restarts from the converged point with a fresh simplex.
  int restarts = 1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

// Minimizes f over the unit box [0, 1]^n. Trial points are clamped into
// the box, so f is never called outside it.
NelderMeadResult nelder_mead_unit_box(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace satkey

#endif  // SATKEY_NELDER_MEAD_H_
