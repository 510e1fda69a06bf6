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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace satkey {
namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

void ClampToBox(std::vector<double>& x) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace

NelderMeadResult nelder_mead_unit_box(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> x0, const NelderMeadOptions& options) {
  const size_t n = x0.size();
  NelderMeadResult result;
  ClampToBox(x0);
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return f(x);
  };
  if (n == 0) {
    result.x = x0;
    result.value = eval(x0);
    return result;
  }

  Vertex best{x0, eval(x0)};
  double step = options.initial_step;
  for (int round = 0; round <= options.restarts; ++round) {
    std::vector<Vertex> simplex;
    simplex.push_back(best);
    for (size_t i = 0; i < n; ++i) {
      std::vector<double> x = best.x;
      // Step away from the nearer face so the vertex stays distinct.
      x[i] += x[i] + step <= 1.0 ? step : -step;
      ClampToBox(x);
      simplex.push_back({x, eval(x)});
    }

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::vector<double> centroid(n), trial(n);
    auto along = [&](double scale) {
      for (size_t i = 0; i < n; ++i) {
        trial[i] = centroid[i] + scale * (simplex[n].x[i] - centroid[i]);
      }
      ClampToBox(trial);
      return trial;
    };

    while (result.evaluations < options.max_evaluations) {
      std::stable_sort(simplex.begin(), simplex.end(), by_value);
      const double spread = simplex[n].f - simplex[0].f;
      const double scale = std::max(std::abs(simplex[0].f), options.abs_floor);
      double diameter = 0.0;
      for (size_t j = 1; j <= n; ++j) {
        for (size_t i = 0; i < n; ++i) {
          diameter = std::max(diameter,
                              std::abs(simplex[j].x[i] - simplex[0].x[i]));
        }
      }
      if (spread <= options.rel_tol * scale || diameter < 1e-10) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i) centroid[i] += simplex[j].x[i] / n;
      }

      Vertex reflected{along(-1.0), 0.0};
      reflected.f = eval(reflected.x);
      if (reflected.f < simplex[0].f) {
        Vertex expanded{along(-2.0), 0.0};
        expanded.f = eval(expanded.x);
        simplex[n] = expanded.f < reflected.f ? expanded : reflected;
        continue;
      }
      if (reflected.f < simplex[n - 1].f) {
        simplex[n] = reflected;
        continue;
      }
      const bool outside = reflected.f < simplex[n].f;
      Vertex contracted{along(outside ? -0.5 : 0.5), 0.0};
      contracted.f = eval(contracted.x);
      if (contracted.f < std::min(reflected.f, simplex[n].f)) {
        simplex[n] = contracted;
        continue;
      }
      // Shrink toward the best vertex.
      for (size_t j = 1; j <= n; ++j) {
        for (size_t i = 0; i < n; ++i) {
          simplex[j].x[i] =
              simplex[0].x[i] + 0.5 * (simplex[j].x[i] - simplex[0].x[i]);
        }
        simplex[j].f = eval(simplex[j].x);
      }
    }
    const auto it = std::min_element(simplex.begin(), simplex.end(),
                                     [](const Vertex& a, const Vertex& b) {
                                       return a.f < b.f;
                                     });
    if (it->f < best.f) best = *it;
    step *= 0.5;
    if (result.evaluations >= options.max_evaluations) break;
  }
  result.x = best.x;
  result.value = best.f;
  return result;
}

}  // namespace satkey
