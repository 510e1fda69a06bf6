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

#ifndef SATKEY_OPTIMIZER_H_
#define SATKEY_OPTIMIZER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "satkey/counts.h"
#include "satkey/finite_key.h"
#include "satkey/link.h"
#include "satkey/orbit.h"

namespace satkey {

// Search space for the protocol parameters and the transmission half window.
// Values in `base` supply the variant, source rate, an optional separate
// receiver bias and the starting point. Pinned variables are held fixed.
struct OptSpace {
  ProtocolParams base;

  double p_x_min = 0.5;
  double p_x_max = 0.99;
  double mu1_min = 0.02;
  double mu1_max = 1.0;
  double mu2_min = 0.01;
  // Required gap mu1 - mu2.
  double mu_gap = 0.005;
  // Lower bound on each of p1, p2 and p3.
  double p_min = 0.01;
  // Disclosed fraction bounds for standard BB84.
  double f_pe_min = 0.01;
  double f_pe_max = 0.99;

  std::optional<double> pin_p_x;
  std::optional<double> pin_mu1;
  std::optional<double> pin_mu2;
  std::optional<double> pin_p1;
  std::optional<double> pin_p2;
  std::optional<double> pin_f_pe;
  // Fixed half window (s) instead of the grid search.
  std::optional<double> pin_dt;

  // Half-window grid spacing. The grid is anchored at the largest window.
  double dt_step_s = 1.0;
  // Coarsest spacing of the coarse-to-fine window search, in grid steps.
  int dt_coarse_steps = 16;

  int starts = 8;
  double rel_tol = 1e-4;
  int max_evaluations_per_start = 1500;
  bool record_trace = false;
  int threads = 1;

  void Validate() const;
};

// One evaluated candidate.
struct TraceEntry {
  ProtocolParams params;
  double half_window_s = 0;
  double disclosed_fraction = 0;
  double raw_length = 0;
  double ell = 0;
  double qber = 0;
};

struct OptResult {
  ProtocolParams params;
  double half_window_s = 0;
  // Standard BB84 only.
  double disclosed_fraction = 0;
  int passes = 1;
  // Key length of the aggregated block of `passes` passes.
  SklResult skl;
  std::int64_t evaluations = 0;
  // True when every candidate gave zero key; `params` is then the evaluated
  // candidate with the lowest QBER.
  bool zero_key = false;
  std::vector<TraceEntry> trace;

  double per_pass_ell() const { return skl.ell / passes; }
};

// Maps a point of the unit box onto feasible parameters.
class ParamMapping {
 public:
  explicit ParamMapping(const OptSpace& space);

  // Number of free variables.
  int dimension() const { return static_cast<int>(free_.size()); }

  struct Candidate {
    ProtocolParams params;
    double disclosed_fraction = 0;
  };
  Candidate Map(std::span<const double> u) const;
  // Approximate inverse, used for warm starts.
  std::vector<double> Unmap(const Candidate& c) const;

 private:
  enum Var { kPx, kMu1, kMu2, kP1, kP2, kFpe, kNumVars };
  OptSpace space_;
  std::vector<Var> free_;
  std::array<std::optional<double>, kNumVars> pins_;
};

// Evaluates the key length of one candidate on `passes` aggregated passes.
SklResult evaluate_candidate(const WindowProfile& profile,
                             const SecurityParams& sec,
                             const ProtocolParams& params,
                             double half_window_s, double disclosed_fraction,
                             int passes);

// Largest half window on the grid, and the grid itself in increasing order:
// dt_max - j * step for j >= 0, down to 0.
std::vector<double> half_window_grid(double dt_max, double step);

OptResult optimize_window(const WindowProfile& profile,
                          const SecurityParams& sec, const OptSpace& space,
                          std::uint64_t seed, int passes = 1);

OptResult optimize_single_pass(const OverpassGeometry& geom,
                               const LinkModel& link, const ErrorModel& err,
                               const SecurityParams& sec,
                               const OptSpace& space, std::uint64_t seed);

OptResult optimize_multi_pass(int passes, const OverpassGeometry& geom,
                              const LinkModel& link, const ErrorModel& err,
                              const SecurityParams& sec,
                              const OptSpace& space, std::uint64_t seed);

// Runs fn(0..count-1) on up to `threads` workers. Results are stored by index
// so the outcome does not depend on scheduling. The first exception thrown
// by any task is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// Worker count from an explicit request, else SATKEY_THREADS, else 1.
int resolve_threads(std::optional<int> requested);

}  // namespace satkey

#endif  // SATKEY_OPTIMIZER_H_
