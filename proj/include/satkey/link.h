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

#ifndef SATKEY_LINK_H_
#define SATKEY_LINK_H_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "satkey/orbit.h"

namespace satkey {

// Reference ground receiver aperture for the baseline link.
inline constexpr double kReferenceReceiverDiameterM = 1.2;

// Elevation-dependent link loss in dB plus a constant system offset.
//
// Two curve shapes are supported. The parametric curve models diffraction
// range fall-off and air-mass attenuation,
//
//   loss(theta) = zenith_db + 20 log10(R(theta) / h) + A (1 / sin(theta) - 1),
//
// and a tabulated curve is interpolated linearly between its nodes.
class LinkModel {
 public:
  enum class CurveKind { kParametric, kTabulated };

  static constexpr double kDefaultZenithDb = 27.0;
  static constexpr double kDefaultAirmassDb = 1.0;

  LinkModel();

  static LinkModel Parametric(const OrbitConfig& orbit,
                              double zenith_db = kDefaultZenithDb,
                              double airmass_db = kDefaultAirmassDb);

  // Nodes are (elevation_deg, loss_db), strictly ascending in elevation and
  // non-increasing in loss. The table must reach 90 degrees.
  static LinkModel Tabulated(std::vector<std::pair<double, double>> nodes);

  // Link loss including the system offset. Throws std::out_of_range for
  // elevations outside [lowest supported elevation, 90].
  double loss_db(double elevation_deg) const;

  // Single photon detection probability 10^(-loss/10).
  double transmittance(double elevation_deg) const;

  // Zenith loss including offset.
  double eta_link_sys_db() const { return loss_db(90.0); }

  // Returns a copy with `extra_db` added to the system offset.
  LinkModel WithOffset(double extra_db) const;
  // Returns a copy whose offset is chosen so that the zenith loss equals
  // `eta_sys_db`.
  LinkModel WithSystemEfficiency(double eta_sys_db) const;

  CurveKind curve_kind() const { return kind_; }
  double system_offset_db() const { return offset_db_; }
  double lowest_elevation_deg() const;
  const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }

  // Extraneous (dark plus background) count probability per pulse, and
  // afterpulse probability.
  double p_ec = 5e-7;
  double p_ap = 1e-3;

  void Validate() const;

 private:
  double CurveDb(double elevation_deg) const;

  CurveKind kind_ = CurveKind::kParametric;
  double offset_db_ = 0.0;
  // Parametric shape.
  OrbitConfig orbit_;
  double zenith_db_ = kDefaultZenithDb;
  double airmass_db_ = kDefaultAirmassDb;
  // Tabulated shape.
  std::vector<std::pair<double, double>> nodes_;
};

// dB added to the system loss when the receiver aperture shrinks from the
// reference diameter to `diameter_m`.
double receiver_scaling_db(double diameter_m);

double db_to_transmittance(double loss_db);

// Reads a curve CSV with header elevation_deg,loss_db.
std::vector<std::pair<double, double>> read_curve_csv(std::istream& is);
std::vector<std::pair<double, double>> read_curve_csv_file(
    const std::string& path);

}  // namespace satkey

#endif  // SATKEY_LINK_H_
