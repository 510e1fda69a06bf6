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

#include "satkey/link.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace satkey {
namespace {

constexpr double kElevationSlackDeg = 1e-9;

}  // namespace

LinkModel::LinkModel() : orbit_() {}

LinkModel LinkModel::Parametric(const OrbitConfig& orbit, double zenith_db,
                                double airmass_db) {
  LinkModel m;
  m.kind_ = CurveKind::kParametric;
  m.orbit_ = orbit;
  m.zenith_db_ = zenith_db;
  m.airmass_db_ = airmass_db;
  m.Validate();
  return m;
}

LinkModel LinkModel::Tabulated(std::vector<std::pair<double, double>> nodes) {
  LinkModel m;
  m.kind_ = CurveKind::kTabulated;
  m.nodes_ = std::move(nodes);
  m.Validate();
  return m;
}

void LinkModel::Validate() const {
  if (!(p_ec >= 0 && p_ec < 1)) {
    throw std::invalid_argument("link.p_ec: must lie in [0, 1)");
  }
  if (!(p_ap >= 0 && p_ap < 1)) {
    throw std::invalid_argument("link.p_ap: must lie in [0, 1)");
  }
  if (!std::isfinite(offset_db_)) {
    throw std::invalid_argument("link.offset_db: must be finite");
  }
  if (kind_ == CurveKind::kParametric) {
    orbit_.Validate();
    if (!std::isfinite(zenith_db_)) {
      throw std::invalid_argument("link.zenith_db: must be finite");
    }
    if (!(airmass_db_ >= 0)) {
      throw std::invalid_argument("link.airmass_db: must be >= 0");
    }
    return;
  }
  if (nodes_.size() < 2) {
    throw std::invalid_argument("link.curve_file: need at least two nodes");
  }
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const auto [el, db] = nodes_[i];
    if (!std::isfinite(el) || !std::isfinite(db) || el < 0 || el > 90) {
      throw std::invalid_argument("link.curve_file: bad node at row " +
                                  std::to_string(i + 1));
    }
    if (i > 0 && !(el > nodes_[i - 1].first)) {
      throw std::invalid_argument(
          "link.curve_file: elevations must be strictly ascending");
    }
    if (i > 0 && db > nodes_[i - 1].second) {
      throw std::invalid_argument(
          "link.curve_file: loss must be non-increasing in elevation");
    }
  }
  if (std::abs(nodes_.back().first - 90.0) > kElevationSlackDeg) {
    throw std::invalid_argument("link.curve_file: table must reach 90 deg");
  }
}

double LinkModel::lowest_elevation_deg() const {
  return kind_ == CurveKind::kParametric ? 0.0 : nodes_.front().first;
}

double LinkModel::CurveDb(double elevation_deg) const {
  if (kind_ == CurveKind::kParametric) {
    const double s = std::sin(elevation_deg * kDegToRad);
    if (s <= 0) return std::numeric_limits<double>::infinity();
    const double range = range_at_elevation(orbit_, elevation_deg);
    return zenith_db_ + 20.0 * std::log10(range / orbit_.altitude_km) +
           airmass_db_ * (1.0 / s - 1.0);
  }
  auto hi = std::lower_bound(
      nodes_.begin(), nodes_.end(), elevation_deg,
      [](const std::pair<double, double>& n, double e) { return n.first < e; });
  if (hi == nodes_.end()) return nodes_.back().second;
  if (hi->first == elevation_deg || hi == nodes_.begin()) return hi->second;
  auto lo = hi - 1;
  const double w = (elevation_deg - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

double LinkModel::loss_db(double elevation_deg) const {
  if (!(elevation_deg >= lowest_elevation_deg() - kElevationSlackDeg &&
        elevation_deg <= 90.0 + kElevationSlackDeg)) {
    throw std::out_of_range("elevation " + std::to_string(elevation_deg) +
                            " deg outside link curve support");
  }
  const double el = std::clamp(elevation_deg, lowest_elevation_deg(), 90.0);
  return CurveDb(el) + offset_db_;
}

double LinkModel::transmittance(double elevation_deg) const {
  return db_to_transmittance(loss_db(elevation_deg));
}

LinkModel LinkModel::WithOffset(double extra_db) const {
  LinkModel m = *this;
  m.offset_db_ += extra_db;
  m.Validate();
  return m;
}

LinkModel LinkModel::WithSystemEfficiency(double eta_sys_db) const {
  LinkModel m = *this;
  m.offset_db_ = eta_sys_db - CurveDb(90.0);
  m.Validate();
  return m;
}

double receiver_scaling_db(double diameter_m) {
  if (!(diameter_m > 0)) {
    throw std::invalid_argument("link.receiver_diameter_m: must be > 0");
  }
  return 20.0 * std::log10(kReferenceReceiverDiameterM / diameter_m);
}

double db_to_transmittance(double loss_db) {
  return std::pow(10.0, -loss_db / 10.0);
}

std::vector<std::pair<double, double>> read_curve_csv(std::istream& is) {
  std::vector<std::pair<double, double>> nodes;
  std::string line;
  bool header = true;
  size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("elevation_deg", 0) == 0) continue;
    }
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw std::invalid_argument("curve csv: malformed row " +
                                  std::to_string(row));
    }
    try {
      nodes.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      throw std::invalid_argument("curve csv: malformed row " +
                                  std::to_string(row));
    }
  }
  return nodes;
}

std::vector<std::pair<double, double>> read_curve_csv_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("link.curve_file: cannot open " + path);
  return read_curve_csv(in);
}

}  // namespace satkey
