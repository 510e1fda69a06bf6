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

#ifndef SATKEY_CONFIG_H_
#define SATKEY_CONFIG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "satkey/campaign.h"
#include "satkey/counts.h"
#include "satkey/finite_key.h"
#include "satkey/link.h"
#include "satkey/optimizer.h"
#include "satkey/orbit.h"

namespace satkey {

// Raised for configuration problems. `key()` is the dotted config key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, std::string message)
      : std::invalid_argument(key + ": " + message),
        key_(std::move(key)),
        message_(std::move(message)) {}
  const std::string& key() const { return key_; }
  const std::string& message() const { return message_; }

 private:
  std::string key_;
  std::string message_;
};

struct LinkConfig {
  // Zenith loss of the link including all offsets except `offset_db` and
  // the receiver scaling. Unset keeps a tabulated curve as read.
  std::optional<double> eta_link_sys_db = 27.0;
  double offset_db = 0.0;
  double receiver_diameter_m = kReferenceReceiverDiameterM;
  double p_ec = 5e-7;
  double p_ap = 1e-3;
  // Optional CSV (elevation_deg, loss_db); the parametric curve otherwise.
  std::string curve_file;
  double airmass_db = LinkModel::kDefaultAirmassDb;

  LinkModel Build(const OrbitConfig& orbit) const;
};

struct CampaignConfig {
  double d_min_km = 0.0;
  // Fixed half window for `pass`; the whole visible pass when unset.
  std::optional<double> half_window_s;
  double dmin_step_km = 50.0;
  double edge_tolerance_km = 1.0;
  double latitude_deg = 55.9;
  std::vector<int> passes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> eta_grid_db = {27, 30, 33, 37, 40};
  std::vector<double> p_ec_grid;
  std::vector<double> qber_grid;
  std::vector<double> source_rate_grid_hz;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "satkey-out";
  std::optional<int> threads;
  OrbitConfig orbit;
  LinkConfig link;
  ErrorModel error;
  ProtocolParams protocol;
  SecurityParams security;
  // Search settings; `optimizer.base` is replaced by `protocol`.
  OptSpace optimizer;
  CampaignConfig campaign;

  // Checks every section. Throws ConfigError.
  void Validate() const;
  // Builds the model objects. `threads` is the resolved worker count.
  SystemConfig System(int threads = 1) const;
  // Canonical TOML rendering; parse_config(ToToml()) reproduces the config.
  std::string ToToml() const;
  // FNV-1a 64 hash of the canonical rendering, as 16 hex digits. The output
  // directory and thread count do not change results and are left out.
  std::string Hash() const;
};

// Parses TOML text. Missing keys take the defaults above; unknown keys are
// rejected. `overrides` are "section.key=value" strings applied on top, with
// values in TOML syntax (bare words are taken as strings).
RunConfig parse_config(std::string_view toml_text,
                       const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

}  // namespace satkey

#endif  // SATKEY_CONFIG_H_
