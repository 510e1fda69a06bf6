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

#include "satkey/json_io.h"

#include <fstream>
#include <stdexcept>

namespace satkey {
namespace {

nlohmann::json Array(const PerIntensity& a) {
  return nlohmann::json::array({a[0], a[1], a[2]});
}

PerIntensity ReadArray(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != kNumIntensities) {
    throw std::invalid_argument(std::string("tallies.") + key +
                                ": expected 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

void to_json(nlohmann::json& j, const ProtocolParams& p) {
  j = {{"variant", std::string(VariantName(p.variant))},
       {"mu", Array(p.mu)},
       {"probs", Array(p.probs)},
       {"p_x", p.p_x},
       {"p_x_receiver", p.receiver_p_x()},
       {"source_rate_hz", p.source_rate_hz}};
}

void from_json(const nlohmann::json& j, ProtocolParams& p) {
  p.variant = ParseVariant(j.at("variant").get<std::string>());
  p.mu = ReadArray(j, "mu");
  p.probs = ReadArray(j, "probs");
  p.p_x = j.at("p_x").get<double>();
  p.p_x_receiver.reset();
  if (j.contains("p_x_receiver")) {
    const double r = j.at("p_x_receiver").get<double>();
    if (r != p.p_x) p.p_x_receiver = r;
  }
  p.source_rate_hz = j.at("source_rate_hz").get<double>();
}

void to_json(nlohmann::json& j, const BlockTallies& t) {
  j = {{"params", t.params},
       {"sent", Array(t.sent)},
       {"n_x", Array(t.n_x)},
       {"n_z", Array(t.n_z)},
       {"m_x", Array(t.m_x)},
       {"m_z", Array(t.m_z)}};
}

void from_json(const nlohmann::json& j, BlockTallies& t) {
  t.params = j.at("params").get<ProtocolParams>();
  t.params.Validate();
  t.sent = ReadArray(j, "sent");
  t.n_x = ReadArray(j, "n_x");
  t.n_z = ReadArray(j, "n_z");
  t.m_x = ReadArray(j, "m_x");
  t.m_z = ReadArray(j, "m_z");
  for (int k = 0; k < kNumIntensities; ++k) {
    if (!(0 <= t.m_x[k] && t.m_x[k] <= t.n_x[k] && t.n_x[k] <= t.sent[k] &&
          0 <= t.m_z[k] && t.m_z[k] <= t.n_z[k] && t.n_z[k] <= t.sent[k])) {
      throw std::invalid_argument(
          "tallies: counts must satisfy 0 <= m <= n <= sent");
    }
  }
}

void to_json(nlohmann::json& j, const CorrectedTallies& c) {
  j = {{"n_x_plus", Array(c.n_x_plus)},   {"n_x_minus", Array(c.n_x_minus)},
       {"n_z_plus", Array(c.n_z_plus)},   {"n_z_minus", Array(c.n_z_minus)},
       {"m_x_plus", Array(c.m_x_plus)},   {"m_x_minus", Array(c.m_x_minus)},
       {"m_z_plus", Array(c.m_z_plus)},   {"m_z_minus", Array(c.m_z_minus)}};
}

void to_json(nlohmann::json& j, const SklResult& r) {
  j = {{"ell", r.ell},
       {"raw_length", r.raw_length},
       {"s_x0", r.s_x0},
       {"s_x1", r.s_x1},
       {"s_z1", r.s_z1},
       {"v_z1", r.v_z1},
       {"phi_x", r.phi_x},
       {"lambda_ec", r.lambda_ec},
       {"qber", r.qber},
       {"n_x_total", r.n_x_total},
       {"overhead_bits", r.overhead_bits},
       {"corrected", r.corrected}};
  if (r.per_basis_ell) {
    j["per_basis_ell"] = {(*r.per_basis_ell)[0], (*r.per_basis_ell)[1]};
  }
  if (r.disclosed_fraction) j["disclosed_fraction"] = *r.disclosed_fraction;
}

void to_json(nlohmann::json& j, const OptResult& r) {
  j = {{"params", r.params},
       {"half_window_s", r.half_window_s},
       {"passes", r.passes},
       {"ell", r.skl.ell},
       {"ell_per_pass", r.per_pass_ell()},
       {"zero_key", r.zero_key},
       {"evaluations", r.evaluations},
       {"skl", r.skl}};
  if (r.params.variant == ProtocolVariant::kStandardBB84) {
    j["disclosed_fraction"] = r.disclosed_fraction;
  }
}

void to_json(nlohmann::json& j, const FootprintCurve& c) {
  nlohmann::json samples = nlohmann::json::array();
  for (const FootprintSample& s : c.samples) {
    samples.push_back({{"d_min_km", s.d_min_km},
                       {"theta_max_deg", s.theta_max_deg},
                       {"ell", s.ell},
                       {"half_window_s", s.half_window_s},
                       {"params", s.params}});
  }
  j = {{"d_min_plus_km", c.d_min_plus_km},
       {"theta_max_minus_deg", c.theta_max_minus_deg},
       {"samples", samples}};
}

void to_json(nlohmann::json& j, const AnnualEstimate& a) {
  j = {{"skl_int_bit_m", a.skl_int_bit_m},
       {"n_orbits_year", a.n_orbits_year},
       {"l_lat_m", a.l_lat_m},
       {"skl_year_bits", a.skl_year_bits}};
}

BlockTallies read_tallies_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("tallies: cannot read '" + path + "'");
  try {
    return nlohmann::json::parse(in).get<BlockTallies>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("tallies: " + std::string(e.what()));
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace satkey
