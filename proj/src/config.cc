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

#include "satkey/config.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace satkey {
namespace {

// Typed access to one TOML table that remembers which keys were read, so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const toml::table* table, std::string prefix)
      : table_(table), prefix_(std::move(prefix)) {}

  std::string Key(std::string_view name) const {
    return prefix_.empty() ? std::string(name)
                           : prefix_ + "." + std::string(name);
  }

  const toml::node* Find(std::string_view name) {
    known_.insert(std::string(name));
    return table_ ? table_->get(name) : nullptr;
  }

  void Read(std::string_view name, double& out) {
    if (const toml::node* n = Find(name)) out = AsDouble(*n, Key(name));
  }
  void Read(std::string_view name, std::optional<double>& out) {
    if (const toml::node* n = Find(name)) out = AsDouble(*n, Key(name));
  }
  void Read(std::string_view name, int& out) {
    if (const toml::node* n = Find(name)) out = AsInt(*n, Key(name));
  }
  void Read(std::string_view name, std::optional<int>& out) {
    if (const toml::node* n = Find(name)) out = AsInt(*n, Key(name));
  }
  void Read(std::string_view name, bool& out) {
    if (const toml::node* n = Find(name)) {
      if (!n->is_boolean()) throw ConfigError(Key(name), "must be a boolean");
      out = n->as_boolean()->get();
    }
  }
  void Read(std::string_view name, std::string& out) {
    if (const toml::node* n = Find(name)) {
      if (!n->is_string()) throw ConfigError(Key(name), "must be a string");
      out = n->as_string()->get();
    }
  }
  void Read(std::string_view name, std::vector<double>& out) {
    if (const toml::node* n = Find(name)) {
      out.clear();
      for (const toml::node& e : ArrayOf(*n, Key(name))) {
        out.push_back(AsDouble(e, Key(name)));
      }
    }
  }
  void Read(std::string_view name, std::vector<int>& out) {
    if (const toml::node* n = Find(name)) {
      out.clear();
      for (const toml::node& e : ArrayOf(*n, Key(name))) {
        out.push_back(AsInt(e, Key(name)));
      }
    }
  }

  Section Sub(std::string_view name) {
    const toml::node* n = Find(name);
    if (n && !n->is_table()) throw ConfigError(Key(name), "must be a table");
    return Section(n ? n->as_table() : nullptr, Key(name));
  }

  void RejectUnknown() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      if (!known_.count(std::string(k.str()))) {
        throw ConfigError(Key(k.str()), "unknown key");
      }
    }
  }

 private:
  static double AsDouble(const toml::node& n, const std::string& key) {
    if (n.is_floating_point()) return n.as_floating_point()->get();
    if (n.is_integer()) return static_cast<double>(n.as_integer()->get());
    throw ConfigError(key, "must be a number");
  }
  static int AsInt(const toml::node& n, const std::string& key) {
    if (!n.is_integer()) throw ConfigError(key, "must be an integer");
    return static_cast<int>(n.as_integer()->get());
  }
  static const toml::array& ArrayOf(const toml::node& n,
                                    const std::string& key) {
    if (!n.is_array()) throw ConfigError(key, "must be an array");
    return *n.as_array();
  }

  const toml::table* table_;
  std::string prefix_;
  std::set<std::string> known_;
};

void ApplyOverride(toml::table& root, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must look like section.key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError(key, "malformed key");
    parts.push_back(p);
  }
  toml::table* table = &root;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* n = table->get(parts[i]);
    if (!n) {
      table->insert(parts[i], toml::table{});
      n = table->get(parts[i]);
    }
    if (!n->is_table()) throw ConfigError(key, "is not a table");
    table = n->as_table();
  }

  try {
    toml::table parsed = toml::parse("v = " + text);
    table->insert_or_assign(parts.back(), std::move(*parsed.get("v")));
  } catch (const toml::parse_error&) {
    table->insert_or_assign(parts.back(), text);
  }
  // The pass offset has two spellings; an override of one replaces the other.
  if (key == "campaign.d_min_km") table->erase("theta_max_deg");
  if (key == "campaign.theta_max_deg") table->erase("d_min_km");
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string FormatList(const std::vector<double>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += FormatDouble(v[i]);
  }
  return s + "]";
}

std::string FormatList(const std::vector<int>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Re-raises module validation errors ("section.key: message") as
// ConfigError.
template <typename Fn>
void Check(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const size_t colon = what.find(": ");
    if (colon == std::string::npos) throw ConfigError("config", what);
    throw ConfigError(what.substr(0, colon), what.substr(colon + 2));
  }
}

}  // namespace

LinkModel LinkConfig::Build(const OrbitConfig& orbit) const {
  LinkModel m;
  Check([&] {
    if (curve_file.empty()) {
      m = LinkModel::Parametric(orbit, LinkModel::kDefaultZenithDb,
                                airmass_db);
    } else {
      try {
        m = LinkModel::Tabulated(read_curve_csv_file(curve_file));
      } catch (const std::exception& e) {
        throw ConfigError("link.curve_file", e.what());
      }
    }
    if (eta_link_sys_db) m = m.WithSystemEfficiency(*eta_link_sys_db);
    m = m.WithOffset(offset_db + receiver_scaling_db(receiver_diameter_m));
    m.p_ec = p_ec;
    m.p_ap = p_ap;
    m.Validate();
  });
  return m;
}

void RunConfig::Validate() const {
  if (threads && *threads < 1) throw ConfigError("threads", "must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  Check([&] { orbit.Validate(); });
  Check([&] { error.Validate(); });
  Check([&] { protocol.Validate(); });
  Check([&] { security.Validate(); });
  Check([&] {
    OptSpace s = optimizer;
    s.base = protocol;
    s.Validate();
  });
  link.Build(orbit);
  const CampaignConfig& c = campaign;
  if (!(c.d_min_km >= 0)) throw ConfigError("campaign.d_min_km", "must be >= 0");
  if (c.half_window_s && !(*c.half_window_s >= 0)) {
    throw ConfigError("campaign.half_window_s", "must be >= 0");
  }
  if (!(c.dmin_step_km > 0)) {
    throw ConfigError("campaign.dmin_step_km", "must be > 0");
  }
  if (!(c.edge_tolerance_km > 0)) {
    throw ConfigError("campaign.edge_tolerance_km", "must be > 0");
  }
  if (!(std::abs(c.latitude_deg) <= 80)) {
    throw ConfigError("campaign.latitude_deg", "|latitude| must be <= 80 deg");
  }
  for (int m : c.passes) {
    if (m < 1) throw ConfigError("campaign.passes", "entries must be >= 1");
  }
  for (double p : c.p_ec_grid) {
    if (!(p >= 0 && p < 1)) {
      throw ConfigError("campaign.p_ec_grid", "entries must lie in [0, 1)");
    }
  }
  for (double q : c.qber_grid) {
    if (!(q >= 0 && q < 0.5)) {
      throw ConfigError("campaign.qber_grid", "entries must lie in [0, 0.5)");
    }
  }
  for (double f : c.source_rate_grid_hz) {
    if (!(f > 0)) {
      throw ConfigError("campaign.source_rate_grid_hz", "entries must be > 0");
    }
  }
}

SystemConfig RunConfig::System(int worker_threads) const {
  Validate();
  SystemConfig s;
  s.orbit = orbit;
  s.link = link.Build(orbit);
  s.error = error;
  s.security = security;
  s.space = optimizer;
  s.space.base = protocol;
  s.space.threads = worker_threads;
  return s;
}

std::string RunConfig::ToToml() const {
  std::ostringstream os;
  auto num = [&](const char* k, double v) {
    os << k << " = " << FormatDouble(v) << '\n';
  };
  auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) num(k, *v);
  };
  os << "seed = " << seed << '\n';
  os << "output_dir = " << Quote(output_dir) << '\n';
  if (threads) os << "threads = " << *threads << '\n';

  os << "\n[orbit]\n";
  num("altitude_km", orbit.altitude_km);
  num("earth_radius_km", orbit.earth_radius_km);
  num("gm_km3_s2", orbit.gm_km3_s2);
  num("min_elevation_deg", orbit.min_elevation_deg);
  num("time_step_s", orbit.time_step_s);

  os << "\n[link]\n";
  opt("eta_link_sys_db", link.eta_link_sys_db);
  num("offset_db", link.offset_db);
  num("receiver_diameter_m", link.receiver_diameter_m);
  num("p_ec", link.p_ec);
  num("p_ap", link.p_ap);
  os << "curve_file = " << Quote(link.curve_file) << '\n';
  num("airmass_db", link.airmass_db);

  os << "\n[error]\n";
  num("qber_intrinsic", error.qber_intrinsic);
  os << "afterpulse_errors = " << (error.afterpulse_errors ? "true" : "false")
     << '\n';

  os << "\n[protocol]\n";
  os << "variant = " << Quote(std::string(VariantName(protocol.variant)))
     << '\n';
  os << "mu = "
     << FormatList(std::vector<double>(protocol.mu.begin(), protocol.mu.end())) << '\n';
  os << "probs = "
     << FormatList(std::vector<double>(protocol.probs.begin(), protocol.probs.end())) << '\n';
  num("p_x", protocol.p_x);
  opt("p_x_receiver", protocol.p_x_receiver);
  num("source_rate_hz", protocol.source_rate_hz);

  os << "\n[security]\n";
  num("eps_c", security.eps_c);
  num("eps_s", security.eps_s);
  os << "n_chernoff_terms = " << security.n_chernoff_terms << '\n';

  const OptSpace& o = optimizer;
  os << "\n[optimizer]\n";
  os << "starts = " << o.starts << '\n';
  num("rel_tol", o.rel_tol);
  os << "max_evaluations_per_start = " << o.max_evaluations_per_start << '\n';
  num("dt_step_s", o.dt_step_s);
  os << "dt_coarse_steps = " << o.dt_coarse_steps << '\n';
  os << "record_trace = " << (o.record_trace ? "true" : "false") << '\n';
  num("p_x_min", o.p_x_min);
  num("p_x_max", o.p_x_max);
  num("mu1_min", o.mu1_min);
  num("mu1_max", o.mu1_max);
  num("mu2_min", o.mu2_min);
  num("mu_gap", o.mu_gap);
  num("p_min", o.p_min);
  num("f_pe_min", o.f_pe_min);
  num("f_pe_max", o.f_pe_max);

  os << "\n[optimizer.pins]\n";
  opt("p_x", o.pin_p_x);
  opt("mu1", o.pin_mu1);
  opt("mu2", o.pin_mu2);
  opt("p1", o.pin_p1);
  opt("p2", o.pin_p2);
  opt("f_pe", o.pin_f_pe);
  opt("dt", o.pin_dt);

  const CampaignConfig& c = campaign;
  os << "\n[campaign]\n";
  num("d_min_km", c.d_min_km);
  opt("half_window_s", c.half_window_s);
  num("dmin_step_km", c.dmin_step_km);
  num("edge_tolerance_km", c.edge_tolerance_km);
  num("latitude_deg", c.latitude_deg);
  os << "passes = " << FormatList(c.passes) << '\n';
  os << "eta_grid_db = " << FormatList(c.eta_grid_db) << '\n';
  os << "p_ec_grid = " << FormatList(c.p_ec_grid) << '\n';
  os << "qber_grid = " << FormatList(c.qber_grid) << '\n';
  os << "source_rate_grid_hz = " << FormatList(c.source_rate_grid_hz) << '\n';
  return os.str();
}

std::string RunConfig::Hash() const {
  RunConfig canonical = *this;
  canonical.output_dir = RunConfig().output_dir;
  canonical.threads.reset();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.ToToml()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(std::string_view toml_text,
                       const std::vector<std::string>& overrides) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    throw ConfigError("config", msg.str());
  }
  for (const std::string& o : overrides) ApplyOverride(root, o);

  RunConfig cfg;
  Section top(&root, "");
  if (const toml::node* n = top.Find("seed")) {
    if (!n->is_integer() || n->as_integer()->get() < 0) {
      throw ConfigError("seed", "must be a non-negative integer");
    }
    cfg.seed = static_cast<std::uint64_t>(n->as_integer()->get());
  }
  top.Read("output_dir", cfg.output_dir);
  top.Read("threads", cfg.threads);

  Section orbit = top.Sub("orbit");
  orbit.Read("altitude_km", cfg.orbit.altitude_km);
  orbit.Read("earth_radius_km", cfg.orbit.earth_radius_km);
  orbit.Read("gm_km3_s2", cfg.orbit.gm_km3_s2);
  orbit.Read("min_elevation_deg", cfg.orbit.min_elevation_deg);
  orbit.Read("time_step_s", cfg.orbit.time_step_s);
  orbit.RejectUnknown();

  Section link = top.Sub("link");
  link.Read("curve_file", cfg.link.curve_file);
  if (!cfg.link.curve_file.empty()) cfg.link.eta_link_sys_db.reset();
  link.Read("eta_link_sys_db", cfg.link.eta_link_sys_db);
  link.Read("offset_db", cfg.link.offset_db);
  link.Read("receiver_diameter_m", cfg.link.receiver_diameter_m);
  link.Read("p_ec", cfg.link.p_ec);
  link.Read("p_ap", cfg.link.p_ap);
  link.Read("airmass_db", cfg.link.airmass_db);
  link.RejectUnknown();

  Section error = top.Sub("error");
  error.Read("qber_intrinsic", cfg.error.qber_intrinsic);
  error.Read("afterpulse_errors", cfg.error.afterpulse_errors);
  error.RejectUnknown();

  Section protocol = top.Sub("protocol");
  std::string variant(VariantName(cfg.protocol.variant));
  protocol.Read("variant", variant);
  Check([&] { cfg.protocol.variant = ParseVariant(variant); });
  std::vector<double> mu(cfg.protocol.mu.begin(), cfg.protocol.mu.end());
  std::vector<double> probs(cfg.protocol.probs.begin(),
                            cfg.protocol.probs.end());
  protocol.Read("mu", mu);
  protocol.Read("probs", probs);
  if (mu.size() != 3) throw ConfigError("protocol.mu", "must have 3 entries");
  if (probs.size() != 3) {
    throw ConfigError("protocol.probs", "must have 3 entries");
  }
  std::copy(mu.begin(), mu.end(), cfg.protocol.mu.begin());
  std::copy(probs.begin(), probs.end(), cfg.protocol.probs.begin());
  if (cfg.protocol.variant == ProtocolVariant::kStandardBB84) {
    cfg.protocol.p_x = 0.5;
  }
  protocol.Read("p_x", cfg.protocol.p_x);
  protocol.Read("p_x_receiver", cfg.protocol.p_x_receiver);
  protocol.Read("source_rate_hz", cfg.protocol.source_rate_hz);
  protocol.RejectUnknown();

  Section security = top.Sub("security");
  security.Read("eps_c", cfg.security.eps_c);
  security.Read("eps_s", cfg.security.eps_s);
  security.Read("n_chernoff_terms", cfg.security.n_chernoff_terms);
  security.RejectUnknown();

  OptSpace& o = cfg.optimizer;
  Section opt = top.Sub("optimizer");
  opt.Read("starts", o.starts);
  opt.Read("rel_tol", o.rel_tol);
  opt.Read("max_evaluations_per_start", o.max_evaluations_per_start);
  opt.Read("dt_step_s", o.dt_step_s);
  opt.Read("dt_coarse_steps", o.dt_coarse_steps);
  opt.Read("record_trace", o.record_trace);
  opt.Read("p_x_min", o.p_x_min);
  opt.Read("p_x_max", o.p_x_max);
  opt.Read("mu1_min", o.mu1_min);
  opt.Read("mu1_max", o.mu1_max);
  opt.Read("mu2_min", o.mu2_min);
  opt.Read("mu_gap", o.mu_gap);
  opt.Read("p_min", o.p_min);
  opt.Read("f_pe_min", o.f_pe_min);
  opt.Read("f_pe_max", o.f_pe_max);
  Section pins = opt.Sub("pins");
  pins.Read("p_x", o.pin_p_x);
  pins.Read("mu1", o.pin_mu1);
  pins.Read("mu2", o.pin_mu2);
  pins.Read("p1", o.pin_p1);
  pins.Read("p2", o.pin_p2);
  pins.Read("f_pe", o.pin_f_pe);
  pins.Read("dt", o.pin_dt);
  pins.RejectUnknown();
  opt.RejectUnknown();

  CampaignConfig& c = cfg.campaign;
  Section camp = top.Sub("campaign");
  std::optional<double> d_min;
  std::optional<double> theta_max;
  camp.Read("d_min_km", d_min);
  camp.Read("theta_max_deg", theta_max);
  if (d_min && theta_max) {
    throw ConfigError("campaign.theta_max_deg",
                      "give either d_min_km or theta_max_deg, not both");
  }
  if (d_min) c.d_min_km = *d_min;
  if (theta_max) {
    if (!(*theta_max > 0 && *theta_max <= 90)) {
      throw ConfigError("campaign.theta_max_deg", "must lie in (0, 90]");
    }
    c.d_min_km = dmin_from_theta_max(cfg.orbit, *theta_max);
  }
  camp.Read("half_window_s", c.half_window_s);
  camp.Read("dmin_step_km", c.dmin_step_km);
  camp.Read("edge_tolerance_km", c.edge_tolerance_km);
  camp.Read("latitude_deg", c.latitude_deg);
  camp.Read("passes", c.passes);
  camp.Read("eta_grid_db", c.eta_grid_db);
  camp.Read("p_ec_grid", c.p_ec_grid);
  camp.Read("qber_grid", c.qber_grid);
  camp.Read("source_rate_grid_hz", c.source_rate_grid_hz);
  camp.RejectUnknown();

  top.RejectUnknown();
  cfg.Validate();
  return cfg;
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<std::string> all = overrides;
  // A relative curve file is resolved against the config's directory.
  toml::table probe;
  try {
    probe = toml::parse(buf.str());
  } catch (const toml::parse_error&) {
    return parse_config(buf.str(), overrides);
  }
  if (auto f = probe["link"]["curve_file"].value<std::string>();
      f && !f->empty() && std::filesystem::path(*f).is_relative()) {
    const auto dir = std::filesystem::path(path).parent_path();
    all.insert(all.begin(),
               "link.curve_file=" + Quote((dir / *f).lexically_normal().string()));
  }
  return parse_config(buf.str(), all);
}

}  // namespace satkey
