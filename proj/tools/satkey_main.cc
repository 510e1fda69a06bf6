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

// Command-line front end: satkey <subcommand> [options].

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "satkey/campaign.h"
#include "satkey/config.h"
#include "satkey/json_io.h"

namespace {

using nlohmann::json;
using satkey::RunConfig;

constexpr char kVersion[] = "0.1.0";

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
  std::vector<std::string> sets;
  std::vector<std::string> tallies;
  bool trace = false;

  std::optional<double> eta_sys_db, eta_offset_db, p_ec, p_ap, qber_i,
      source_rate_hz, dmin_km, theta_max_deg, dt, latitude_deg, receiver_diameter_m;
  std::optional<std::string> variant;
  std::vector<int> passes;
};

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Turns the dedicated flags into config overrides so that a flag and the
// equivalent config key give identical runs.
std::vector<std::string> Overrides(const Options& o,
                                   const std::string& command) {
  std::vector<std::string> out;
  auto add = [&](const char* key, const std::optional<double>& v) {
    if (v) out.push_back(std::string(key) + "=" + Num(*v));
  };
  add("link.eta_link_sys_db", o.eta_sys_db);
  add("link.offset_db", o.eta_offset_db);
  add("link.p_ec", o.p_ec);
  add("link.p_ap", o.p_ap);
  add("link.receiver_diameter_m", o.receiver_diameter_m);
  add("error.qber_intrinsic", o.qber_i);
  add("protocol.source_rate_hz", o.source_rate_hz);
  add("campaign.d_min_km", o.dmin_km);
  add("campaign.theta_max_deg", o.theta_max_deg);
  add("campaign.latitude_deg", o.latitude_deg);
  if (o.dt) {
    add(command == "pass" ? "campaign.half_window_s" : "optimizer.pins.dt",
        o.dt);
  }
  if (o.variant) {
    out.push_back("protocol.variant=\"" + *o.variant + "\"");
    if (satkey::ParseVariant(*o.variant) ==
        satkey::ProtocolVariant::kStandardBB84) {
      out.push_back("protocol.p_x=0.5");
    }
  }
  if (!o.passes.empty()) {
    std::string list = "campaign.passes=[";
    for (size_t i = 0; i < o.passes.size(); ++i) {
      list += (i ? "," : "") + std::to_string(o.passes[i]);
    }
    out.push_back(list + "]");
  }
  if (o.trace) out.push_back("optimizer.record_trace=true");
  // Generic overrides come last and win.
  out.insert(out.end(), o.sets.begin(), o.sets.end());
  return out;
}

class Run {
 public:
  Run(const Options& o, const std::string& command) : command_(command) {
    const auto overrides = Overrides(o, command);
    cfg_ = o.config_path.empty() ? satkey::parse_config("", overrides)
                                 : satkey::load_config(o.config_path, overrides);
    if (o.seed) cfg_.seed = *o.seed;
    if (!o.out_dir.empty()) cfg_.output_dir = o.out_dir;
    threads_ = satkey::resolve_threads(o.threads ? o.threads : cfg_.threads);
    system_ = cfg_.System(threads_);
    std::filesystem::create_directories(cfg_.output_dir);
  }

  const RunConfig& cfg() const { return cfg_; }
  const satkey::SystemConfig& system() const { return system_; }

  std::string Path(const std::string& name) {
    outputs_.push_back(name);
    return (std::filesystem::path(cfg_.output_dir) / name).string();
  }

  void WriteJson(const std::string& name, const json& j) {
    satkey::write_json_file(Path(name), j);
  }

  template <typename Fn>
  void WriteText(const std::string& name, Fn&& fn) {
    std::ofstream out(Path(name));
    if (!out) throw std::runtime_error("cannot write " + name);
    fn(out);
  }

  void Finish(const std::string& summary) {
    json manifest = {{"tool", "satkey"},
                     {"version", kVersion},
                     {"command", command_},
                     {"seed", cfg_.seed},
                     {"threads", threads_},
                     {"config_hash", cfg_.Hash()},
                     {"config", cfg_.ToToml()},
                     {"outputs", outputs_},
                     {"summary", summary}};
    satkey::write_json_file(
        (std::filesystem::path(cfg_.output_dir) / "manifest.json").string(),
        manifest);
    std::cout << summary << std::endl;
  }

 private:
  std::string command_;
  RunConfig cfg_;
  satkey::SystemConfig system_;
  int threads_ = 1;
  std::vector<std::string> outputs_;
};

std::string ParamSummary(const satkey::OptResult& r) {
  const auto& p = r.params;
  std::string s = "p_x=" + Num(p.p_x) + " mu1=" + Num(p.mu[0]) +
                  " mu2=" + Num(p.mu[1]) + " p1=" + Num(p.probs[0]) +
                  " p2=" + Num(p.probs[1]) +
                  " half_window_s=" + Num(r.half_window_s);
  if (p.variant == satkey::ProtocolVariant::kStandardBB84) {
    s += " f_pe=" + Num(r.disclosed_fraction);
  }
  return s;
}

void CmdPass(const Options& o) {
  Run run(o, "pass");
  const auto& c = run.cfg();
  const auto& sys = run.system();
  satkey::BlockTallies tallies;
  if (!o.tallies.empty()) {
    std::vector<satkey::BlockTallies> parts;
    for (const auto& path : o.tallies) {
      parts.push_back(satkey::read_tallies_json(path));
    }
    tallies = satkey::aggregate(parts);
  } else {
    const auto geom = satkey::pass_geometry(sys.orbit, c.campaign.d_min_km);
    const double window =
        c.campaign.half_window_s.value_or(geom.max_half_window_s());
    tallies = satkey::accumulate_window(geom, sys.link, c.protocol, sys.error,
                                        window);
    run.WriteText("geometry.csv", [&](std::ostream& os) {
      satkey::write_geometry_csv(os, geom);
    });
  }
  const satkey::SklResult r =
      tallies.params.variant == satkey::ProtocolVariant::kStandardBB84
          ? satkey::skl_standard_bb84(tallies, sys.security,
                                      sys.space.pin_f_pe.value_or(0.1))
          : satkey::skl_finite(tallies, sys.security);
  run.WriteJson("tallies.json", tallies);
  run.WriteJson("skl.json", r);
  run.Finish("pass: skl=" + Num(r.ell) + " n_x=" + Num(r.n_x_total) +
             " qber=" + Num(r.qber));
}

void CmdOptimize(const Options& o, int passes, const std::string& name) {
  Run run(o, name);
  const auto& sys = run.system();
  const auto geom =
      satkey::pass_geometry(sys.orbit, run.cfg().campaign.d_min_km);
  const satkey::OptResult r = satkey::optimize_multi_pass(
      passes, geom, sys.link, sys.error, sys.security, sys.space,
      run.cfg().seed);
  run.WriteJson("optimize.json", r);
  if (sys.space.record_trace) {
    run.WriteText("trace.csv",
                  [&](std::ostream& os) { satkey::write_trace_csv(os, r.trace); });
  }
  run.Finish("optimize: skl=" + Num(r.skl.ell) + " " + ParamSummary(r));
}

void CmdFootprint(const Options& o, bool annual) {
  Run run(o, annual ? "annual" : "footprint");
  const auto& c = run.cfg();
  const auto& sys = run.system();
  satkey::FootprintOptions fo;
  fo.step_km = c.campaign.dmin_step_km;
  fo.edge_tolerance_km = c.campaign.edge_tolerance_km;
  const auto curve = satkey::footprint_sweep(
      sys, satkey::default_dmin_grid(sys.orbit, fo.step_km), c.seed, fo);
  run.WriteText("footprint.csv", [&](std::ostream& os) {
    satkey::write_footprint_csv(os, curve);
  });
  run.WriteJson("footprint.json", curve);
  if (!annual) {
    run.Finish("footprint: skl0=" + Num(curve.samples.front().ell) +
               " d_min_plus_km=" + Num(curve.d_min_plus_km) +
               " theta_max_minus_deg=" + Num(curve.theta_max_minus_deg));
    return;
  }
  const auto a =
      satkey::annual_volume(curve, c.campaign.latitude_deg, sys.orbit);
  json j = a;
  j["latitude_deg"] = c.campaign.latitude_deg;
  j["d_min_plus_km"] = curve.d_min_plus_km;
  run.WriteJson("annual.json", j);
  run.Finish("annual: skl_year=" + Num(a.skl_year_bits) +
             " skl_int_bit_m=" + Num(a.skl_int_bit_m) +
             " d_min_plus_km=" + Num(curve.d_min_plus_km));
}

void CmdGrid(const Options& o) {
  Run run(o, "grid");
  const auto& c = run.cfg().campaign;
  satkey::SensitivityAxes axes{c.eta_grid_db, c.p_ec_grid, c.qber_grid,
                               c.source_rate_grid_hz};
  const auto cells = satkey::sensitivity_grid(axes, run.system(), c.d_min_km,
                                              run.cfg().seed);
  run.WriteText("sensitivity.csv", [&](std::ostream& os) {
    satkey::write_sensitivity_csv(os, cells);
  });
  int zero = 0;
  double best = 0;
  for (const auto& cell : cells) {
    zero += cell.result.zero_key ? 1 : 0;
    best = std::max(best, cell.result.skl.ell);
  }
  run.Finish("grid: cells=" + std::to_string(cells.size()) +
             " zero_key_cells=" + std::to_string(zero) +
             " max_skl=" + Num(best));
}

void CmdMultiPass(const Options& o) {
  Run run(o, "multipass");
  const auto& c = run.cfg().campaign;
  const auto rows = satkey::multi_pass_table(run.system(), c.d_min_km,
                                             c.passes, run.cfg().seed);
  run.WriteText("multipass.csv", [&](std::ostream& os) {
    satkey::write_multi_pass_csv(os, rows);
  });
  std::string s = "multipass: per_pass_skl=";
  for (size_t i = 0; i < rows.size(); ++i) {
    s += (i ? "," : "") + Num(rows[i].result.per_pass_ell());
  }
  run.Finish(s);
}

void CmdCompare(const Options& o) {
  Run run(o, "compare-protocols");
  const auto& c = run.cfg().campaign;
  const auto rows = satkey::compare_protocols(run.system(), c.d_min_km,
                                              c.eta_grid_db, run.cfg().seed);
  run.WriteText("protocols.csv", [&](std::ostream& os) {
    satkey::write_protocol_comparison_csv(os, rows);
  });
  std::string s = "compare-protocols:";
  for (const auto& r : rows) {
    s += " " + Num(r.eta_sys_db) + "dB=" + Num(r.efficient.skl.ell) + "/" +
         Num(r.standard.skl.ell);
  }
  run.Finish(s);
}

void PrintError(const std::string& kind, const std::string& key,
                const std::string& message) {
  json j = {{"error", {{"kind", kind}, {"key", key}, {"message", message}}}};
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satellite decoy-state BB84 finite-key simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "TOML config file");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--threads", o.threads,
                    "Worker threads (default: SATKEY_THREADS or 1)");
    sub->add_option("--out-dir", o.out_dir, "Output directory");
    sub->add_option("--set", o.sets, "Override, e.g. orbit.altitude_km=600");
    sub->add_option("--eta-sys-db", o.eta_sys_db, "Zenith system loss (dB)");
    sub->add_option("--eta-offset-db", o.eta_offset_db,
                    "Extra loss added to the whole curve (dB)");
    sub->add_option("--p-ec", o.p_ec, "Extraneous count probability");
    sub->add_option("--p-ap", o.p_ap, "Afterpulse probability");
    sub->add_option("--receiver-diameter-m", o.receiver_diameter_m,
                    "Receiver aperture (m)");
    sub->add_option("--qber-i", o.qber_i, "Intrinsic QBER");
    sub->add_option("--source-rate-hz", o.source_rate_hz, "Source rate (Hz)");
    auto* dmin =
        sub->add_option("--dmin-km", o.dmin_km, "Ground-track offset (km)");
    sub->add_option("--theta-max-deg", o.theta_max_deg,
                    "Culmination elevation instead of --dmin-km")
        ->excludes(dmin);
    sub->add_option("--dt", o.dt,
                    "Half window (s); fixes the window for optimization");
    sub->add_option("--latitude-deg", o.latitude_deg, "Station latitude");
    sub->add_option("--variant", o.variant,
                    "efficient-bb84 or standard-bb84");
    sub->add_flag("--trace", o.trace, "Write the optimizer trace");
  };

  auto* pass = app.add_subcommand("pass", "Tallies and key of one pass");
  common(pass);
  pass->add_option("--tallies", o.tallies,
                   "Aggregate tally JSON files instead of simulating");
  auto* optimize = app.add_subcommand("optimize", "Optimize one pass");
  common(optimize);
  auto* footprint = app.add_subcommand("footprint", "Key vs ground-track offset");
  common(footprint);
  auto* annual = app.add_subcommand("annual", "Annual key volume");
  common(annual);
  auto* grid = app.add_subcommand("grid", "Sensitivity grid");
  common(grid);
  auto* multipass = app.add_subcommand("multipass", "Aggregated passes");
  common(multipass);
  multipass->add_option("--passes", o.passes, "Pass counts M");
  auto* compare =
      app.add_subcommand("compare-protocols", "Efficient vs standard BB84");
  common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*pass) CmdPass(o);
    if (*optimize) CmdOptimize(o, 1, "optimize");
    if (*footprint) CmdFootprint(o, false);
    if (*annual) CmdFootprint(o, true);
    if (*grid) CmdGrid(o);
    if (*multipass) CmdMultiPass(o);
    if (*compare) CmdCompare(o);
  } catch (const satkey::ConfigError& e) {
    PrintError("config", e.key(), e.message());
    return 2;
  } catch (const std::invalid_argument& e) {
    PrintError("validation", "", e.what());
    return 2;
  } catch (const std::exception& e) {
    PrintError("runtime", "", e.what());
    return 1;
  }
  return 0;
}
