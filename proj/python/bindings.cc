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

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "satkey/campaign.h"
#include "satkey/config.h"
#include "satkey/counts.h"
#include "satkey/finite_key.h"
#include "satkey/link.h"
#include "satkey/optimizer.h"
#include "satkey/orbit.h"

namespace py = pybind11;

namespace satkey {
namespace {

void BindGeometry(py::module_& m) {
  py::class_<OrbitConfig>(m, "OrbitConfig")
      .def(py::init<>())
      .def_readwrite("altitude_km", &OrbitConfig::altitude_km)
      .def_readwrite("earth_radius_km", &OrbitConfig::earth_radius_km)
      .def_readwrite("gm_km3_s2", &OrbitConfig::gm_km3_s2)
      .def_readwrite("min_elevation_deg", &OrbitConfig::min_elevation_deg)
      .def_readwrite("time_step_s", &OrbitConfig::time_step_s)
      .def("validate", &OrbitConfig::Validate);

  py::class_<PassSample>(m, "PassSample")
      .def_readonly("t_s", &PassSample::t_s)
      .def_readonly("elevation_deg", &PassSample::elevation_deg)
      .def_readonly("range_km", &PassSample::range_km);

  py::class_<OverpassGeometry>(m, "OverpassGeometry")
      .def_readonly("d_min_km", &OverpassGeometry::d_min_km)
      .def_readonly("theta_max_deg", &OverpassGeometry::theta_max_deg)
      .def_readonly("time_step_s", &OverpassGeometry::time_step_s)
      .def_readonly("visible_half_width_s",
                    &OverpassGeometry::visible_half_width_s)
      .def_readonly("samples", &OverpassGeometry::samples)
      .def("empty", &OverpassGeometry::empty);

  m.def("orbital_period", &orbital_period, py::arg("orbit"));
  m.def("pass_geometry", &pass_geometry, py::arg("orbit"),
        py::arg("d_min_km") = 0.0);
  m.def("theta_max_from_dmin", &theta_max_from_dmin, py::arg("orbit"),
        py::arg("d_min_km"));
  m.def("max_visible_dmin", &max_visible_dmin, py::arg("orbit"));
  m.attr("SECONDS_PER_YEAR") = kSecondsPerYear;
}

void BindLink(py::module_& m) {
  py::class_<LinkModel>(m, "LinkModel")
      .def(py::init<>())
      .def_static("parametric", &LinkModel::Parametric, py::arg("orbit"),
                  py::arg("zenith_db") = LinkModel::kDefaultZenithDb,
                  py::arg("airmass_db") = LinkModel::kDefaultAirmassDb)
      .def_static("tabulated", &LinkModel::Tabulated, py::arg("nodes"))
      .def("loss_db", &LinkModel::loss_db, py::arg("elevation_deg"))
      .def("transmittance", &LinkModel::transmittance,
           py::arg("elevation_deg"))
      .def("eta_link_sys_db", &LinkModel::eta_link_sys_db)
      .def("with_offset", &LinkModel::WithOffset, py::arg("extra_db"))
      .def("with_system_efficiency", &LinkModel::WithSystemEfficiency,
           py::arg("eta_sys_db"))
      .def_readwrite("p_ec", &LinkModel::p_ec)
      .def_readwrite("p_ap", &LinkModel::p_ap);
  m.def("receiver_scaling_db", &receiver_scaling_db, py::arg("diameter_m"));
}

void BindCounts(py::module_& m) {
  py::enum_<ProtocolVariant>(m, "ProtocolVariant")
      .value("EFFICIENT_BB84", ProtocolVariant::kEfficientBB84)
      .value("STANDARD_BB84", ProtocolVariant::kStandardBB84);

  py::class_<ProtocolParams>(m, "ProtocolParams")
      .def(py::init<>())
      .def_readwrite("variant", &ProtocolParams::variant)
      .def_readwrite("mu", &ProtocolParams::mu)
      .def_readwrite("probs", &ProtocolParams::probs)
      .def_readwrite("p_x", &ProtocolParams::p_x)
      .def_readwrite("p_x_receiver", &ProtocolParams::p_x_receiver)
      .def_readwrite("source_rate_hz", &ProtocolParams::source_rate_hz)
      .def("validate", &ProtocolParams::Validate)
      .def(py::self == py::self);

  py::class_<ErrorModel>(m, "ErrorModel")
      .def(py::init<>())
      .def_readwrite("qber_intrinsic", &ErrorModel::qber_intrinsic)
      .def_readwrite("afterpulse_errors", &ErrorModel::afterpulse_errors);

  py::class_<BlockTallies>(m, "BlockTallies")
      .def(py::init<>())
      .def_readwrite("params", &BlockTallies::params)
      .def_readwrite("sent", &BlockTallies::sent)
      .def_readwrite("n_x", &BlockTallies::n_x)
      .def_readwrite("n_z", &BlockTallies::n_z)
      .def_readwrite("m_x", &BlockTallies::m_x)
      .def_readwrite("m_z", &BlockTallies::m_z)
      .def("n_x_total", &BlockTallies::n_x_total)
      .def("m_x_total", &BlockTallies::m_x_total)
      .def("scaled", &BlockTallies::Scaled, py::arg("factor"));

  m.def("detection_prob", &detection_prob, py::arg("mu"), py::arg("p_d"),
        py::arg("p_ec"), py::arg("p_ap"));
  m.def("accumulate_window", &accumulate_window, py::arg("geometry"),
        py::arg("link"), py::arg("params"), py::arg("errors"),
        py::arg("half_window_s"));
}

void BindFiniteKey(py::module_& m) {
  py::class_<SecurityParams>(m, "SecurityParams")
      .def(py::init<>())
      .def_readwrite("eps_c", &SecurityParams::eps_c)
      .def_readwrite("eps_s", &SecurityParams::eps_s)
      .def("composable_overhead_bits",
           &SecurityParams::composable_overhead_bits);

  py::class_<SklResult>(m, "SklResult")
      .def_readonly("ell", &SklResult::ell)
      .def_readonly("raw_length", &SklResult::raw_length)
      .def_readonly("s_x0", &SklResult::s_x0)
      .def_readonly("s_x1", &SklResult::s_x1)
      .def_readonly("s_z1", &SklResult::s_z1)
      .def_readonly("v_z1", &SklResult::v_z1)
      .def_readonly("phi_x", &SklResult::phi_x)
      .def_readonly("lambda_ec", &SklResult::lambda_ec)
      .def_readonly("qber", &SklResult::qber)
      .def_readonly("n_x_total", &SklResult::n_x_total)
      .def_readonly("per_basis_ell", &SklResult::per_basis_ell)
      .def_readonly("disclosed_fraction", &SklResult::disclosed_fraction);

  m.def("binary_entropy", &binary_entropy, py::arg("x"));
  m.def(
      "chernoff_delta",
      [](double y, double eps) {
        const ChernoffDelta d = chernoff_delta(y, eps);
        return py::make_tuple(d.plus, d.minus);
      },
      py::arg("y"), py::arg("eps"));
  m.def("lambda_ec", &lambda_ec, py::arg("n_x"), py::arg("qber"),
        py::arg("eps_c"));
  m.def("skl_finite", &skl_finite, py::arg("tallies"),
        py::arg("security") = SecurityParams());
  m.def("skl_asymptotic", &skl_asymptotic, py::arg("tallies"));
  m.def(
      "skl_standard_bb84",
      [](const BlockTallies& t, const SecurityParams& sec, double f) {
        return skl_standard_bb84(t, sec, f);
      },
      py::arg("tallies"), py::arg("security"), py::arg("disclosed_fraction"));
}

void BindOptimizer(py::module_& m) {
  py::class_<OptSpace>(m, "OptSpace")
      .def(py::init<>())
      .def_readwrite("base", &OptSpace::base)
      .def_readwrite("pin_p_x", &OptSpace::pin_p_x)
      .def_readwrite("pin_mu1", &OptSpace::pin_mu1)
      .def_readwrite("pin_mu2", &OptSpace::pin_mu2)
      .def_readwrite("pin_p1", &OptSpace::pin_p1)
      .def_readwrite("pin_p2", &OptSpace::pin_p2)
      .def_readwrite("pin_f_pe", &OptSpace::pin_f_pe)
      .def_readwrite("pin_dt", &OptSpace::pin_dt)
      .def_readwrite("dt_step_s", &OptSpace::dt_step_s)
      .def_readwrite("starts", &OptSpace::starts)
      .def_readwrite("rel_tol", &OptSpace::rel_tol)
      .def_readwrite("max_evaluations_per_start",
                     &OptSpace::max_evaluations_per_start)
      .def_readwrite("record_trace", &OptSpace::record_trace)
      .def_readwrite("threads", &OptSpace::threads);

  py::class_<TraceEntry>(m, "TraceEntry")
      .def_readonly("params", &TraceEntry::params)
      .def_readonly("half_window_s", &TraceEntry::half_window_s)
      .def_readonly("disclosed_fraction", &TraceEntry::disclosed_fraction)
      .def_readonly("raw_length", &TraceEntry::raw_length)
      .def_readonly("ell", &TraceEntry::ell)
      .def_readonly("qber", &TraceEntry::qber);

  py::class_<OptResult>(m, "OptResult")
      .def_readonly("params", &OptResult::params)
      .def_readonly("half_window_s", &OptResult::half_window_s)
      .def_readonly("disclosed_fraction", &OptResult::disclosed_fraction)
      .def_readonly("passes", &OptResult::passes)
      .def_readonly("skl", &OptResult::skl)
      .def_readonly("evaluations", &OptResult::evaluations)
      .def_readonly("zero_key", &OptResult::zero_key)
      .def_readonly("trace", &OptResult::trace)
      .def("per_pass_ell", &OptResult::per_pass_ell);

  m.def("optimize_single_pass", &optimize_single_pass, py::arg("geometry"),
        py::arg("link"), py::arg("errors"), py::arg("security"),
        py::arg("space"), py::arg("seed") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("optimize_multi_pass", &optimize_multi_pass, py::arg("passes"),
        py::arg("geometry"), py::arg("link"), py::arg("errors"),
        py::arg("security"), py::arg("space"), py::arg("seed") = 1,
        py::call_guard<py::gil_scoped_release>());
}

void BindCampaign(py::module_& m) {
  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("orbit", &SystemConfig::orbit)
      .def_readwrite("link", &SystemConfig::link)
      .def_readwrite("error", &SystemConfig::error)
      .def_readwrite("security", &SystemConfig::security)
      .def_readwrite("space", &SystemConfig::space);

  py::class_<FootprintSample>(m, "FootprintSample")
      .def_readonly("d_min_km", &FootprintSample::d_min_km)
      .def_readonly("theta_max_deg", &FootprintSample::theta_max_deg)
      .def_readonly("ell", &FootprintSample::ell)
      .def_readonly("half_window_s", &FootprintSample::half_window_s)
      .def_readonly("params", &FootprintSample::params);

  py::class_<FootprintCurve>(m, "FootprintCurve")
      .def_readonly("samples", &FootprintCurve::samples)
      .def_readonly("d_min_plus_km", &FootprintCurve::d_min_plus_km)
      .def_readonly("theta_max_minus_deg",
                    &FootprintCurve::theta_max_minus_deg);

  py::class_<AnnualEstimate>(m, "AnnualEstimate")
      .def_readonly("skl_int_bit_m", &AnnualEstimate::skl_int_bit_m)
      .def_readonly("n_orbits_year", &AnnualEstimate::n_orbits_year)
      .def_readonly("l_lat_m", &AnnualEstimate::l_lat_m)
      .def_readonly("skl_year_bits", &AnnualEstimate::skl_year_bits);

  m.def("default_dmin_grid", &default_dmin_grid, py::arg("orbit"),
        py::arg("step_km") = 50.0);
  m.def(
      "footprint_sweep",
      [](const SystemConfig& cfg, const std::vector<double>& grid,
         std::uint64_t seed, double step_km, double edge_tolerance_km) {
        return footprint_sweep(cfg, grid, seed,
                               {step_km, edge_tolerance_km});
      },
      py::arg("config"), py::arg("d_min_grid_km"), py::arg("seed") = 1,
      py::arg("step_km") = 50.0, py::arg("edge_tolerance_km") = 1.0,
      py::call_guard<py::gil_scoped_release>());
  m.def("annual_volume", &annual_volume, py::arg("curve"),
        py::arg("latitude_deg"), py::arg("orbit"));
}

void BindConfig(py::module_& m) {
  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("threads", &RunConfig::threads)
      .def("system", &RunConfig::System, py::arg("threads") = 1)
      .def("to_toml", &RunConfig::ToToml)
      .def("hash", &RunConfig::Hash);
  m.def("parse_config", &parse_config, py::arg("text"),
        py::arg("overrides") = std::vector<std::string>{});
  m.def("load_config", &load_config, py::arg("path"),
        py::arg("overrides") = std::vector<std::string>{});
}

}  // namespace
}  // namespace satkey

PYBIND11_MODULE(_satkey, m) {
  m.doc() = "Satellite decoy-state BB84 finite-key simulator";
  satkey::BindGeometry(m);
  satkey::BindLink(m);
  satkey::BindCounts(m);
  satkey::BindFiniteKey(m);
  satkey::BindOptimizer(m);
  satkey::BindCampaign(m);
  satkey::BindConfig(m);
}
