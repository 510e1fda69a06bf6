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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

namespace satkey {
namespace {

TEST(LinkModel, BaselineZenith) {
  const LinkModel m = LinkModel::Parametric(OrbitConfig());
  EXPECT_NEAR(m.loss_db(90.0), 27.0, 1e-12);
  EXPECT_NEAR(m.eta_link_sys_db(), 27.0, 1e-12);
  EXPECT_NEAR(m.transmittance(90.0), 1.9952623149688797e-3, 1e-15);
}

TEST(LinkModel, ParametricAtTenDegrees) {
  OrbitConfig orbit;
  const LinkModel m = LinkModel::Parametric(orbit);
  const double r = range_at_elevation(orbit, 10.0);
  const double expected = 27.0 + 20.0 * std::log10(r / 500.0) +
                          (1.0 / std::sin(10.0 * kDegToRad) - 1.0);
  EXPECT_NEAR(m.loss_db(10.0), expected, 1e-10);
  EXPECT_NEAR(m.loss_db(10.0), 42.4, 0.1);
}

TEST(LinkModel, OffsetsAreAdditive) {
  const LinkModel m = LinkModel::Parametric(OrbitConfig());
  EXPECT_NEAR(m.WithOffset(3.0).loss_db(90.0), 30.0, 1e-12);
  for (double el : {10.0, 35.0, 72.0}) {
    EXPECT_NEAR(m.WithOffset(1.5).WithOffset(2.25).loss_db(el),
                m.WithOffset(3.75).loss_db(el), 1e-12);
  }
  EXPECT_NEAR(m.WithSystemEfficiency(40.5).eta_link_sys_db(), 40.5, 1e-12);
}

TEST(LinkModel, TransmittanceStrictlyIncreasing) {
  const LinkModel m = LinkModel::Parametric(OrbitConfig());
  double prev = 0.0;
  for (double el = 1.0; el <= 90.0; el += 0.5) {
    const double p = m.transmittance(el);
    EXPECT_GT(p, prev) << el;
    prev = p;
  }
}

TEST(LinkModel, RejectsOutOfRangeElevation) {
  const LinkModel m = LinkModel::Parametric(OrbitConfig());
  EXPECT_THROW(m.loss_db(91.0), std::out_of_range);
  EXPECT_THROW(m.loss_db(-1.0), std::out_of_range);
  const LinkModel t = LinkModel::Tabulated({{10, 45}, {45, 30}, {90, 27}});
  EXPECT_THROW(t.loss_db(5.0), std::out_of_range);
}

TEST(LinkModel, TabulatedReproducesNodes) {
  const std::vector<std::pair<double, double>> nodes = {
      {10, 44.0}, {20, 37.5}, {45, 30.25}, {70, 27.8}, {90, 27.0}};
  const LinkModel t = LinkModel::Tabulated(nodes);
  for (const auto& [el, db] : nodes) EXPECT_DOUBLE_EQ(t.loss_db(el), db);
  EXPECT_NEAR(t.loss_db(15.0), 0.5 * (44.0 + 37.5), 1e-12);
  EXPECT_NEAR(t.WithSystemEfficiency(30.0).loss_db(20.0), 40.5, 1e-12);
}

TEST(LinkModel, TabulatedValidation) {
  EXPECT_THROW(LinkModel::Tabulated({{10, 40}, {90, 41}}),
               std::invalid_argument);
  EXPECT_THROW(LinkModel::Tabulated({{10, 40}, {80, 30}}),
               std::invalid_argument);
  EXPECT_THROW(LinkModel::Tabulated({{20, 40}, {10, 45}, {90, 27}}),
               std::invalid_argument);
}

TEST(LinkModel, ProbabilityValidation) {
  LinkModel m = LinkModel::Parametric(OrbitConfig());
  m.p_ec = 1.0;
  EXPECT_THROW(m.Validate(), std::invalid_argument);
  m.p_ec = 0.0;
  m.p_ap = -0.1;
  EXPECT_THROW(m.Validate(), std::invalid_argument);
}

TEST(ReceiverScaling, Values) {
  EXPECT_NEAR(receiver_scaling_db(1.2), 0.0, 1e-12);
  EXPECT_NEAR(receiver_scaling_db(0.6), 20.0 * std::log10(2.0), 1e-12);
  EXPECT_NEAR(receiver_scaling_db(0.6), 6.02, 0.005);
  EXPECT_NEAR(receiver_scaling_db(0.213), 15.0, 0.05);
  EXPECT_THROW(receiver_scaling_db(0.0), std::invalid_argument);
}

TEST(CurveCsv, ParsesHeaderAndRows) {
  std::istringstream is("elevation_deg,loss_db\n10,44\n45,30\n90,27\n");
  const auto nodes = read_curve_csv(is);
  ASSERT_EQ(nodes.size(), 3u);
  EXPECT_DOUBLE_EQ(nodes[1].first, 45.0);
  EXPECT_DOUBLE_EQ(nodes[1].second, 30.0);
}

}  // namespace
}  // namespace satkey
