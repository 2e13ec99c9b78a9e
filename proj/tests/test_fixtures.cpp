// Copyright 2026 <Project Authors>
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>

#include "persuasion/fixtures.hpp"

namespace persuasion {
namespace {

class AllFixtures : public ::testing::TestWithParam<std::string> {};

TEST_P(AllFixtures, PassAtDefaultResolution) {
  auto rep = run_fixture(GetParam());
  for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.measured << " " << c.detail;
  EXPECT_TRUE(rep.pass());
}

TEST_P(AllFixtures, NoteDescribesContent) {
  auto fx = fixture(GetParam());
  EXPECT_FALSE(fx.note.empty());
  EXPECT_GT(fx.default_resolution, 0u);
}

INSTANTIATE_TEST_SUITE_P(Registry, AllFixtures, ::testing::ValuesIn(fixture_ids()));

TEST(Fixture, ReciprocalClosedForms) {
  auto rs = fixture("rs");
  EXPECT_NEAR(rs.t1(1.2), 0.536675, 1e-6);
  EXPECT_NEAR(rs.t1(1.2) * rs.t2(1.2), 1.0, 1e-12);
  EXPECT_NEAR(rs.q_nad(1.3), 1.3, 1e-15);
  EXPECT_NEAR(*rs.a_hi, 1.5430806348, 1e-10);
}

TEST(Fixture, SegpairCertificateBindsOnUpperSegment) {
  auto fx = fixture("segpair");
  const double T1 = std::sqrt(std::acos(-1.0) / 2.0) * std::erf(1.0 / std::sqrt(2.0));
  EXPECT_NEAR(fx.p(1.5), 3.0 * T1, 1e-14);
  EXPECT_NEAR(fx.q(0.5), 2.0, 1e-15);
  EXPECT_NEAR(fx.p(1.5) - fx.model.V(0.5, 1.5) - fx.q(0.5) * fx.model.u(0.5, 1.5), 0.0, 1e-14);
  EXPECT_TRUE(fx.in_gamma(0.5, 1.5));
  EXPECT_TRUE(fx.in_gamma(0.5, -0.5));
  EXPECT_FALSE(fx.in_gamma(0.5, 0.7));
}

TEST(Fixture, SegpairKernelIsStrictlyLogConcave) {
  // T''/T' = -y for the Gaussian integral.
  Curve T = gauss_integral_curve();
  double prev = std::numeric_limits<double>::infinity();
  for (double y : linspace(-3.0, 3.0, 61)) {
    double r = T.d2(y) / T.d1(y);
    EXPECT_NEAR(r, -y, 1e-12);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(Fixture, ExampleOneValue) {
  auto fx = fixture("e1");
  EXPECT_NEAR(*fx.value, 1.0 / 12.0, 1e-15);
  double v = 0.0;
  for (double t : {0.0, 0.5, 1.0}) v += fx.p(t) / 3.0;
  EXPECT_NEAR(v, 1.0 / 12.0, 1e-15);
}

TEST(Fixture, UnknownIdThrows) {
  try {
    fixture("bogus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownFixture);
  }
  EXPECT_THROW(run_fixture("bogus"), Error);
}

TEST(RunFixture, ReciprocalFineMesh) {
  auto rep = run_fixture("rs", 2001);
  EXPECT_TRUE(rep.pass());
}

TEST(RunFixture, SegpairFineGrid) {
  auto rep = run_fixture("segpair", 601);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.measured;
}

TEST(RunFixture, ContestAboveOneIsFullDisclosure) {
  auto rep = run_fixture("contest", 301, {{"lo", 1.1}, {"hi", 2.0}});
  for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.measured;
}

TEST(RunFixture, ContestPeakedRegime) {
  auto rep = run_fixture("contest", 0, {{"lo", 0.6}, {"hi", 0.9}});
  for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.measured;
}

TEST(RunFixture, ContestLowerBoundFloor) {
  auto fx = fixture("contest", {{"lo", 0.0}, {"hi", 0.4}});
  EXPECT_EQ(fx.prior.theta_min, 0.05);
}

}  // namespace
}  // namespace persuasion
