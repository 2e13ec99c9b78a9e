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
#include "persuasion/nad_ode.hpp"

namespace persuasion {
namespace {

// Derivatives of a -/+ sqrt(a^2 - 1).
double t1_slope(double a) { return 1.0 - a / std::sqrt(a * a - 1.0); }
double t2_slope(double a) { return 1.0 + a / std::sqrt(a * a - 1.0); }

TEST(NadRhs, ReciprocalMatchesClosedFormSlopes) {
  auto rs = fixture("rs");
  for (double a : {1.1, 1.2, 1.4}) {
    auto d = nad_rhs(rs.model, rs.prior, a, rs.t1(a), rs.t2(a));
    EXPECT_NEAR(d[0], t1_slope(a), 1e-6) << a;
    EXPECT_NEAR(d[1], t2_slope(a), 1e-6) << a;
  }
  auto d = nad_rhs(rs.model, rs.prior, 1.2, rs.t1(1.2), rs.t2(1.2));
  EXPECT_NEAR(d[0], -0.80907, 1e-5);
  EXPECT_NEAR(d[1], 2.80907, 1e-5);
}

TEST(NadRhs, ReflectionSwapsSlopes) {
  // Mirror states and actions about the midpoint c/2: the mirrored pair at
  // c - a is (c - t2, c - t1), so its slopes are (t2', t1').
  auto rs = fixture("rs");
  const double c = rs.prior.theta_min + rs.prior.theta_max;
  Prior p = rs.prior;
  p.f = [f = rs.prior.f, c](double t) { return f(c - t); };
  p.F = [F = rs.prior.F, c](double t) { return 1.0 - F(c - t); };
  auto m = make_simple_receiver([b = rs.model, c](double a, double t) { return b.V(c - a, c - t); },
                                [b = rs.model, c](double a, double t) { return -b.v(c - a, c - t); },
                                rs.model.rect);
  for (double a : {1.15, 1.3, 1.5}) {
    double t1 = rs.t1(a), t2 = rs.t2(a);
    auto d = nad_rhs(rs.model, rs.prior, a, t1, t2);
    auto r = nad_rhs(m, p, c - a, c - t2, c - t1);
    EXPECT_NEAR(r[0], d[1], 1e-6);
    EXPECT_NEAR(r[1], d[0], 1e-6);
  }
}

TEST(NadRhs, SimpleCaseIsSingular) {
  // q = V'(a) does not depend on the pair, so the system has no solution.
  auto m = make_simple(poly_curve({-0.25, 1.0, -1.0}), Rect{0.0, 1.0, 0.0, 1.0});
  try {
    nad_rhs(m, uniform_prior(0.0, 1.0), 0.5, 0.3, 0.7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularSystem);
  }
}

TEST(NadShoot, ReciprocalSolution) {
  auto rs = fixture("rs");
  auto s = nad_shoot(rs.model, rs.prior, Orientation::dipped);
  EXPECT_NEAR(s.a_lo, 1.0, 1e-4);
  EXPECT_NEAR(s.a_hi, 0.5 * std::exp(1.0) + 0.5 / std::exp(1.0), 1e-5);
  EXPECT_NEAR(s.a_hi, 1.5430806, 1e-6);
  double et = 0.0, eq = 0.0;
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    double a = s.a[k];
    et = std::max(et, std::abs(s.t1[k] - (a - std::sqrt(std::max(0.0, a * a - 1.0)))));
    if (std::isfinite(s.q[k])) eq = std::max(eq, std::abs(s.q[k] - a));
  }
  EXPECT_LE(et, 1e-4);
  EXPECT_LE(eq, 1e-4);
}

TEST(NadShoot, SecantSlopeOfExpectedMarginalValue) {
  // For a simple receiver q = E[v], and its slope is minus the secant of v.
  auto rs = fixture("rs");
  auto s = nad_shoot(rs.model, rs.prior, Orientation::dipped);
  for (std::size_t k = s.a.size() / 4; k < 3 * s.a.size() / 4; k += 50) {
    double slope = (s.q[k + 1] - s.q[k - 1]) / (s.a[k + 1] - s.a[k - 1]);
    double secant = -(1.0 / s.t2[k] - 1.0 / s.t1[k]) / (s.t2[k] - s.t1[k]);
    EXPECT_NEAR(slope, secant, 1e-3) << s.a[k];
  }
}

TEST(NadShoot, ErrorShrinksWithStep) {
  auto rs = fixture("rs");
  auto err = [&](int steps) {
    NadOptions opt;
    opt.steps = steps;
    auto s = nad_shoot(rs.model, rs.prior, Orientation::dipped, opt);
    double e = 0.0;
    for (std::size_t k = 0; k < s.a.size(); ++k) e = std::max(e, std::abs(s.t1[k] - rs.t1(s.a[k])));
    return e;
  };
  double e50 = err(50), e100 = err(100), e400 = err(400);
  EXPECT_LT(e100, e50);
  EXPECT_LT(e400, e100);
  EXPECT_LT(e400, e50 / 4.0);
}

TEST(NadShoot, DippedOrientationIsMonotone) {
  auto rs = fixture("rs");
  auto s = nad_shoot(rs.model, rs.prior, Orientation::dipped);
  const double margin = s.h * 1e-6;
  for (std::size_t k = 0; k + 1 < s.a.size(); ++k) {
    EXPECT_LT(s.t1[k + 1], s.t1[k] - margin) << k;
    EXPECT_GT(s.t2[k + 1], s.t2[k] + margin) << k;
  }
}

TEST(NadShoot, AtomPriorRejected) {
  auto fx = fixture("nad_discrete_fail");
  try {
    nad_shoot(fx.model, fx.prior, Orientation::dipped);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionFailed);
  }
}

TEST(NadVerify, ReciprocalPassesPerturbedFails) {
  auto rs = fixture("rs");
  auto s = nad_shoot(rs.model, rs.prior, Orientation::dipped);
  auto ok = nad_verify(s, rs.model, rs.prior);
  EXPECT_TRUE(ok.pass);
  EXPECT_LE(ok.obedience, 1e-3);
  auto bad = s;
  for (double& t : bad.t2) t += 0.01;
  auto rep = nad_verify(bad, rs.model, rs.prior);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(std::max(rep.obedience, rep.boundary), 1e-3);
}

TEST(NadVerify, QuantileClosedForm) {
  auto fx = fixture("quantile");
  auto s = nad_shoot(fx.model, fx.prior, Orientation::dipped);
  EXPECT_TRUE(s.closed_form);
  EXPECT_NEAR(s.a_lo, 0.5, 1e-12);
  for (std::size_t k = 0; k < s.a.size(); k += 100) EXPECT_NEAR(s.t1[k], 1.0 - s.a[k], 1e-12);
  auto rep = nad_verify(s, fx.model, fx.prior);
  EXPECT_LE(rep.obedience, 1e-6);
  EXPECT_THROW(nad_shoot(fx.model, fx.prior, Orientation::peaked), Error);
}

TEST(SandLever, ReciprocalEqualWeights) {
  auto rs = fixture("rs");
  auto s = nad_shoot(rs.model, rs.prior, Orientation::dipped);
  auto sl = sand_lever_assign(s, rs.prior, rs.model);
  double below = 0.0, above = 0.0;
  for (const auto& [ai, cond] : sl.outcome.conditionals()) {
    if (cond.size() < 2) continue;
    double a = sl.outcome.a_grid[static_cast<std::size_t>(ai)], mean = 0.0;
    for (const auto& [tj, w] : cond) mean += w * sl.outcome.theta_grid[static_cast<std::size_t>(tj)];
    EXPECT_NEAR(mean, a, 1e-9);
  }
  for (const auto& e : sl.outcome.entries) {
    double a = sl.outcome.a_grid[static_cast<std::size_t>(e.a_index)];
    double t = sl.outcome.theta_grid[static_cast<std::size_t>(e.theta_index)];
    if (std::abs(t - a) < 1e-9) continue;
    (t < a ? below : above) += e.mass;
  }
  EXPECT_NEAR(below, above, 2e-3);
  const double mesh = (rs.prior.theta_max - rs.prior.theta_min) / 2000.0;
  EXPECT_LE(sl.max_deficit, 1e-9 + mesh * rs.prior.f(rs.prior.theta_min));
}

TEST(SandLever, QuantileTailMass) {
  auto fx = fixture("quantile");
  auto s = nad_shoot(fx.model, fx.prior, Orientation::dipped);
  auto sl = sand_lever_assign(s, fx.prior, fx.model);
  for (double a : {0.55, 0.7, 0.9}) {
    double tail = 0.0;
    for (const auto& e : sl.outcome.entries)
      if (sl.outcome.a_grid[static_cast<std::size_t>(e.a_index)] >= a - 1e-12) tail += e.mass;
    EXPECT_NEAR(tail, 2.0 * (1.0 - a), 1e-3) << a;
  }
}

TEST(SandLever, DegeneratePairIsIdentity) {
  NadSolution s;
  s.a = linspace(0.0, 1.0, 11);
  s.t1 = s.t2 = s.a;
  s.q.assign(11, std::nan(""));
  s.a_lo = 0.0;
  s.a_hi = 1.0;
  s.h = 0.1;
  auto m = make_simple(poly_curve({0.0, 0.0, 1.0}), Rect{0.0, 1.0, 0.0, 1.0});
  auto sl = sand_lever_assign(s, uniform_prior(0.0, 1.0), m, 11);
  ASSERT_EQ(sl.outcome.entries.size(), 11u);
  for (const auto& e : sl.outcome.entries)
    EXPECT_NEAR(sl.outcome.a_grid[static_cast<std::size_t>(e.a_index)],
                sl.outcome.theta_grid[static_cast<std::size_t>(e.theta_index)], 1e-12);
}

TEST(SandLever, ValueMatchesLp) {
  auto rs = fixture("rs");
  auto sol = solve_problem(make_problem(rs.model, rs.prior, 201, 201));
  auto s = nad_shoot(rs.model, rs.prior, Orientation::dipped);
  double v = value_under(sand_lever_assign(s, rs.prior, rs.model).outcome, rs.model);
  EXPECT_GE(v, sol.value - 5e-3);
  EXPECT_LE(v, sol.dual_value + 5e-3);
}

}  // namespace
}  // namespace persuasion
