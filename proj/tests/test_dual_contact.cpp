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

#include "persuasion/dual_contact.hpp"
#include "persuasion/fixtures.hpp"

namespace persuasion {
namespace {

std::vector<double> eval_on(const Fn1& f, const std::vector<double>& g) {
  std::vector<double> out;
  for (double x : g) out.push_back(f(x));
  return out;
}

TEST(ComputeQ, ExampleOne) {
  auto fx = fixture("e1");
  std::vector<double> ts{0.0, 0.5, 1.0};
  auto p = eval_on(fx.p, ts);
  auto Q = compute_Q(p, ts, fx.model, 0.7);
  EXPECT_NEAR(Q.lo, 0.2, 1e-9);
  EXPECT_NEAR(Q.hi, 0.7, 1e-9);
  auto Z = compute_Q(p, ts, fx.model, 0.3);
  EXPECT_NEAR(Z.lo, 0.0, 1e-12);
  EXPECT_NEAR(Z.hi, 0.0, 1e-12);
}

TEST(ComputeQ, InfeasiblePriceSignalsEmpty) {
  auto fx = fixture("e1");
  std::vector<double> ts{0.0, 0.5, 1.0};
  try {
    compute_Q({0.0, 0.0, 0.0}, ts, fx.model, 0.9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyQ);
  }
}

TEST(ComputeQ, ReciprocalLpDualBracketsA) {
  auto fx = fixture("rs");
  auto pb = make_problem(fx.model, fx.prior, 201, 201);
  auto sol = solve_problem(pb);
  auto Q = compute_Q(sol.dual_row_prices, pb.theta_grid, fx.model, 1.2, pb.prior_mass);
  // Grid duals bracket the continuum multiplier up to the state spacing.
  const double h = pb.theta_grid[1] - pb.theta_grid[0];
  EXPECT_LE(Q.lo, 1.2 + h);
  EXPECT_GE(Q.hi, 1.2 - h);
  EXPECT_LE(Q.hi - Q.lo, 0.1);
}

TEST(SelectQ, ExampleOneRules) {
  auto fx = fixture("e1");
  auto pb = make_problem(fx.model, fx.prior, 101, 0);
  auto c = select_q(eval_on(fx.p, pb.theta_grid), pb);
  std::size_t i08 = nearest_index(pb.a_grid, 0.8), i025 = nearest_index(pb.a_grid, 0.25);
  EXPECT_EQ(c.rule[i08], QRule::midpoint);
  EXPECT_NEAR(c.q[i08], 0.55, 1e-12);
  EXPECT_NEAR(c.q[i025], 0.0, 1e-12);
  // The closed-form multiplier 2a - 1 is another valid selection.
  EXPECT_GE(0.6, c.Q_lo[i08] - 1e-12);
  EXPECT_LE(0.6, c.Q_hi[i08] + 1e-12);
}

TEST(SelectQ, TypeOneContactUnderFullDisclosure) {
  auto m = make_simple(poly_curve({0.0, 0.0, 1.0}), Rect{0.0, 1.0, 0.0, 1.0});
  auto prior = uniform_atoms({0.0, 0.25, 0.5, 0.75, 1.0});
  auto pb = make_problem(m, prior, 101, 0);
  auto sol = solve_problem(pb);
  auto c = select_q(sol.dual_row_prices, pb);
  for (double a : {0.25, 0.5, 0.75}) {
    std::size_t i = nearest_index(pb.a_grid, a);
    EXPECT_EQ(c.rule[i], QRule::type1_contact) << a;
    EXPECT_NEAR(c.q[i], m.v(a, a), 1e-9) << a;
  }
}

TEST(ContactSet, ExampleOneWithClosedFormCertificate) {
  auto fx = fixture("e1");
  auto pb = make_problem(fx.model, fx.prior, 101, 0);
  auto g = contact_set(certificate_from(fx.p, fx.q, pb), pb);
  for (std::size_t i = 0; i < pb.a_grid.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_EQ(g.in_gamma(i, j), fx.in_gamma(pb.a_grid[i], pb.theta_grid[j])) << pb.a_grid[i] << "," << j;
}

TEST(ContactSet, SegpairSegments) {
  auto fx = fixture("segpair");
  auto pb = segpair_problem(fx, 30);
  auto g = contact_set(certificate_from(fx.p, fx.q, pb), pb, 1e-9);
  for (std::size_t i = 0; i < pb.a_grid.size(); ++i)
    for (std::size_t j = 0; j < pb.theta_grid.size(); ++j)
      EXPECT_EQ(g.in_gamma(i, j), fx.in_gamma(pb.a_grid[i], pb.theta_grid[j]));
}

TEST(ContactSet, FocCounterexampleSections) {
  auto fx = fixture("foc_counterexample");
  auto pb = make_problem(fx.model, fx.prior, 31, 0);
  auto g = contact_set(select_q({0.0, 0.0, 0.0}, pb), pb);
  EXPECT_EQ(g.gamma[0], (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(g.gamma_star[0], (std::vector<int>{0}));
}

TEST(ContactSet, SectionsBracketThetaStar) {
  auto fx = fixture("rs");
  auto pb = make_problem(fx.model, fx.prior, 101, 101);
  auto sol = solve_problem(pb);
  auto g = contact_set(select_q(sol.dual_row_prices, pb), pb);
  for (std::size_t i = 0; i < pb.a_grid.size(); ++i) {
    const auto& s = g.gamma[i];
    if (s.empty()) continue;
    double ts = theta_star(fx.model, pb.a_grid[i]);
    double slack = half_step(pb.theta_grid, 0);
    EXPECT_LE(pb.theta_grid[static_cast<std::size_t>(s.front())], ts + slack);
    EXPECT_GE(pb.theta_grid[static_cast<std::size_t>(s.back())], ts - slack);
    for (int j : g.gamma_star[i]) EXPECT_TRUE(g.in_gamma(i, static_cast<std::size_t>(j)));
  }
}

TEST(Foc, ReciprocalClosedForm) {
  auto fx = fixture("rs");
  double t1 = fx.t1(1.2);
  EXPECT_NEAR(t1, 0.536675, 1e-6);
  EXPECT_NEAR(foc_value(fx.model, 1.2, t1, 1.2, 1.0), 0.0, 1e-4);
  EXPECT_NEAR(foc_value(fx.model, 1.2, fx.t2(1.2), 1.2, 1.0), 0.0, 1e-4);
}

TEST(Foc, PairPinnedMultiplierFailsAtThirdState) {
  auto fx = fixture("foc_counterexample");
  auto qp = q_closed_form(fx.model, 0.0, 1.0 / 3.0, 1.0);
  EXPECT_NEAR(foc_value(fx.model, 0.0, 1.0 / 3.0, qp.q, qp.q_prime), 0.0, 1e-12);
  EXPECT_NEAR(foc_value(fx.model, 0.0, 1.0, qp.q, qp.q_prime), 0.0, 1e-12);
  EXPECT_GT(std::abs(foc_value(fx.model, 0.0, 0.0, qp.q, qp.q_prime)), 1e-3);
}

TEST(Foc, LinearNoDisclosureVanishes) {
  auto m = make_simple(poly_curve({0.0, 1.0}), Rect{0.0, 1.0, 0.0, 1.0});
  for (double a : {0.2, 0.5, 0.8})
    for (double t : {0.0, 0.5, 1.0}) EXPECT_NEAR(foc_value(m, a, t, 1.0, 0.0), 0.0, 1e-15);
}

TEST(QClosedForm, Examples) {
  auto rs = fixture("rs");
  auto qp = q_closed_form(rs.model, 1.2, rs.t1(1.2), rs.t2(1.2));
  EXPECT_NEAR(qp.q, 1.2, 1e-12);
  EXPECT_NEAR(qp.q_prime, 1.0, 1e-9);

  // Separable simple receiver: q = [w(t1)(t2 - a) - w(t2)(t1 - a)] / (t2 - t1).
  Curve w = exp_curve(1.0, 0.7);
  auto m = make_separable_receiver(w, Rect{0.0, 1.0, 0.0, 1.0});
  double a = 0.4, t1 = 0.1, t2 = 0.9;
  EXPECT_NEAR(q_closed_form(m, a, t1, t2).q, (w.f(t1) * (t2 - a) - w.f(t2) * (t1 - a)) / (t2 - t1), 1e-12);

  auto c = make_contest(0.2, 0.9);
  EXPECT_TRUE(std::isfinite(q_closed_form(c, 0.3, 0.35, 0.55).q));
  // For a pair straddling theta*(0.3) = 1/3 the denominator is positive.
  double u1 = c.u(0.3, 0.25), u2 = c.u(0.3, 0.55);
  EXPECT_GT(u1 * c.u_a(0.3, 0.55) - u2 * c.u_a(0.3, 0.25), 0.0);
  EXPECT_THROW(q_closed_form(c, 0.3, 0.4, 0.4), Error);
}

TEST(SupportOptimality, LpOutcomePassesNoDisclosureFails) {
  auto fx = fixture("e1");
  auto pb = make_problem(fx.model, fx.prior, 101, 0);
  auto sol = solve_problem(pb);
  auto own = contact_set(select_q(sol.dual_row_prices, pb), pb);
  EXPECT_TRUE(verify_support_optimality(sol.outcome, own).pass);

  auto closed = contact_set(certificate_from(fx.p, fx.q, pb), pb);
  Outcome pooled;
  pooled.a_grid = pb.a_grid;
  pooled.theta_grid = pb.theta_grid;
  int mid = static_cast<int>(nearest_index(pb.a_grid, 0.5));
  for (int j = 0; j < 3; ++j) pooled.entries.push_back({mid, j, 1.0 / 3.0});
  auto v = verify_support_optimality(pooled, closed);
  ASSERT_FALSE(v.pass);
  EXPECT_EQ(v.offending.size(), 1u);
  EXPECT_EQ(v.offending[0].theta_index, 2);
}

TEST(SupportOptimality, SegpairLpAgainstClosedFormCertificate) {
  auto fx = fixture("segpair");
  auto pb = segpair_problem(fx, 30);
  auto sol = solve_problem(pb);
  auto g = contact_set(certificate_from(fx.p, fx.q, pb), pb, 1e-9);
  EXPECT_TRUE(verify_support_optimality(sol.outcome, g).pass);
}

class CertificateInvariants : public ::testing::TestWithParam<std::string> {};

TEST_P(CertificateInvariants, FeasibleAndComplementary) {
  Params params;
  if (GetParam() == "contest") params = {{"lo", 0.2}, {"hi", 0.5}};
  auto fx = fixture(GetParam(), params);
  auto pb = make_problem(fx.model, fx.prior, 81, 81);
  auto sol = solve_problem(pb);
  auto c = select_q(sol.dual_row_prices, pb);
  EXPECT_GE(d1_min_residual(c, fx.model, pb.prior_mass), -1e-8);
  for (std::size_t i = 0; i < c.q.size(); ++i) {
    EXPECT_GE(c.q[i], c.Q_lo[i] - 1e-12);
    EXPECT_LE(c.q[i], c.Q_hi[i] + 1e-12);
  }
  EXPECT_LE(complementary_slackness(sol.outcome, c, fx.model), 1e-7);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, CertificateInvariants,
                         ::testing::Values("e1", "rs", "contest", "nad_discrete_fail", "no_single_crossing"));

TEST(DualPrices, IndependentBasesAgree) {
  auto fx = fixture("rs");
  auto pb = make_problem(fx.model, fx.prior, 61, 61);
  SimplexOptions bland;
  bland.rule = PivotRule::bland;
  auto a = solve_problem(pb), b = solve_problem(pb, bland);
  for (std::size_t j = 0; j < pb.theta_grid.size(); ++j)
    if (pb.prior_mass[j] > 0.0) {
      EXPECT_NEAR(a.dual_row_prices[j], b.dual_row_prices[j], 1e-7) << j;
    }
}

}  // namespace
}  // namespace persuasion
