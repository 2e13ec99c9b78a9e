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

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "persuasion/core_model.hpp"
#include "persuasion/discretize_lp.hpp"
#include "persuasion/dual_contact.hpp"
#include "persuasion/error.hpp"
#include "persuasion/nad_ode.hpp"
#include "persuasion/structure.hpp"

namespace persuasion {

using Params = std::map<std::string, double>;

// A worked example with closed-form expectations. Every expected artifact is
// an evaluator, not a stored table.
struct Fixture {
  std::string id;
  std::string note;
  PreferenceModel model;
  Prior prior;
  std::size_t default_resolution = 201;
  std::optional<double> value;
  Fn1 p, q;          // dual certificate
  Fn1 t1, t2, q_nad;  // pooling boundaries and multiplier along them
  std::optional<double> a_lo, a_hi;
  std::function<bool(double, double)> in_gamma;  // expected contact set
  std::vector<Point> points;                     // expected point set, if any
  std::optional<Dippedness> dippedness;
  std::optional<Orientation> orientation;
};

inline const std::vector<std::string>& fixture_ids() {
  static const std::vector<std::string> ids = {"e1",      "rs",
                                               "quantile", "segpair",
                                               "contest",  "foc_counterexample",
                                               "no_single_crossing", "stability_limit",
                                               "nad_discrete_fail"};
  return ids;
}

namespace detail {

inline double param(const Params& p, const std::string& k, double dflt) {
  auto it = p.find(k);
  return it == p.end() ? dflt : it->second;
}

inline bool near(double x, double y, double tol = 1e-9) { return std::abs(x - y) <= tol; }

// Interpolate a function known at four states; used for the tabulated model.
inline double piecewise_states(const std::array<double, 4>& vals, double t) {
  static const std::vector<double> ts = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  return interp(ts, std::vector<double>(vals.begin(), vals.end()), t);
}

}  // namespace detail

inline Fixture fixture(const std::string& id, const Params& params = {}) {
  Fixture fx;
  fx.id = id;
  const double e = std::exp(1.0);
  if (id == "e1") {
    fx.note = "simple case, V(a) = (a - 1/2)^2 above 1/2 and 0 below, uniform prior on {0, 1/2, 1}";
    fx.model = make_simple(hinge_square_curve(0.5), Rect{0.0, 1.0, 0.0, 1.0}, "e1");
    fx.prior = uniform_atoms({0.0, 0.5, 1.0});
    fx.default_resolution = 101;
    fx.value = 1.0 / 12.0;
    fx.p = [](double t) { return t < 0.5 ? 0.0 : (t - 0.5) * (t - 0.5); };
    fx.q = [](double a) { return a < 0.5 ? 0.0 : 2.0 * a - 1.0; };
    fx.in_gamma = [](double a, double t) {
      bool low = a <= 0.5 + 1e-12 && (detail::near(t, 0.0) || detail::near(t, 0.5));
      return low || (detail::near(a, 1.0) && detail::near(t, 1.0));
    };
  } else if (id == "rs") {
    fx.note = "simple receiver, V(a, theta) = a / theta on [1/e, e], density 1/(2 theta)";
    fx.model = make_separable_receiver(inverse_curve(), Rect{1.0 / e, e, 1.0 / e, e}, "rs");
    fx.prior = reciprocal_prior(1.0 / e, e);
    fx.default_resolution = 2001;
    fx.t1 = [](double a) { return a - std::sqrt(std::max(0.0, a * a - 1.0)); };
    fx.t2 = [](double a) { return a + std::sqrt(std::max(0.0, a * a - 1.0)); };
    fx.q_nad = [](double a) { return a; };
    fx.a_lo = 1.0;
    fx.a_hi = e / 2.0 + 1.0 / (2.0 * e);
    fx.orientation = Orientation::dipped;
  } else if (id == "quantile") {
    const double kappa = detail::param(params, "kappa", 0.5);
    fx.note = "quantile receiver with V(a) = a and a uniform prior on [0, 1]";
    fx.model = make_quantile(kappa, poly_curve({0.0, 1.0}));
    fx.prior = uniform_prior(0.0, 1.0);
    fx.default_resolution = 2001;
    fx.t1 = [kappa](double a) { return std::clamp((1.0 - kappa) * (1.0 - a) / kappa, 0.0, 1.0); };
    fx.t2 = [](double a) { return a; };
    fx.a_lo = 1.0 - kappa;
    fx.a_hi = 1.0;
    fx.orientation = Orientation::dipped;
  } else if (id == "segpair") {
    fx.note =
        "simple sender on [-1, 3], u = T(theta - a), V = T(2a), T(y) = int_0^y exp(-s^2/2) ds; "
        "density 4/7 on [-1, 0) and 1/7 on [0, 3], so f(-a) > 3 f(3a)";
    Curve T = gauss_integral_curve();
    fx.model = make_simple_sender(scale_argument(T, 2.0), T, Rect{-1.0, 3.0, -1.0, 3.0}, "segpair");
    fx.prior = piecewise_uniform_prior({-1.0, 0.0, 3.0}, {4.0 / 7.0, 3.0 / 7.0});
    fx.default_resolution = 601;
    fx.p = [T](double t) { return t < 0.0 ? T.f(2.0 * t) : 3.0 * T.f(2.0 * t / 3.0); };
    fx.q = [T](double a) { return a < 0.0 ? 2.0 * T.d1(2.0 * a) / T.d1(0.0) : 2.0; };
    fx.in_gamma = [](double a, double t) {
      const double tol = 1e-9;
      bool diag = a <= tol && a >= -1.0 - tol && detail::near(t, a, tol);
      bool mirror = a > 0.0 && a <= 1.0 + tol && detail::near(t, -a, tol);
      bool triple = a >= -tol && a <= 1.0 + tol && detail::near(t, 3.0 * a, tol);
      return diag || mirror || triple;
    };
    fx.dippedness = Dippedness::single_dipped;
  } else if (id == "contest") {
    const double lo = std::max(0.05, detail::param(params, "lo", 0.2));
    const double hi = detail::param(params, "hi", 0.5);
    fx.note = "contest, V = a / theta, u = theta - (1 + theta^2) a, uniform prior on [lo, hi]";
    fx.model = make_contest(lo, hi);
    fx.prior = uniform_prior(lo, hi);
    fx.default_resolution = 201;
    const double pivot = 1.0 / std::sqrt(3.0);
    if (hi <= pivot) fx.dippedness = Dippedness::single_dipped, fx.orientation = Orientation::dipped;
    if (lo >= pivot && hi <= 1.0) fx.dippedness = Dippedness::single_peaked, fx.orientation = Orientation::peaked;
  } else if (id == "foc_counterexample") {
    fx.note =
        "simple receiver, uniform prior on {0, 1/3, 1}, V(a, 0) = -a^2 and "
        "V(a, theta) = -a/3 + a^2 - 3a^3/4 otherwise";
    auto V = [](double a, double t) { return t == 0.0 ? -a * a : -a / 3.0 + a * a - 0.75 * a * a * a; };
    auto v = [](double a, double t) { return t == 0.0 ? -2.0 * a : -1.0 / 3.0 + 2.0 * a - 2.25 * a * a; };
    fx.model = make_simple_receiver(V, v, Rect{0.0, 1.0, 0.0, 1.0}, {}, {}, "foc_counterexample");
    fx.prior = uniform_atoms({0.0, 1.0 / 3.0, 1.0});
    fx.default_resolution = 301;
    fx.value = 0.0;
    fx.p = [](double) { return 0.0; };
    fx.in_gamma = [](double a, double t) {
      return (detail::near(a, 0.0) && detail::near(t, 0.0)) ||
             ((detail::near(a, 0.0) || detail::near(a, 2.0 / 3.0)) && !detail::near(t, 0.0));
    };
    fx.points = {{0.0, 0.0}, {2.0 / 3.0, 1.0 / 3.0}, {2.0 / 3.0, 1.0}};
  } else if (id == "no_single_crossing") {
    fx.note = "tabulated u and V on four states where u(1/2, .) vanishes at two states";
    using detail::piecewise_states;
    auto V = [](double a, double t) { return piecewise_states({0.0, 0.0, a - 0.5, a - 1.0}, t); };
    auto v = [](double, double t) { return piecewise_states({0.0, 0.0, 1.0, 1.0}, t); };
    auto u = [](double a, double t) { return piecewise_states({-a, 0.5 - a, 0.5 - a, 1.0 - a}, t); };
    auto ua = [](double, double) { return -1.0; };
    fx.model = make_custom(V, v, u, ua, Rect{0.0, 1.0, 0.0, 1.0}, "no_single_crossing");
    fx.prior = uniform_atoms({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
    fx.default_resolution = 201;
    fx.value = 0.0;
    fx.p = [](double) { return 0.0; };
    fx.q = [](double a) { return a < 0.5 ? 0.0 : 1.0; };
  } else if (id == "stability_limit") {
    fx.note = "limit of single-dipped contact sets on {0, 1/2, 1} that is not single-dipped";
    fx.model = make_simple(poly_curve({0.0, 1.0}), Rect{0.0, 1.0, 0.0, 1.0}, "stability_limit");
    fx.prior = uniform_atoms({0.0, 0.5, 1.0});
    fx.default_resolution = 9;
    fx.dippedness = Dippedness::neither;
  } else if (id == "nad_discrete_fail") {
    fx.note = "simple case, V(a) = sin(3 pi a), uniform prior on {0, 1/2, 1}";
    fx.model = make_simple(sine_curve(3.0 * std::acos(-1.0)), Rect{0.0, 1.0, 0.0, 1.0}, "nad_discrete_fail");
    fx.prior = uniform_atoms({0.0, 0.5, 1.0});
    fx.default_resolution = 121;
    fx.value = 1.0;
    fx.points = {{1.0 / 6.0, 0.0}, {1.0 / 6.0, 0.5}, {5.0 / 6.0, 0.5}, {5.0 / 6.0, 1.0}};
    fx.dippedness = Dippedness::both;
  } else {
    throw Error(ErrorKind::UnknownFixture, "no fixture named '" + id + "'");
  }
  return fx;
}

// Limit set of the stability example sampled on an action grid: sections
// {0, 1/2} below 1/2, {0, 1/2, 1} at 1/2 and {1/2, 1} above.
inline std::vector<Point> stability_limit_set(std::size_t n) {
  std::vector<Point> pts;
  for (double a : linspace(0.0, 1.0, n)) {
    if (a < 0.5 - 1e-12) {
      pts.push_back({a, 0.0});
      pts.push_back({a, 0.5});
    } else if (a > 0.5 + 1e-12) {
      pts.push_back({a, 0.5});
      pts.push_back({a, 1.0});
    } else {
      for (double t : {0.0, 0.5, 1.0}) pts.push_back({0.5, t});
    }
  }
  return pts;
}

// Segpair grids: states spaced s on [-1, 0) and 3s on [0, 3], actions spaced s,
// so every point of the three contact segments is a grid node.
inline DiscreteProblem segpair_problem(const Fixture& fx, std::size_t k) {
  DiscreteProblem pb;
  pb.model = fx.model;
  const double s = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i <= 4 * k; ++i) pb.a_grid.push_back(-1.0 + s * static_cast<double>(i));
  for (std::size_t i = 0; i < k; ++i) pb.theta_grid.push_back(-1.0 + s * static_cast<double>(i));
  for (std::size_t i = 0; i <= k; ++i) pb.theta_grid.push_back(3.0 * s * static_cast<double>(i));
  pb.prior_mass = prior_masses_on(fx.prior, pb.theta_grid);
  double total = 0.0;
  for (double w : pb.prior_mass) total += w;
  for (double& w : pb.prior_mass) w /= total;
  return pb;
}

// Twist determinant of the contest model in closed form (independent of a).
inline double contest_twist_closed_form(double t1, double t2, double t3) {
  return (t3 - t2) * (t3 - t1) * (t2 - t1) * (1.0 - t2 * t3 - t1 * t3 - t1 * t2) / (t1 * t2 * t3);
}

// ---------------------------------------------------------------------------
// Pipelines.

struct FixtureCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct FixtureReport {
  std::string id;
  std::size_t resolution = 0;
  std::vector<FixtureCheck> checks;
  std::map<std::string, std::string> facts;  // verdicts and other non-numeric results
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const FixtureCheck& c) { return c.pass; });
  }
  void add(std::string name, double measured, double tol, bool pass, std::string detail = {}) {
    checks.push_back({std::move(name), measured, tol, pass, std::move(detail)});
  }
  // |measured| <= tol
  void within(std::string name, double measured, double tol) {
    add(std::move(name), measured, tol, std::abs(measured) <= tol);
  }
};

struct LpRun {
  DiscreteProblem problem;
  LpSolution solution;
  DualCertificate certificate;
  ContactSet contact;
};

inline LpRun run_lp(DiscreteProblem pb, const SimplexOptions& opt = {}) {
  LpRun r;
  r.problem = std::move(pb);
  validate(r.problem);
  r.solution = solve_problem(r.problem, opt);
  r.certificate = select_q(r.solution.dual_row_prices, r.problem);
  r.contact = contact_set(r.certificate, r.problem);
  return r;
}

// Resolution rounded so the listed fractions of the action range are nodes.
inline std::size_t aligned_resolution(std::size_t n, std::size_t period) {
  if (n < period + 1) return period + 1;
  return ((n - 1 + period - 1) / period) * period + 1;
}

inline bool on_diagonal(const Outcome& o, const PreferenceModel& m) {
  for (const auto& e : o.entries) {
    std::size_t i = static_cast<std::size_t>(e.a_index);
    double a = o.a_grid[i], target = full_disclosure_action(m, o.theta_grid[static_cast<std::size_t>(e.theta_index)]);
    if (std::abs(a - target) > half_step(o.a_grid, i) + 1e-12) return false;
  }
  return true;
}

inline FixtureReport run_fixture(const std::string& id, std::size_t resolution = 0, const Params& params = {}) {
  Fixture fx = fixture(id, params);
  if (resolution == 0) resolution = fx.default_resolution;
  FixtureReport rep;
  rep.id = id;
  rep.resolution = resolution;
  try {
    if (id == "e1") {
      auto run = run_lp(make_problem(fx.model, fx.prior, resolution, 0));
      const auto& pb = run.problem;
      rep.within("value - 1/12", run.solution.value - *fx.value, 1e-8);
      rep.within("duality gap", duality_gap(run.solution), 1e-8);
      double perr = 0.0;
      for (std::size_t j = 0; j < pb.theta_grid.size(); ++j)
        perr = std::max(perr, std::abs(run.solution.dual_row_prices[j] - fx.p(pb.theta_grid[j])));
      rep.within("p - V(theta, theta)", perr, 1e-8);
      QInterval Q = compute_Q(run.solution.dual_row_prices, pb.theta_grid, fx.model, 0.7, pb.prior_mass);
      rep.within("Q(0.7) lower - 0.2", Q.lo - 0.2, 1e-9);
      rep.within("Q(0.7) upper - 0.7", Q.hi - 0.7, 1e-9);
      int mismatches = 0;
      for (std::size_t i = 0; i < pb.a_grid.size(); ++i)
        for (std::size_t j = 0; j < pb.theta_grid.size(); ++j)
          if (run.contact.in_gamma(i, j) != fx.in_gamma(pb.a_grid[i], pb.theta_grid[j])) ++mismatches;
      rep.add("contact set mismatches", mismatches, 0, mismatches == 0);
    } else if (id == "rs") {
      NadOptions opt;
      opt.steps = static_cast<int>(resolution) - 1;
      auto sol = nad_shoot(fx.model, fx.prior, Orientation::dipped, opt);
      double e1 = 0.0, e2 = 0.0, eq = 0.0;
      for (std::size_t k = 0; k < sol.a.size(); ++k) {
        e1 = std::max(e1, std::abs(sol.t1[k] - fx.t1(sol.a[k])));
        e2 = std::max(e2, std::abs(sol.t2[k] - fx.t2(sol.a[k])));
        if (std::isfinite(sol.q[k])) eq = std::max(eq, std::abs(sol.q[k] - fx.q_nad(sol.a[k])));
      }
      rep.within("max |t1 - closed form|", e1, 1e-4);
      rep.within("max |t2 - closed form|", e2, 1e-4);
      rep.within("max |q - a|", eq, 1e-4);
      rep.within("a_hi - (e/2 + 1/(2e))", sol.a_hi - *fx.a_hi, 1e-5);
      rep.within("a_lo - 1", sol.a_lo - *fx.a_lo, 1e-4);
      auto ver = nad_verify(sol, fx.model, fx.prior);
      rep.add("nad_verify", std::max({ver.obedience, ver.foc, ver.boundary}), 1e-3, ver.pass);
      auto pool = pooling_test(fx.model, fx.prior);
      rep.add("pooling condition holds", pool.holds ? 1 : 0, 0, pool.holds);
    } else if (id == "quantile") {
      NadOptions opt;
      opt.steps = static_cast<int>(resolution) - 1;
      auto sol = nad_shoot(fx.model, fx.prior, Orientation::dipped, opt);
      auto ver = nad_verify(sol, fx.model, fx.prior);
      rep.within("obedience residual", ver.obedience, 1e-6);
      double et = 0.0;
      for (std::size_t k = 0; k < sol.a.size(); ++k) et = std::max(et, std::abs(sol.t1[k] - fx.t1(sol.a[k])));
      rep.within("max |t1 - closed form|", et, 1e-9);
      auto sl = sand_lever_assign(sol, fx.prior, fx.model, resolution);
      double ea = 0.0;
      const double kappa = fx.model.kappa;
      for (double a : linspace(*fx.a_lo, 1.0, 201)) {
        double tail = 0.0;
        for (const auto& en : sl.outcome.entries)
          if (sl.outcome.a_grid[static_cast<std::size_t>(en.a_index)] >= a - 1e-12) tail += en.mass;
        ea = std::max(ea, std::abs(tail - (1.0 - a) / kappa));
      }
      rep.within("max |alpha([a,1]) - (1-a)/kappa|", ea, 1e-3);
    } else if (id == "segpair") {
      std::size_t k = std::max<std::size_t>(1, (resolution - 1) / 4);
      auto pb = segpair_problem(fx, k);
      auto cert = certificate_from(fx.p, fx.q, pb);
      double worst = std::numeric_limits<double>::infinity(), on = 0.0, off = std::numeric_limits<double>::infinity();
      std::vector<Point> gamma;
      for (std::size_t i = 0; i < pb.a_grid.size(); ++i)
        for (std::size_t j = 0; j < pb.theta_grid.size(); ++j) {
          double r = d1_residual(cert, fx.model, i, j);
          worst = std::min(worst, r);
          if (fx.in_gamma(pb.a_grid[i], pb.theta_grid[j])) {
            on = std::max(on, std::abs(r));
            gamma.push_back({pb.a_grid[i], pb.theta_grid[j]});
          } else {
            off = std::min(off, r);
          }
        }
      rep.add("min D1 residual", worst, -1e-12, worst >= -1e-12);
      rep.within("max |D1 residual| on contact segments", on, 1e-9);
      rep.add("min D1 residual off contact segments", off, 0.0, off > 0.0);
      auto verdict = classify_dippedness(gamma);
      rep.facts["contact_dippedness"] = to_string(verdict.kind);
      rep.add("contact set single-dipped", verdict.kind == Dippedness::single_dipped, 0,
              verdict.kind == Dippedness::single_dipped);
    } else if (id == "contest") {
      const double lo = fx.prior.theta_min, hi = fx.prior.theta_max;
      auto pb = make_problem(fx.model, fx.prior, resolution, resolution);
      // Above 1 the best responses are decreasing in the state; use them as
      // the action grid so full disclosure is representable.
      if (lo >= 1.0) {
        pb.a_grid.clear();
        for (auto it = pb.theta_grid.rbegin(); it != pb.theta_grid.rend(); ++it)
          pb.a_grid.push_back(contest_action(*it));
      }
      auto run = run_lp(std::move(pb));
      rep.within("duality gap", duality_gap(run.solution), 1e-8);
      std::mt19937_64 rng(7);
      std::uniform_real_distribution<double> ut(lo, hi), ua(fx.model.rect.a_lo, fx.model.rect.a_hi);
      double terr = 0.0;
      for (int s = 0; s < 100; ++s) {
        double x[3] = {ut(rng), ut(rng), ut(rng)};
        std::sort(x, x + 3);
        terr = std::max(terr, std::abs(twist_determinant(fx.model, ua(rng), x[0], x[1], x[2]) -
                                       contest_twist_closed_form(x[0], x[1], x[2])));
      }
      rep.within("twist determinant - closed form", terr, 1e-10);
      auto verdict = classify_dippedness(support_points(run.solution.outcome));
      rep.facts["lp_dippedness"] = to_string(verdict.kind);
      if (lo >= 1.0) {
        auto fd = full_disclosure_test(fx.model, fx.prior);
        rep.add("full disclosure optimal", fd.holds, 0, fd.holds);
        bool diag = on_diagonal(run.solution.outcome, fx.model);
        rep.add("LP support on diagonal nodes", diag, 0, diag);
      } else if (fx.orientation) {
        auto sd = check_sdpd_conditions(fx.model, run.problem.a_grid, run.problem.theta_grid);
        bool dipped = *fx.orientation == Orientation::dipped;
        bool strict = dipped ? sd.strict_dipped : sd.strict_peaked;
        rep.add(std::string("strict ") + to_string(*fx.orientation) + " conditions", strict, 0, strict);
        bool shape = verdict.kind == *fx.dippedness || verdict.kind == Dippedness::both;
        rep.add(std::string("LP outcome ") + to_string(*fx.dippedness), shape, 0, shape);
        auto nest = nested_pairs(run.solution.outcome, *fx.orientation);
        rep.add("nested pairs", nest.nested, 0, nest.nested);
      }
    } else if (id == "foc_counterexample") {
      auto run = run_lp(make_problem(fx.model, fx.prior, aligned_resolution(resolution, 3), 0));
      const auto& pb = run.problem;
      rep.within("value", run.solution.value - *fx.value, 1e-8);
      rep.within("duality gap", duality_gap(run.solution), 1e-8);
      // The LP dual is not unique here; check that p = 0 is itself a certificate.
      std::vector<double> zero(pb.theta_grid.size(), 0.0);
      auto cert = select_q(zero, pb);
      double worst = d1_min_residual(cert, fx.model, pb.prior_mass);
      rep.add("p = 0 is dual feasible", worst, -1e-12, worst >= -1e-12);
      auto gamma = contact_set(cert, pb);
      int mismatches = 0;
      for (std::size_t i = 0; i < pb.a_grid.size(); ++i)
        for (std::size_t j = 0; j < pb.theta_grid.size(); ++j)
          if (gamma.in_gamma(i, j) != fx.in_gamma(pb.a_grid[i], pb.theta_grid[j])) ++mismatches;
      rep.add("contact set mismatches", mismatches, 0, mismatches == 0);
      auto sv = verify_support_optimality(run.solution.outcome, gamma);
      rep.add("LP support inside contact set", sv.offending.size(), 0, sv.pass);
      // The FOC pinned by the two pooled states fails at the third.
      auto qp = q_closed_form(fx.model, 0.0, 1.0 / 3.0, 1.0);
      double gap = std::abs(foc_value(fx.model, 0.0, 0.0, qp.q, qp.q_prime));
      rep.add("FOC inconsistent on Gamma_0", gap, 1e-6, gap > 1e-6);
      rep.add("Gamma*_0 is {0}", gamma.gamma_star[0].size() == 1, 0,
              gamma.gamma_star[0] == std::vector<int>{0});
    } else if (id == "no_single_crossing") {
      std::size_t n = aligned_resolution(resolution, 2);
      auto run = run_lp(make_problem(fx.model, fx.prior, n, 0));
      const auto& pb = run.problem;
      rep.within("value", run.solution.value - *fx.value, 1e-8);
      rep.within("duality gap", duality_gap(run.solution), 1e-8);
      auto sc = check_strict_single_crossing(fx.model, pb.a_grid, pb.theta_grid);
      rep.add("single crossing fails", !sc.pass, 0, !sc.pass, sc.message);
      std::vector<double> zero(pb.theta_grid.size(), 0.0);
      auto Qh = compute_Q(zero, pb.theta_grid, fx.model, 0.5, pb.prior_mass);
      rep.within("Q(1/2) lower", Qh.lo - 0.0, 1e-9);
      rep.within("Q(1/2) upper - 1", Qh.hi - 1.0, 1e-9);
      auto Ql = compute_Q(zero, pb.theta_grid, fx.model, 0.25, pb.prior_mass);
      auto Qu = compute_Q(zero, pb.theta_grid, fx.model, 0.75, pb.prior_mass);
      rep.within("Q(1/4) width", Ql.hi - Ql.lo, 1e-9);
      rep.within("Q(3/4) - 1", std::max(std::abs(Qu.lo - 1.0), std::abs(Qu.hi - 1.0)), 1e-9);
    } else if (id == "stability_limit") {
      auto pts = stability_limit_set(resolution);
      auto v = classify_dippedness(pts);
      rep.facts["limit_dippedness"] = to_string(v.kind);
      rep.add("limit set is neither", v.kind == Dippedness::neither, 0, v.kind == Dippedness::neither);
      bool witness = v.peaked_triple && v.peaked_triple->a1 == 0.5 && v.peaked_triple->theta1 == 0.0 &&
                     v.peaked_triple->theta2 == 0.5 && v.peaked_triple->theta3 == 1.0;
      rep.add("peaked witness at a = 1/2", witness, 0, witness);
      std::vector<Point> kept;
      for (const auto& p : pts)
        if (!(p.a == 0.5 && p.theta != 0.5)) kept.push_back(p);
      auto kv = classify_dippedness(kept);
      bool dipped = kv.kind == Dippedness::single_dipped || kv.kind == Dippedness::both;
      rep.facts["concentration_set_dippedness"] = to_string(kv.kind);
      rep.add("concentration set single-dipped", dipped, 0, dipped);
    } else if (id == "nad_discrete_fail") {
      auto run = run_lp(make_problem(fx.model, fx.prior, aligned_resolution(resolution, 6), 0));
      rep.within("value - 1", run.solution.value - *fx.value, 1e-8);
      rep.within("duality gap", duality_gap(run.solution), 1e-8);
      auto sup = support_points(run.solution.outcome);
      bool same = sup.size() == fx.points.size();
      for (std::size_t k = 0; same && k < sup.size(); ++k)
        same = detail::near(sup[k].a, fx.points[k].a) && detail::near(sup[k].theta, fx.points[k].theta);
      rep.add("LP support matches", same, 0, same);
      auto v = classify_dippedness(fx.points);
      rep.facts["support_dippedness"] = to_string(v.kind);
      rep.add("support is both single-dipped and single-peaked", v.kind == Dippedness::both, 0,
              v.kind == Dippedness::both);
      auto pool = pooling_test(fx.model, fx.prior);
      rep.add("pooling condition holds", pool.holds, 0, pool.holds);
      bool rejected = false;
      try {
        nad_shoot(fx.model, fx.prior, Orientation::dipped);
      } catch (const Error& err) {
        rejected = err.kind() == ErrorKind::PreconditionFailed;
      }
      rep.add("NAD shooter rejects atom prior", rejected, 0, rejected);
    }
  } catch (const Error& err) {
    throw Error(err.kind(), "fixture " + id + ": " + err.what());
  }
  return rep;
}

}  // namespace persuasion
