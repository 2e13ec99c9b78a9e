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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "persuasion.hpp"

using namespace persuasion;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// A failing check inside a criterion still yields exactly one line.
template <class F>
void criterion(const std::string& name, F&& body) {
  try {
    std::ostringstream detail;
    bool pass = body(detail);
    report(name, pass, detail.str());
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

struct Case {
  std::string id;
  Params params;
};

void strong_duality() {
  criterion("strong duality at 201x201", [](std::ostringstream& d) {
    std::vector<Case> cases;
    for (const auto& id : fixture_ids())
      if (id != "contest") cases.push_back({id, {}});
    for (auto [lo, hi] : {std::pair{0.2, 0.5}, std::pair{0.6, 0.9}, std::pair{1.1, 2.0}})
      cases.push_back({"contest", {{"lo", lo}, {"hi", hi}}});
    double worst_gap = 0.0, worst_time = 0.0;
    std::string worst_id;
    for (const auto& c : cases) {
      auto fx = fixture(c.id, c.params);
      auto t0 = std::chrono::steady_clock::now();
      auto sol = solve_problem(make_problem(fx.model, fx.prior, 201, 201));
      double t = seconds_since(t0), gap = duality_gap(sol);
      if (gap >= worst_gap) worst_gap = gap, worst_id = c.id;
      worst_time = std::max(worst_time, t);
    }
    d << cases.size() << " solves, max gap " << fmt(worst_gap) << " (" << worst_id << "), max time "
      << fmt(worst_time) << " s";
    return worst_gap <= 1e-8 && worst_time <= 60.0;
  });
}

void example_one() {
  criterion("example one value, Q(0.7), contact set", [](std::ostringstream& d) {
    auto fx = fixture("e1");
    auto pb = make_problem(fx.model, fx.prior, 201, 201);
    auto sol = solve_problem(pb);
    auto cert = select_q(sol.dual_row_prices, pb);
    auto Q = compute_Q(sol.dual_row_prices, pb.theta_grid, fx.model, 0.7, pb.prior_mass);
    auto g = contact_set(cert, pb);
    int mismatches = 0;
    for (std::size_t i = 0; i < pb.a_grid.size(); ++i)
      for (std::size_t j = 0; j < pb.theta_grid.size(); ++j) {
        double a = pb.a_grid[i], t = pb.theta_grid[j];
        bool expected = (a <= 0.5 + 1e-12 && (t == 0.0 || t == 0.5)) || (a == 1.0 && t == 1.0);
        if (g.in_gamma(i, j) != expected) ++mismatches;
      }
    double ev = std::abs(sol.value - 1.0 / 12.0);
    double eq = std::max(std::abs(Q.lo - 0.2), std::abs(Q.hi - 0.7));
    d << "|value - 1/12| " << fmt(ev) << ", Q(0.7) error " << fmt(eq) << ", contact mismatches " << mismatches;
    return ev <= 1e-8 && eq <= 1e-9 && mismatches == 0;
  });
}

void reciprocal() {
  criterion("reciprocal example NAD and LP value", [](std::ostringstream& d) {
    auto fx = fixture("rs");
    NadOptions opt;
    opt.steps = 2000;
    auto s = nad_shoot(fx.model, fx.prior, Orientation::dipped, opt);
    double e1 = 0.0, e2 = 0.0, eq = 0.0;
    for (std::size_t k = 0; k < s.a.size(); ++k) {
      double a = s.a[k], r = std::sqrt(std::max(0.0, a * a - 1.0));
      e1 = std::max(e1, std::abs(s.t1[k] - (a - r)));
      e2 = std::max(e2, std::abs(s.t2[k] - (a + r)));
      if (std::isfinite(s.q[k])) eq = std::max(eq, std::abs(s.q[k] - a));
    }
    const double e = std::exp(1.0);
    double ea = std::abs(s.a_hi - (e / 2.0 + 1.0 / (2.0 * e)));
    auto sol = solve_problem(make_problem(fx.model, fx.prior, 401, 401));
    double sand = value_under(sand_lever_assign(s, fx.prior, fx.model).outcome, fx.model);
    double ev = std::abs(sol.value - sand);
    d << "t1 " << fmt(e1) << ", t2 " << fmt(e2) << ", q " << fmt(eq) << ", a_hi " << fmt(ea) << ", LP 401 "
      << sol.value << " vs sand lever " << sand;
    return e1 <= 1e-4 && e2 <= 1e-4 && eq <= 1e-4 && ea <= 1e-5 && ev <= 5e-3;
  });
}

void quantile() {
  criterion("quantile sand lever tail mass and obedience", [](std::ostringstream& d) {
    auto fx = fixture("quantile", {{"kappa", 0.5}});
    NadOptions opt;
    opt.steps = 2000;
    auto s = nad_shoot(fx.model, fx.prior, Orientation::dipped, opt);
    auto ver = nad_verify(s, fx.model, fx.prior);
    auto sl = sand_lever_assign(s, fx.prior, fx.model, 2001);
    double ea = 0.0;
    for (double a : linspace(0.5, 1.0, 201)) {
      double tail = 0.0;
      for (const auto& e : sl.outcome.entries)
        if (sl.outcome.a_grid[static_cast<std::size_t>(e.a_index)] >= a - 1e-12) tail += e.mass;
      ea = std::max(ea, std::abs(tail - 2.0 * (1.0 - a)));
    }
    d << "tail error " << fmt(ea) << ", obedience residual " << fmt(ver.obedience);
    return ea <= 1e-3 && ver.obedience <= 1e-6;
  });
}

void segpair() {
  criterion("segpair certificate and contact set", [](std::ostringstream& d) {
    auto fx = fixture("segpair");
    auto pb = segpair_problem(fx, 150);
    auto cert = certificate_from(fx.p, fx.q, pb);
    double worst = std::numeric_limits<double>::infinity(), on = 0.0;
    std::vector<Point> gamma;
    for (std::size_t i = 0; i < pb.a_grid.size(); ++i)
      for (std::size_t j = 0; j < pb.theta_grid.size(); ++j) {
        double r = d1_residual(cert, fx.model, i, j);
        worst = std::min(worst, r);
        if (fx.in_gamma(pb.a_grid[i], pb.theta_grid[j])) {
          on = std::max(on, std::abs(r));
          gamma.push_back({pb.a_grid[i], pb.theta_grid[j]});
        }
      }
    std::mt19937_64 rng(20261019);
    std::uniform_real_distribution<double> U(-1.0, 3.0);
    int probes = 0, tight = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    while (probes < 1000) {
      double a = U(rng), t = U(rng);
      if (fx.in_gamma(a, t)) continue;
      ++probes;
      double r = fx.p(t) - fx.model.V(a, t) - fx.q(a) * fx.model.u(a, t);
      min_slack = std::min(min_slack, r);
      worst = std::min(worst, r);
      if (r < 1e-6) ++tight;
    }
    auto kind = classify_dippedness(gamma).kind;
    d << "min residual " << fmt(worst) << ", on-segment " << fmt(on) << ", min probe slack " << fmt(min_slack)
      << " (" << tight << "/1000 below 1e-6), contact set " << to_string(kind);
    return worst >= -1e-12 && on <= 1e-9 && tight == 0 && kind == Dippedness::single_dipped;
  });
}

void contest() {
  criterion("contest thresholds and twist closed form", [](std::ostringstream& d) {
    bool ok = true;
    for (auto [lo, hi] : {std::pair{1.1, 2.0}, std::pair{0.2, 0.5}, std::pair{0.6, 0.9}}) {
      auto rep = run_fixture("contest", 201, {{"lo", lo}, {"hi", hi}});
      d << "[" << lo << "," << hi << "]";
      for (const auto& c : rep.checks) {
        if (!c.pass) d << " failed " << c.name << " (" << fmt(c.measured) << ")";
      }
      if (rep.facts.count("lp_dippedness")) d << " " << rep.facts.at("lp_dippedness");
      d << (rep.pass() ? " ok; " : " FAIL; ");
      ok = ok && rep.pass();
    }
    // Independent twist check on 100 random triples.
    auto m = make_contest(0.2, 0.9);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ut(0.2, 0.9), ua(m.rect.a_lo, m.rect.a_hi);
    double terr = 0.0;
    for (int k = 0; k < 100; ++k) {
      double x[3] = {ut(rng), ut(rng), ut(rng)};
      std::sort(x, x + 3);
      double closed = (x[2] - x[1]) * (x[2] - x[0]) * (x[1] - x[0]) *
                      (1.0 - x[1] * x[2] - x[0] * x[2] - x[0] * x[1]) / (x[0] * x[1] * x[2]);
      terr = std::max(terr, std::abs(twist_determinant(m, ua(rng), x[0], x[1], x[2]) - closed));
    }
    d << "twist error " << fmt(terr);
    return ok && terr <= 1e-10;
  });
}

constexpr std::size_t kPairwiseActions = 801;

void pairwise() {
  criterion("pairwise conditionals and pairwise_split", [](std::ostringstream& d) {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::size_t widest = 0, widest_raw = 0;
    int models = 0;
    for (; models < 50; ++models) {
      // V = a (alpha theta + beta theta^2) - gamma a^2 / 2: v is strictly convex in theta
      // and |S| = beta times a Vandermonde product, so the twist holds.
      const double alpha = 2.0 * U(rng) - 1.0, beta = 0.2 + U(rng), gamma = 2.0 * U(rng);
      auto m = make_simple_receiver(
          [=](double a, double t) { return a * (alpha * t + beta * t * t) - 0.5 * gamma * a * a; },
          [=](double a, double t) { return alpha * t + beta * t * t - gamma * a; }, Rect{0.0, 1.0, 0.0, 1.0},
          [=](double, double t) { return alpha + 2.0 * beta * t; }, [=](double, double) { return -gamma; });
      std::vector<Atom> atoms;
      double total = 0.0;
      for (int k = 0; k < 5; ++k) {
        double w = 0.1 + U(rng);
        atoms.push_back({(k + 0.1 + 0.8 * U(rng)) / 5.0, w});
        total += w;
      }
      for (auto& at : atoms) at.mass /= total;
      atoms.front().theta = 0.0;
      atoms.back().theta = 1.0;
      // The action grid must resolve the pooled actions; coarser grids can put a
      // three-state conditional on the node between two optimal actions.
      auto pb = make_problem(m, atom_prior(atoms), kPairwiseActions, 0);
      if (!check_twist(m, pb.a_grid, pb.theta_grid).ok) throw std::runtime_error("twist fails on a generated model");
      auto sol = solve_problem(pb);
      auto g = contact_set(select_q(sol.dual_row_prices, pb), pb);
      for (const auto& [ai, cond] : sol.outcome.conditionals()) {
        widest_raw = std::max(widest_raw, cond.size());
        std::size_t kept = 0;
        for (const auto& [tj, w] : cond)
          if (g.in_gamma_star(static_cast<std::size_t>(ai), static_cast<std::size_t>(tj))) ++kept;
        widest = std::max(widest, std::min(cond.size(), std::max<std::size_t>(kept, 1)));
      }
    }
    // pairwise_split on random posteriors with up to six states.
    auto contest = make_contest(0.2, 0.9);
    auto recv = make_separable_receiver(poly_curve({0.0, 0.5, 1.0}), Rect{0.0, 1.0, 0.0, 1.0});
    double br = 0.0, mix = 0.0;
    for (int k = 0; k < 100; ++k) {
      const PreferenceModel& m = k % 2 ? contest : recv;
      const double lo = m.rect.theta_lo, hi = m.rect.theta_hi;
      int n = 2 + static_cast<int>(U(rng) * 5.0);
      std::vector<double> ts;
      while (static_cast<int>(ts.size()) < n) {
        double t = lo + (hi - lo) * U(rng);
        if (std::none_of(ts.begin(), ts.end(), [&](double x) { return std::abs(x - t) < 1e-6; })) ts.push_back(t);
      }
      std::vector<Atom> pts;
      double total = 0.0;
      for (double t : ts) {
        double w = 0.05 + U(rng);
        pts.push_back({t, w});
        total += w;
      }
      for (auto& p : pts) p.mass /= total;
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += pts[i].mass;
      pts.back().mass = 1.0 - s;
      auto mu = make_posterior(pts);
      double a = receiver_best_response(m, mu);
      auto pieces = pairwise_split(m, mu);
      for (const auto& pc : pieces) {
        if (pc.posterior.points.size() > 2) br = std::numeric_limits<double>::infinity();
        br = std::max(br, std::abs(receiver_best_response(m, pc.posterior) - a));
      }
      for (const auto& at : mu.points) {
        double got = 0.0;
        for (const auto& pc : pieces)
          for (const auto& q : pc.posterior.points)
            if (q.theta == at.theta) got += pc.weight * q.mass;
        mix = std::max(mix, std::abs(got - at.mass));
      }
    }
    d << models << " models on " << kPairwiseActions << " actions, max conditional support " << widest << " after reconditioning (" << widest_raw
      << " raw); split best-response error " << fmt(br) << ", mixture error " << fmt(mix);
    return widest <= 2 && br <= 1e-9 && mix <= 1e-12;
  });
}

void refinement() {
  criterion("grid refinement of duals and basis independence", [](std::ostringstream& d) {
    bool ok = true;
    for (const Case& c : {Case{"rs", {}}, Case{"contest", {{"lo", 0.2}, {"hi", 0.5}}}}) {
      auto fx = fixture(c.id, c.params);
      std::vector<LpSolution> sols;
      std::vector<DiscreteProblem> pbs;
      for (std::size_t n : {101, 201, 401}) {
        pbs.push_back(make_problem(fx.model, fx.prior, n, n));
        sols.push_back(solve_problem(pbs.back()));
      }
      // Nodes of the 101 grid are every second node of 201 and every fourth of 401.
      double dp = 0.0;
      for (std::size_t j = 0; j < pbs[0].theta_grid.size(); ++j) {
        if (pbs[0].prior_mass[j] <= 0.0) continue;
        double p0 = sols[0].dual_row_prices[j], p1 = sols[1].dual_row_prices[2 * j],
               p2 = sols[2].dual_row_prices[4 * j];
        dp = std::max({dp, std::abs(p0 - p1), std::abs(p1 - p2), std::abs(p0 - p2)});
      }
      // Second basis: same LP with shuffled column order.
      const auto& pb = pbs[1];
      auto primal = build_primal(pb);
      std::vector<std::size_t> perm(static_cast<std::size_t>(primal.lp.num_cols()));
      std::iota(perm.begin(), perm.end(), 0);
      std::mt19937_64 rng(17);
      std::shuffle(perm.begin(), perm.end(), rng);
      PrimalLp shuffled = primal;
      for (std::size_t k = 0; k < perm.size(); ++k) {
        shuffled.lp.cols[k] = primal.lp.cols[perm[k]];
        shuffled.lp.c[k] = primal.lp.c[perm[k]];
        shuffled.col_a[k] = primal.col_a[perm[k]];
        shuffled.col_theta[k] = primal.col_theta[perm[k]];
      }
      auto alt = solve_lp(shuffled, pb);
      auto m1 = sols[1].outcome.action_marginal(), m2 = alt.outcome.action_marginal();
      double dm = 0.0;
      for (std::size_t i = 0; i < m1.size(); ++i) dm = std::max(dm, std::abs(m1[i] - m2[i]));
      d << c.id << ": dual spread " << fmt(dp) << ", marginal difference " << fmt(dm) << "; ";
      ok = ok && dp <= 1e-3 && dm <= 1e-6;
    }
    return ok;
  });
}

}  // namespace

int main() {
  strong_duality();
  example_one();
  reciprocal();
  quantile();
  segpair();
  contest();
  pairwise();
  refinement();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
