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
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "persuasion/core_model.hpp"
#include "persuasion/discretize_lp.hpp"
#include "persuasion/dual_contact.hpp"
#include "persuasion/error.hpp"
#include "persuasion/numeric.hpp"
#include "persuasion/structure.hpp"

namespace persuasion {

struct NadSolution {
  Orientation orientation = Orientation::dipped;
  double a_lo = 0.0, a_hi = 0.0;
  double h = 0.0;  // nominal mesh step
  std::vector<double> a, t1, t2, q;  // a increasing
  double matching_residual = 0.0;
  int bisection_steps = 0;
  bool closed_form = false;
};

struct NadOptions {
  int steps = 2000;
  double stop_gap = 1e-4;
  double bracket_tol = 1e-12;
  int max_bisections = 200;
  int scan_points = 64;
  int gap_refine = 4;  // integration steps per output mesh step
};

namespace detail {

inline void require_density(const Prior& prior) {
  if (!prior.is_density())
    throw Error(ErrorKind::PreconditionFailed,
                "NAD shooting needs a prior density; use the LP path for atom priors");
}

inline double prior_mean_action(const PreferenceModel& m, const Prior& prior) {
  auto grid = linspace(prior.theta_min, prior.theta_max, 4001);
  auto mass = prior_masses_on(prior, grid);
  std::vector<Atom> pts;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (mass[j] > 0.0) pts.push_back({grid[j], mass[j]});
  double total = 0.0;
  for (const auto& p : pts) total += p.mass;
  for (auto& p : pts) p.mass /= total;
  return receiver_best_response(m, Posterior{pts});
}

}  // namespace detail

// Derivatives (t1', t2') from the differentiated obedience condition and the
// consistency of q with its closed-form derivative.
inline std::array<double, 2> nad_rhs(const PreferenceModel& m, const Prior& prior, double a, double t1,
                                     double t2) {
  const double ha = 1e-6 * (m.rect.a_hi - m.rect.a_lo);
  const double ht = 1e-6 * (prior.theta_max - prior.theta_min);
  auto q = [&](double aa, double x1, double x2) { return q_closed_form(m, aa, x1, x2).q; };
  const double qa = (q(a + ha, t1, t2) - q(a - ha, t1, t2)) / (2.0 * ha);
  const double q1 = (q(a, t1 + ht, t2) - q(a, t1 - ht, t2)) / (2.0 * ht);
  const double q2 = (q(a, t1, t2 + ht) - q(a, t1, t2 - ht)) / (2.0 * ht);
  const double qp = q_closed_form(m, a, t1, t2).q_prime;
  const double m11 = m.u(a, t1) * prior.f(t1), m12 = -m.u(a, t2) * prior.f(t2);
  const double det = m11 * q2 - m12 * q1;
  if (!(std::abs(det) >= 1e-12)) throw Error(ErrorKind::SingularSystem, "NAD system is singular at a = " + format_double(a));
  const double rhs = qp - qa;
  return {-m12 * rhs / det, m11 * rhs / det};
}

namespace detail {

struct ShotResult {
  std::vector<double> a, t1, t2;
  double signed_residual = 0.0;
  double matching_residual = 0.0;
};

// RK4 from the extreme pair (theta_min, theta_max) at a_start toward lower
// actions (dipped) or higher actions (peaked), with the gap t2 - t1 as the
// independent variable; it stays regular where the pair closes on theta*(a).
// Rejected steps are halved. Stops at the gap threshold or when either state
// reaches theta*(a).
inline ShotResult shoot_once(const PreferenceModel& m, const Prior& prior, Orientation orient, double a_start,
                             const NadOptions& opt) {
  const double dir = orient == Orientation::dipped ? -1.0 : 1.0;
  ShotResult r;
  double a = a_start, y1 = prior.theta_min, y2 = prior.theta_max;
  r.a.push_back(a);
  r.t1.push_back(y1);
  r.t2.push_back(y2);
  // d(a, t1, t2)/d(gap) with the gap shrinking.
  auto field = [&](double aa, double x1, double x2) {
    auto d = nad_rhs(m, prior, aa, x1, x2);
    double rate = dir * (d[1] - d[0]);  // d gap / d step direction
    if (!(rate < 0.0)) throw Error(ErrorKind::SingularSystem, "gap does not shrink");
    return std::array<double, 3>{dir / -rate, dir * d[0] / -rate, dir * d[1] / -rate};
  };
  auto valid = [&](double aa, double x1, double x2) {
    if (!std::isfinite(aa) || !std::isfinite(x1) || !std::isfinite(x2)) return false;
    if (x1 < prior.theta_min - 1e-12 || x2 > prior.theta_max + 1e-12) return false;
    double ts;
    try {
      ts = theta_star(m, aa);
    } catch (const Error&) {
      return false;
    }
    return x1 < ts && x2 > ts;
  };
  const double gap0 = y2 - y1;
  double step = (gap0 - opt.stop_gap) / (static_cast<double>(opt.steps) * opt.gap_refine);
  const double min_step = 1e-13 * gap0;
  const std::size_t cap = static_cast<std::size_t>(opt.steps) * opt.gap_refine * 4 + 1000;
  while (r.a.size() < cap) {
    double gap = y2 - y1;
    if (gap <= opt.stop_gap * (1.0 + 1e-9)) break;
    double s = std::min(step, gap - opt.stop_gap);
    double na = 0.0, n1 = 0.0, n2 = 0.0;
    bool ok = false;
    try {
      auto k1 = field(a, y1, y2);
      auto k2 = field(a + s / 2 * k1[0], y1 + s / 2 * k1[1], y2 + s / 2 * k1[2]);
      auto k3 = field(a + s / 2 * k2[0], y1 + s / 2 * k2[1], y2 + s / 2 * k2[2]);
      auto k4 = field(a + s * k3[0], y1 + s * k3[1], y2 + s * k3[2]);
      na = a + s / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      n1 = y1 + s / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      n2 = y2 + s / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
      ok = valid(na, n1, n2);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      step *= 0.5;
      if (step < min_step) break;
      continue;
    }
    a = na;
    y1 = n1;
    y2 = n2;
    r.a.push_back(a);
    r.t1.push_back(y1);
    r.t2.push_back(y2);
  }
  double ts = a;
  try {
    ts = theta_star(m, a);
  } catch (const Error&) {
  }
  r.signed_residual = (y1 - ts) + (y2 - ts);
  r.matching_residual = std::max(std::abs(y1 - ts), std::abs(y2 - ts));
  return r;
}

}  // namespace detail

// Closed-form quantile solution: kappa F(t1) = (1 - kappa)(1 - F(a)), t2 = a.
inline NadSolution nad_quantile(const PreferenceModel& m, const Prior& prior, const NadOptions& opt = {}) {
  detail::require_density(prior);
  const double kappa = m.kappa;
  auto invF = [&](double target) {
    double lo = prior.theta_min, hi = prior.theta_max;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      double mid = 0.5 * (lo + hi);
      (prior.F(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  NadSolution s;
  s.orientation = Orientation::dipped;
  s.closed_form = true;
  s.a_lo = invF(1.0 - kappa);
  s.a_hi = prior.theta_max;
  s.a = linspace(s.a_lo, s.a_hi, static_cast<std::size_t>(opt.steps) + 1);
  s.h = (s.a_hi - s.a_lo) / opt.steps;
  for (double a : s.a) {
    double target = std::clamp((1.0 - kappa) * (1.0 - prior.F(a)) / kappa, 0.0, 1.0);
    s.t1.push_back(std::min(invF(target), a));
    s.t2.push_back(a);
    s.q.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  s.matching_residual = std::abs(s.t1.front() - s.t2.front());
  return s;
}

inline NadSolution nad_shoot(const PreferenceModel& m, const Prior& prior, Orientation orient,
                             const NadOptions& opt = {}) {
  detail::require_density(prior);
  if (m.family == Family::quantile) {
    if (orient != Orientation::dipped)
      throw Error(ErrorKind::PreconditionFailed, "quantile outcomes are single-dipped");
    return nad_quantile(m, prior, opt);
  }
  const double a_mid = detail::prior_mean_action(m, prior);
  const double a_far = full_disclosure_action(m, orient == Orientation::dipped ? prior.theta_max : prior.theta_min);
  auto residual = [&](double a_start) { return detail::shoot_once(m, prior, orient, a_start, opt); };
  double lo = std::min(a_mid, a_far), hi = std::max(a_mid, a_far);
  double rlo = residual(lo).signed_residual, rhi = residual(hi).signed_residual;
  if ((rlo > 0.0) == (rhi > 0.0)) {
    // Refine the bracket with a uniform scan before giving up.
    bool found = false;
    double prev_a = lo, prev_r = rlo;
    for (int k = 1; k <= opt.scan_points && !found; ++k) {
      double a = lo + (hi - lo) * k / (opt.scan_points + 1.0);
      double r = residual(a).signed_residual;
      if ((r > 0.0) != (prev_r > 0.0)) {
        lo = prev_a;
        hi = a;
        rlo = prev_r;
        rhi = r;
        found = true;
      }
      prev_a = a;
      prev_r = r;
    }
    if (!found)
      throw Error(ErrorKind::BracketFailure, "matching residual has one sign on the bracket: " + format_double(rlo) +
                                                 ", " + format_double(rhi));
  }
  int it = 0;
  for (; it < opt.max_bisections && hi - lo > opt.bracket_tol * (1.0 + std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    double r = residual(mid).signed_residual;
    if ((r > 0.0) == (rlo > 0.0)) {
      lo = mid;
      rlo = r;
    } else {
      hi = mid;
      rhi = r;
    }
  }
  // The endpoint whose trajectory closes most tightly.
  auto slo = residual(lo), shi = residual(hi);
  auto shot = slo.matching_residual <= shi.matching_residual ? slo : shi;
  if (orient == Orientation::dipped) {
    std::reverse(shot.a.begin(), shot.a.end());
    std::reverse(shot.t1.begin(), shot.t1.end());
    std::reverse(shot.t2.begin(), shot.t2.end());
  }

  // Resample onto a uniform action mesh; a is monotone along the trajectory.
  NadSolution s;
  s.orientation = orient;
  s.bisection_steps = it;
  s.matching_residual = shot.matching_residual;
  s.a_lo = shot.a.front();
  s.a_hi = shot.a.back();
  s.h = (s.a_hi - s.a_lo) / opt.steps;
  s.a = linspace(s.a_lo, s.a_hi, static_cast<std::size_t>(opt.steps) + 1);
  for (double a : s.a) {
    s.t1.push_back(interp(shot.a, shot.t1, a));
    s.t2.push_back(interp(shot.a, shot.t2, a));
  }
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    double qq = std::numeric_limits<double>::quiet_NaN();
    try {
      qq = q_closed_form(m, s.a[k], s.t1[k], s.t2[k]).q;
    } catch (const Error&) {
    }
    s.q.push_back(qq);
  }
  return s;
}

struct NadReport {
  double obedience = 0.0;  // max per-cell |sum u mass| / cell mass
  double foc = 0.0;        // max |FOC| at t1 and t2 (NaN when not applicable)
  double boundary = 0.0;   // max boundary mismatch
  bool pass = false;
};

inline NadReport nad_verify(const NadSolution& s, const PreferenceModel& m, const Prior& prior, double tol = 1e-3) {
  NadReport rep;
  const bool quantile = m.family == Family::quantile;
  for (std::size_t k = 0; k + 1 < s.a.size(); ++k) {
    // Interval of states that the cell [a_k, a_k+1] receives on each side.
    double b1 = std::min(s.t1[k], s.t1[k + 1]), e1 = std::max(s.t1[k], s.t1[k + 1]);
    double b2 = std::min(s.t2[k], s.t2[k + 1]), e2 = std::max(s.t2[k], s.t2[k + 1]);
    double a = quantile ? s.a[k] : 0.5 * (s.a[k] + s.a[k + 1]);
    double mass = (prior.F(e1) - prior.F(b1)) + (prior.F(e2) - prior.F(b2));
    if (!(mass > 0.0)) continue;
    double mom;
    if (quantile) {
      mom = -m.kappa * (prior.F(e1) - prior.F(b1)) + (1.0 - m.kappa) * (prior.F(e2) - prior.F(b2));
    } else {
      auto g = [&](double t) { return m.u(a, t) * prior.f(t); };
      mom = integrate(g, b1, e1, 4) + integrate(g, b2, e2, 4);
    }
    rep.obedience = std::max(rep.obedience, std::abs(mom) / mass);
  }
  if (quantile) {
    rep.foc = std::numeric_limits<double>::quiet_NaN();
  } else {
    // Interior mesh points, away from the degenerate closing pair.
    for (std::size_t k = 1; k + 1 < s.a.size(); ++k) {
      if (!std::isfinite(s.q[k - 1]) || !std::isfinite(s.q[k + 1]) || s.t2[k] - s.t1[k] < 1e-2) continue;
      double qp = (s.q[k + 1] - s.q[k - 1]) / (s.a[k + 1] - s.a[k - 1]);
      rep.foc = std::max({rep.foc, std::abs(foc_value(m, s.a[k], s.t1[k], s.q[k], qp)),
                          std::abs(foc_value(m, s.a[k], s.t2[k], s.q[k], qp))});
    }
  }
  const bool dipped = s.orientation == Orientation::dipped;
  std::size_t open = dipped ? s.a.size() - 1 : 0, close = dipped ? 0 : s.a.size() - 1;
  double ts = theta_star(m, s.a[close]);
  rep.boundary = std::max({std::abs(s.t1[open] - prior.theta_min), std::abs(s.t2[open] - prior.theta_max),
                           std::abs(s.t1[close] - ts), std::abs(s.t2[close] - ts)});
  rep.pass = rep.obedience <= tol && rep.boundary <= tol && (quantile || rep.foc <= tol);
  return rep;
}

struct SandLeverResult {
  Outcome outcome;
  double tracking_error = 0.0;   // max |theta drawn - t1(a)| over levers
  double max_deficit = 0.0;      // largest unbalanced mass folded back into disclosure
  std::size_t levers = 0;
};

// Assigns prior mass on a uniform state mesh from the top down: each upper
// node feeds the lever a = t2^-1(theta), balanced by mass drawn from the lowest
// unused nodes so that every lever's obedience moment vanishes exactly. Nodes
// left over are disclosed.
inline SandLeverResult sand_lever_assign(const NadSolution& s, const Prior& prior, const PreferenceModel& m,
                                         std::size_t theta_nodes = 2001) {
  detail::require_density(prior);
  auto grid = linspace(prior.theta_min, prior.theta_max, theta_nodes);
  auto budget = prior_masses_on(prior, grid);
  const double mesh = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
  double fmax = 0.0;
  for (double t : grid) fmax = std::max(fmax, prior.f(t));
  const double slack = 1e-9 + mesh * fmax;

  // t2 and t1 as functions of the action, and t2^-1 as a function of the state.
  std::vector<double> t2s = s.t2, as = s.a, t1s = s.t1;
  if (t2s.front() > t2s.back()) {
    std::reverse(t2s.begin(), t2s.end());
    std::reverse(as.begin(), as.end());
    std::reverse(t1s.begin(), t1s.end());
  }
  const double meet = std::min(s.t2.front(), s.t2.back());

  std::map<double, std::map<int, double>> assigned;  // action -> theta index -> mass
  SandLeverResult res;
  std::size_t left = 0;
  for (std::size_t jj = grid.size(); jj-- > 0;) {
    const double th = grid[jj];
    if (th <= meet || jj <= left) break;
    double a = interp(t2s, as, th);
    double target_t1 = interp(t2s, t1s, th);
    double top_u = m.u(a, th);
    if (!(top_u > 0.0) || budget[jj] <= 0.0) continue;
    double need = top_u * budget[jj];  // moment to offset
    double used_top = budget[jj];
    std::vector<std::pair<std::size_t, double>> draws;
    while (need > 0.0 && left < jj) {
      double ul = m.u(a, grid[left]);
      if (!(ul < 0.0)) break;
      double take = std::min(budget[left], need / -ul);
      if (take > 0.0) {
        draws.push_back({left, take});
        res.tracking_error = std::max(res.tracking_error, std::abs(grid[left] - target_t1));
      }
      need -= take * -ul;
      budget[left] -= take;
      if (budget[left] <= 1e-18 * (1.0 + take) || take == 0.0) {
        budget[left] = 0.0;
        ++left;
      }
    }
    if (need > 0.0) {
      // Unbalanced top mass stays behind for disclosure.
      double excess = need / top_u;
      if (excess > slack) throw Error(ErrorKind::BudgetExhausted, "no balancing mass left below state " + format_double(th));
      res.max_deficit = std::max(res.max_deficit, excess);
      used_top -= excess;
    }
    budget[jj] -= used_top;
    if (used_top > 0.0) {
      auto& cell = assigned[a];
      cell[static_cast<int>(jj)] += used_top;
      for (auto [idx, w] : draws) cell[static_cast<int>(idx)] += w;
      ++res.levers;
    }
  }
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (budget[j] > 1e-18) assigned[full_disclosure_action(m, grid[j])][static_cast<int>(j)] += budget[j];

  Outcome& o = res.outcome;
  o.theta_grid = grid;
  int ai = 0;
  for (const auto& [a, cell] : assigned) {
    o.a_grid.push_back(a);
    for (const auto& [j, w] : cell)
      if (w > 0.0) o.entries.push_back({ai, j, w});
    ++ai;
  }
  o.sort_entries();
  return res;
}

}  // namespace persuasion
