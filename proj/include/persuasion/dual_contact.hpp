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
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "persuasion/core_model.hpp"
#include "persuasion/discretize_lp.hpp"
#include "persuasion/error.hpp"

namespace persuasion {

enum class QRule { type1_contact, midpoint, supplied };

inline const char* to_string(QRule r) {
  switch (r) {
    case QRule::type1_contact: return "type1_contact";
    case QRule::midpoint: return "midpoint";
    case QRule::supplied: return "supplied";
  }
  return "midpoint";
}

struct QInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct DualCertificate {
  std::vector<double> a_grid, theta_grid;
  std::vector<double> p, q, Q_lo, Q_hi;
  std::vector<QRule> rule;
};

inline double default_contact_tolerance(const DiscreteProblem& pb) {
  double vmax = 0.0;
  for (double a : pb.a_grid)
    for (double t : pb.theta_grid) vmax = std::max(vmax, std::abs(pb.model.V(a, t)));
  return 1e-7 * (1.0 + vmax);
}

// Multipliers r with p(theta) >= V(a, theta) + r u(a, theta) on every node
// that carries prior mass (all nodes when `mass` is empty).
inline QInterval compute_Q(const std::vector<double>& p, const std::vector<double>& theta_grid,
                           const PreferenceModel& m, double a,
                           const std::vector<double>& mass = {}) {
  QInterval q;
  bool broken = false;
  // Same rounding floor on u as the primal builder.
  double umax = 0.0;
  for (std::size_t j = 0; j < theta_grid.size(); ++j)
    if (mass.empty() || mass[j] > 0.0) umax = std::max(umax, std::abs(m.u(a, theta_grid[j])));
  for (std::size_t j = 0; j < theta_grid.size(); ++j) {
    if (!mass.empty() && mass[j] <= 0.0) continue;
    double t = theta_grid[j];
    double uu = m.u(a, t), VV = m.V(a, t);
    if (std::abs(uu) <= 1e-13 * umax) uu = 0.0;
    if (uu < 0.0) {
      q.lo = std::max(q.lo, (VV - p[j]) / (-uu));
    } else if (uu > 0.0) {
      q.hi = std::min(q.hi, (p[j] - VV) / uu);
    } else if (p[j] < VV - 1e-8 * (1.0 + std::abs(VV))) {
      broken = true;
    }
  }
  if (!broken && q.lo > q.hi) {
    // Bounds divided by small |u| amplify noise in p; judge the crossing by
    // the worst residual at the midpoint instead.
    double r = 0.5 * (q.lo + q.hi), worst = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < theta_grid.size(); ++j) {
      if (!mass.empty() && mass[j] <= 0.0) continue;
      double VV = m.V(a, theta_grid[j]);
      worst = std::min(worst, p[j] - VV - r * m.u(a, theta_grid[j]));
      scale = std::max(scale, std::abs(VV));
    }
    if (worst >= -1e-8 * scale) return {r, r};
  }
  if (broken || q.lo > q.hi)
    throw Error(ErrorKind::EmptyQ, "no feasible multiplier at a = " + format_double(a) + " [" +
                                       format_double(q.lo) + ", " + format_double(q.hi) + "]");
  return q;
}

inline double q_midpoint(const QInterval& Q) {
  bool flo = std::isfinite(Q.lo), fhi = std::isfinite(Q.hi);
  if (flo && fhi) return 0.5 * (Q.lo + Q.hi);
  // Half-lines: step inside so the endpoint does not manufacture a contact.
  if (flo) return Q.lo + 1.0 + std::abs(Q.lo);
  if (fhi) return Q.hi - 1.0 - std::abs(Q.hi);
  return 0.0;
}

// Two-branch selection: the contact formula at the disclosed state when it
// binds, the midpoint of Q(a) otherwise.
inline DualCertificate select_q(const std::vector<double>& p, const DiscreteProblem& pb,
                                double eps_gamma = -1.0) {
  if (eps_gamma <= 0.0) eps_gamma = default_contact_tolerance(pb);
  const PreferenceModel& m = pb.model;
  DualCertificate c;
  c.a_grid = pb.a_grid;
  c.theta_grid = pb.theta_grid;
  c.p = p;
  const std::size_t na = pb.a_grid.size();
  c.q.resize(na);
  c.Q_lo.resize(na);
  c.Q_hi.resize(na);
  c.rule.resize(na);
  for (std::size_t i = 0; i < na; ++i) {
    const double a = pb.a_grid[i];
    QInterval Q = compute_Q(p, pb.theta_grid, m, a, pb.prior_mass);
    c.Q_lo[i] = Q.lo;
    c.Q_hi[i] = Q.hi;
    c.rule[i] = QRule::midpoint;
    c.q[i] = q_midpoint(Q);
    double ts;
    try {
      ts = theta_star(m, a);
    } catch (const Error&) {
      continue;
    }
    auto node = pb.node_for(ts);
    if (!node) continue;
    std::size_t j = *node;
    if (pb.prior_mass[j] <= 0.0) continue;
    if (std::abs(p[j] - m.V(a, pb.theta_grid[j])) > eps_gamma) continue;
    double ua = m.u_a(a, ts);
    if (ua == 0.0) continue;
    double qq = -m.v(a, ts) / ua;
    if (std::isfinite(Q.lo)) qq = std::max(qq, Q.lo);
    if (std::isfinite(Q.hi)) qq = std::min(qq, Q.hi);
    c.q[i] = qq;
    c.rule[i] = QRule::type1_contact;
  }
  return c;
}

// Certificate from closed-form p and q evaluated on the problem grids.
inline DualCertificate certificate_from(const Fn1& p, const Fn1& q, const DiscreteProblem& pb) {
  DualCertificate c;
  c.a_grid = pb.a_grid;
  c.theta_grid = pb.theta_grid;
  for (double t : pb.theta_grid) c.p.push_back(p(t));
  for (double a : pb.a_grid) {
    c.q.push_back(q(a));
    QInterval Q;
    try {
      Q = compute_Q(c.p, pb.theta_grid, pb.model, a, pb.prior_mass);
    } catch (const Error&) {
      Q.lo = std::numeric_limits<double>::quiet_NaN();
      Q.hi = Q.lo;
    }
    c.Q_lo.push_back(Q.lo);
    c.Q_hi.push_back(Q.hi);
    c.rule.push_back(QRule::supplied);
  }
  return c;
}

inline double d1_residual(const DualCertificate& c, const PreferenceModel& m, std::size_t i,
                          std::size_t j) {
  double a = c.a_grid[i], t = c.theta_grid[j];
  return c.p[j] - m.V(a, t) - c.q[i] * m.u(a, t);
}

// Smallest (D1) residual over the grid; negative values mean infeasibility.
inline double d1_min_residual(const DualCertificate& c, const PreferenceModel& m,
                              const std::vector<double>& mass = {}) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.a_grid.size(); ++i)
    for (std::size_t j = 0; j < c.theta_grid.size(); ++j) {
      if (!mass.empty() && mass[j] <= 0.0) continue;
      worst = std::min(worst, d1_residual(c, m, i, j));
    }
  return worst;
}

struct ContactSet {
  std::vector<double> a_grid, theta_grid;
  std::vector<char> member;                  // row-major [a][theta]
  std::vector<std::vector<int>> gamma;       // per action, sorted state indices
  std::vector<std::vector<int>> gamma_star;  // refined sections
  double eps = 0.0;

  bool in_gamma(std::size_t i, std::size_t j) const { return member[i * theta_grid.size() + j] != 0; }
  bool in_gamma_star(std::size_t i, std::size_t j) const {
    const auto& s = gamma_star[i];
    return std::find(s.begin(), s.end(), static_cast<int>(j)) != s.end();
  }
};

inline ContactSet contact_set(const DualCertificate& c, const DiscreteProblem& pb, double eps = -1.0) {
  if (eps <= 0.0) eps = default_contact_tolerance(pb);
  ContactSet g;
  g.a_grid = pb.a_grid;
  g.theta_grid = pb.theta_grid;
  g.eps = eps;
  const std::size_t na = pb.a_grid.size(), nt = pb.theta_grid.size();
  g.member.assign(na * nt, 0);
  g.gamma.assign(na, {});
  g.gamma_star.assign(na, {});
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      if (pb.prior_mass[j] <= 0.0) continue;
      if (std::abs(d1_residual(c, pb.model, i, j)) <= eps) {
        g.member[i * nt + j] = 1;
        g.gamma[i].push_back(static_cast<int>(j));
      }
    }
    const auto& sec = g.gamma[i];
    g.gamma_star[i] = sec;
    if (sec.empty()) continue;
    double ts;
    try {
      ts = theta_star(pb.model, pb.a_grid[i]);
    } catch (const Error&) {
      continue;
    }
    auto node = pb.node_for(ts);
    for (int end : {sec.front(), sec.back()}) {
      if (node && static_cast<int>(*node) == end) {
        g.gamma_star[i] = {end};
        break;
      }
    }
  }
  return g;
}

// Derivative of the selected q along the action grid: central differences in
// the interior, one-sided at the ends.
inline double q_derivative(const std::vector<double>& a_grid, const std::vector<double>& q, std::size_t i) {
  const std::size_t n = a_grid.size();
  if (n < 2) return 0.0;
  std::size_t lo = i > 0 ? i - 1 : i, hi = i + 1 < n ? i + 1 : i;
  return (q[hi] - q[lo]) / (a_grid[hi] - a_grid[lo]);
}

inline double foc_value(const PreferenceModel& m, double a, double t, double q, double q_prime) {
  double uu = m.u(a, t);
  double r = m.v(a, t) + q * m.u_a(a, t);
  if (std::abs(uu) > 1e-12) r += q_prime * uu;
  return r;
}

inline double foc_residual(const PreferenceModel& m, const DualCertificate& c, std::size_t i, double t) {
  return foc_value(m, c.a_grid[i], t, c.q[i], q_derivative(c.a_grid, c.q, i));
}

struct QPair {
  double q;
  double q_prime;
};

// q and q' from the first-order conditions holding at both states of a pair.
inline QPair q_closed_form(const PreferenceModel& m, double a, double t1, double t2) {
  if (std::abs(t2 - t1) < 1e-10) throw Error(ErrorKind::DegeneratePair, "t1 and t2 coincide");
  double v1 = m.v(a, t1), v2 = m.v(a, t2);
  double u1 = m.u(a, t1), u2 = m.u(a, t2);
  double ua1 = m.u_a(a, t1), ua2 = m.u_a(a, t2);
  double det = u1 * ua2 - u2 * ua1;
  return {(v1 * u2 - v2 * u1) / det, (v1 * ua2 - v2 * ua1) / (-det)};
}

struct SupportVerdict {
  bool pass = true;
  std::vector<OutcomeEntry> offending;
};

inline SupportVerdict verify_support_optimality(const Outcome& o, const ContactSet& g) {
  SupportVerdict v;
  for (const auto& e : o.entries) {
    if (!g.in_gamma(static_cast<std::size_t>(e.a_index), static_cast<std::size_t>(e.theta_index))) {
      v.pass = false;
      v.offending.push_back(e);
    }
  }
  return v;
}

// Sum over the outcome of (p - V - q u) * mass; zero for matched optimal pairs.
inline double complementary_slackness(const Outcome& o, const DualCertificate& c, const PreferenceModel& m) {
  double s = 0.0;
  for (const auto& e : o.entries)
    s += std::abs(d1_residual(c, m, static_cast<std::size_t>(e.a_index), static_cast<std::size_t>(e.theta_index))) * e.mass;
  return s;
}

// Largest |q(a) + E[v]/E[u_a]| over actions whose conditional has two or more states.
inline double q_formula_residual(const Outcome& o, const DualCertificate& c, const PreferenceModel& m) {
  double worst = 0.0;
  for (const auto& [ai, cond] : o.conditionals()) {
    if (cond.size() < 2) continue;
    double a = o.a_grid[static_cast<std::size_t>(ai)];
    double ev = 0.0, eua = 0.0;
    for (const auto& [tj, w] : cond) {
      double t = o.theta_grid[static_cast<std::size_t>(tj)];
      ev += w * m.v(a, t);
      eua += w * m.u_a(a, t);
    }
    if (eua == 0.0) continue;
    worst = std::max(worst, std::abs(c.q[static_cast<std::size_t>(ai)] + ev / eua));
  }
  return worst;
}

}  // namespace persuasion
