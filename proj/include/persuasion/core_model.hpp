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
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "persuasion/error.hpp"
#include "persuasion/numeric.hpp"

namespace persuasion {

enum class Family {
  simple,
  simple_receiver,
  simple_sender,
  translation_invariant,
  contest,
  quantile,
  custom
};

inline const char* to_string(Family f) {
  switch (f) {
    case Family::simple: return "simple";
    case Family::simple_receiver: return "simple_receiver";
    case Family::simple_sender: return "simple_sender";
    case Family::translation_invariant: return "translation_invariant";
    case Family::contest: return "contest";
    case Family::quantile: return "quantile";
    case Family::custom: return "custom";
  }
  return "custom";
}

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// A scalar function with its first two derivatives.
struct Curve {
  Fn1 f, d1, d2;
};

inline Curve poly_curve(std::vector<double> c) {
  auto eval = [](const std::vector<double>& k, double x) {
    double acc = 0.0;
    for (auto it = k.rbegin(); it != k.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  std::vector<double> c1, c2;
  for (std::size_t i = 1; i < c.size(); ++i) c1.push_back(c[i] * static_cast<double>(i));
  for (std::size_t i = 1; i < c1.size(); ++i) c2.push_back(c1[i] * static_cast<double>(i));
  return {[=](double x) { return eval(c, x); }, [=](double x) { return eval(c1, x); },
          [=](double x) { return eval(c2, x); }};
}

inline Curve inverse_curve() {
  return {[](double x) { return 1.0 / x; }, [](double x) { return -1.0 / (x * x); },
          [](double x) { return 2.0 / (x * x * x); }};
}

inline Curve sine_curve(double k) {
  return {[k](double x) { return std::sin(k * x); }, [k](double x) { return k * std::cos(k * x); },
          [k](double x) { return -k * k * std::sin(k * x); }};
}

inline Curve exp_curve(double c, double k) {
  return {[c, k](double x) { return c * std::exp(k * x); },
          [c, k](double x) { return c * k * std::exp(k * x); },
          [c, k](double x) { return c * k * k * std::exp(k * x); }};
}

// 0 below the knot, (x - knot)^2 above.
inline Curve hinge_square_curve(double knot) {
  return {[knot](double x) { return x < knot ? 0.0 : (x - knot) * (x - knot); },
          [knot](double x) { return x < knot ? 0.0 : 2.0 * (x - knot); },
          [knot](double x) { return x < knot ? 0.0 : 2.0; }};
}

// T(y) = int_0^y exp(-s^2/2) ds = sqrt(pi/2) erf(y/sqrt(2)).
inline Curve gauss_integral_curve() {
  const double c = std::sqrt(std::acos(-1.0) / 2.0);
  return {[c](double y) { return c * std::erf(y / std::sqrt(2.0)); },
          [](double y) { return std::exp(-0.5 * y * y); },
          [](double y) { return -y * std::exp(-0.5 * y * y); }};
}

// x -> c(s x), with derivatives rescaled.
inline Curve scale_argument(Curve c, double s) {
  return {[c, s](double x) { return c.f(s * x); }, [c, s](double x) { return s * c.d1(s * x); },
          [c, s](double x) { return s * s * c.d2(s * x); }};
}

struct Rect {
  double a_lo = 0.0, a_hi = 1.0, theta_lo = 0.0, theta_hi = 1.0;
};

struct PreferenceModel {
  Family family = Family::custom;
  double kappa = 0.0;
  Rect rect;
  Fn2 V, v, u, u_a;
  // Optional second-order partials; empty means finite differences.
  Fn2 v_theta, u_theta, u_atheta, v_a, u_aa;
  bool has_analytic_second_order = false;
  // u(a, theta) vanishes exactly at theta = a.
  bool identity_root = false;
  std::string name;
};

// ---------------------------------------------------------------------------
// Second-order partials, analytic when available, else central differences
// with step 1e-5 times the span of the differentiated coordinate.

namespace detail {
inline double fd_theta(const Fn2& g, const PreferenceModel& m, double a, double t) {
  double h = 1e-5 * (m.rect.theta_hi - m.rect.theta_lo);
  return (g(a, t + h) - g(a, t - h)) / (2.0 * h);
}
inline double fd_a(const Fn2& g, const PreferenceModel& m, double a, double t) {
  double h = 1e-5 * (m.rect.a_hi - m.rect.a_lo);
  return (g(a + h, t) - g(a - h, t)) / (2.0 * h);
}
}  // namespace detail

inline double eval_v_theta(const PreferenceModel& m, double a, double t) {
  return m.v_theta ? m.v_theta(a, t) : detail::fd_theta(m.v, m, a, t);
}
inline double eval_u_theta(const PreferenceModel& m, double a, double t) {
  return m.u_theta ? m.u_theta(a, t) : detail::fd_theta(m.u, m, a, t);
}
inline double eval_u_atheta(const PreferenceModel& m, double a, double t) {
  return m.u_atheta ? m.u_atheta(a, t) : detail::fd_theta(m.u_a, m, a, t);
}
inline double eval_v_a(const PreferenceModel& m, double a, double t) {
  return m.v_a ? m.v_a(a, t) : detail::fd_a(m.v, m, a, t);
}
inline double eval_u_aa(const PreferenceModel& m, double a, double t) {
  return m.u_aa ? m.u_aa(a, t) : detail::fd_a(m.u_a, m, a, t);
}

// ---------------------------------------------------------------------------
// Families.

// V depends on the action only, u = theta - a.
inline PreferenceModel make_simple(Curve V, Rect r, std::string name = "simple") {
  PreferenceModel m;
  m.family = Family::simple;
  m.rect = r;
  m.name = std::move(name);
  m.V = [V](double a, double) { return V.f(a); };
  m.v = [V](double a, double) { return V.d1(a); };
  m.u = [](double a, double t) { return t - a; };
  m.u_a = [](double, double) { return -1.0; };
  m.v_theta = [](double, double) { return 0.0; };
  m.u_theta = [](double, double) { return 1.0; };
  m.u_atheta = [](double, double) { return 0.0; };
  m.v_a = [V](double a, double) { return V.d2(a); };
  m.u_aa = [](double, double) { return 0.0; };
  m.has_analytic_second_order = true;
  m.identity_root = true;
  return m;
}

// Arbitrary V with u = theta - a. Derivatives of V not supplied fall back to
// finite differences.
inline PreferenceModel make_simple_receiver(Fn2 V, Fn2 v, Rect r, Fn2 v_theta = {}, Fn2 v_a = {},
                                            std::string name = "simple_receiver") {
  PreferenceModel m;
  m.family = Family::simple_receiver;
  m.rect = r;
  m.name = std::move(name);
  m.has_analytic_second_order = static_cast<bool>(v_theta) && static_cast<bool>(v_a);
  m.V = std::move(V);
  m.v = std::move(v);
  m.u = [](double a, double t) { return t - a; };
  m.u_a = [](double, double) { return -1.0; };
  m.v_theta = std::move(v_theta);
  m.v_a = std::move(v_a);
  m.u_theta = [](double, double) { return 1.0; };
  m.u_atheta = [](double, double) { return 0.0; };
  m.u_aa = [](double, double) { return 0.0; };
  m.identity_root = true;
  return m;
}

// V(a, theta) = a * w(theta).
inline PreferenceModel make_separable_receiver(Curve w, Rect r,
                                               std::string name = "simple_receiver") {
  return make_simple_receiver([w](double a, double t) { return a * w.f(t); },
                              [w](double, double t) { return w.f(t); }, r,
                              [w](double, double t) { return w.d1(t); },
                              [](double, double) { return 0.0; }, std::move(name));
}

// V depends on the action only, u = T(theta - a) with T(0) = 0 and T' > 0.
inline PreferenceModel make_simple_sender(Curve V, Curve T, Rect r,
                                          std::string name = "simple_sender") {
  PreferenceModel m;
  m.family = Family::simple_sender;
  m.rect = r;
  m.name = std::move(name);
  m.V = [V](double a, double) { return V.f(a); };
  m.v = [V](double a, double) { return V.d1(a); };
  m.u = [T](double a, double t) { return T.f(t - a); };
  m.u_a = [T](double a, double t) { return -T.d1(t - a); };
  m.v_theta = [](double, double) { return 0.0; };
  m.u_theta = [T](double a, double t) { return T.d1(t - a); };
  m.u_atheta = [T](double a, double t) { return -T.d2(t - a); };
  m.v_a = [V](double a, double) { return V.d2(a); };
  m.u_aa = [T](double a, double t) { return T.d2(t - a); };
  m.has_analytic_second_order = true;
  m.identity_root = true;
  return m;
}

// Simple receiver with V(a, theta) = P(a - theta).
inline PreferenceModel make_translation_invariant(Curve P, Rect r,
                                                  std::string name = "translation_invariant") {
  PreferenceModel m = make_simple_receiver(
      [P](double a, double t) { return P.f(a - t); }, [P](double a, double t) { return P.d1(a - t); },
      r, [P](double a, double t) { return -P.d2(a - t); },
      [P](double a, double t) { return P.d2(a - t); }, std::move(name));
  m.family = Family::translation_invariant;
  return m;
}

// Arbitrary primitives; missing partials fall back to finite differences.
inline PreferenceModel make_custom(Fn2 V, Fn2 v, Fn2 u, Fn2 u_a, Rect r, std::string name = "custom") {
  PreferenceModel m;
  m.family = Family::custom;
  m.rect = r;
  m.name = std::move(name);
  m.V = std::move(V);
  m.v = std::move(v);
  m.u = std::move(u);
  m.u_a = std::move(u_a);
  return m;
}

// Full-disclosure action of the contest model, theta / (1 + theta^2).
inline double contest_action(double t) { return t / (1.0 + t * t); }

// V = a / theta, u = theta - (1 + theta^2) a on [lo, hi] with lo > 0. The
// action interval spans the full-disclosure actions.
inline PreferenceModel make_contest(double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::ConfigError, "contest needs 0 < lo < hi");
  double amin = std::min(contest_action(lo), contest_action(hi));
  double amax = std::max(contest_action(lo), contest_action(hi));
  if (lo < 1.0 && hi > 1.0) amax = 0.5;
  PreferenceModel m;
  m.family = Family::contest;
  m.rect = {amin, amax, lo, hi};
  m.name = "contest";
  m.V = [](double a, double t) { return a / t; };
  m.v = [](double, double t) { return 1.0 / t; };
  m.u = [](double a, double t) { return t - (1.0 + t * t) * a; };
  m.u_a = [](double, double t) { return -(1.0 + t * t); };
  m.v_theta = [](double, double t) { return -1.0 / (t * t); };
  m.u_theta = [](double a, double t) { return 1.0 - 2.0 * t * a; };
  m.u_atheta = [](double, double t) { return -2.0 * t; };
  m.v_a = [](double, double) { return 0.0; };
  m.u_aa = [](double, double) { return 0.0; };
  m.has_analytic_second_order = true;
  return m;
}

// u = 1{theta >= a} - kappa on the unit square.
inline PreferenceModel make_quantile(double kappa, Curve V) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw Error(ErrorKind::ConfigError, "kappa must lie in (0,1)");
  PreferenceModel m;
  m.family = Family::quantile;
  m.kappa = kappa;
  m.rect = {0.0, 1.0, 0.0, 1.0};
  m.name = "quantile";
  m.V = [V](double a, double) { return V.f(a); };
  m.v = [V](double a, double) { return V.d1(a); };
  m.u = [kappa](double a, double t) { return (t >= a ? 1.0 : 0.0) - kappa; };
  m.u_a = [](double, double) { return 0.0; };
  m.v_theta = [](double, double) { return 0.0; };
  m.u_theta = [](double, double) { return 0.0; };
  m.u_atheta = [](double, double) { return 0.0; };
  m.v_a = [V](double a, double) { return V.d2(a); };
  m.u_aa = [](double, double) { return 0.0; };
  m.identity_root = true;
  return m;
}

// Bilinear interpolation of a table indexed [a][theta].
class Table2 {
 public:
  Table2() = default;
  Table2(std::vector<double> as, std::vector<double> ts, std::vector<std::vector<double>> vals)
      : as_(std::move(as)), ts_(std::move(ts)), vals_(std::move(vals)) {
    if (as_.size() < 2 || ts_.size() < 2 || vals_.size() != as_.size())
      throw Error(ErrorKind::ConfigError, "table shape mismatch");
    for (const auto& row : vals_)
      if (row.size() != ts_.size()) throw Error(ErrorKind::ConfigError, "table shape mismatch");
  }
  double operator()(double a, double t) const {
    auto [i, wa] = locate(as_, a);
    auto [j, wt] = locate(ts_, t);
    double v00 = vals_[i][j], v01 = vals_[i][j + 1], v10 = vals_[i + 1][j], v11 = vals_[i + 1][j + 1];
    return (1 - wa) * ((1 - wt) * v00 + wt * v01) + wa * ((1 - wt) * v10 + wt * v11);
  }

 private:
  static std::pair<std::size_t, double> locate(const std::vector<double>& g, double x) {
    auto it = std::upper_bound(g.begin(), g.end(), x);
    std::size_t k = it == g.begin() ? 1 : static_cast<std::size_t>(it - g.begin());
    k = std::min(k, g.size() - 1);
    return {k - 1, (x - g[k - 1]) / (g[k] - g[k - 1])};
  }
  std::vector<double> as_, ts_;
  std::vector<std::vector<double>> vals_;
};

// ---------------------------------------------------------------------------
// Priors and posteriors.

struct Atom {
  double theta;
  double mass;
};

struct Prior {
  enum class Kind { atoms, density };
  Kind kind = Kind::atoms;
  std::vector<Atom> atoms;
  std::string density_name;
  Fn1 f;  // density
  Fn1 F;  // cumulative distribution
  double theta_min = 0.0, theta_max = 1.0;

  bool is_density() const { return kind == Kind::density; }
};

inline Prior atom_prior(std::vector<Atom> atoms) {
  if (atoms.empty()) throw Error(ErrorKind::ConfigError, "empty atom list");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.theta < y.theta; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].mass > 0.0)) throw Error(ErrorKind::ConfigError, "atom masses must be positive");
    if (i > 0 && !(atoms[i].theta > atoms[i - 1].theta))
      throw Error(ErrorKind::ConfigError, "atom locations must be distinct");
    total += atoms[i].mass;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::ConfigError, "atom masses must sum to 1");
  Prior p;
  p.kind = Prior::Kind::atoms;
  p.atoms = std::move(atoms);
  p.theta_min = p.atoms.front().theta;
  p.theta_max = p.atoms.back().theta;
  return p;
}

inline Prior uniform_atoms(const std::vector<double>& thetas) {
  std::vector<Atom> atoms;
  for (double t : thetas) atoms.push_back({t, 1.0 / static_cast<double>(thetas.size())});
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) total += atoms[i].mass;
  atoms.back().mass = 1.0 - total;
  return atom_prior(std::move(atoms));
}

inline Prior uniform_prior(double lo, double hi) {
  Prior p;
  p.kind = Prior::Kind::density;
  p.density_name = "uniform";
  p.theta_min = lo;
  p.theta_max = hi;
  p.f = [lo, hi](double t) { return (t >= lo && t <= hi) ? 1.0 / (hi - lo) : 0.0; };
  p.F = [lo, hi](double t) { return std::clamp((t - lo) / (hi - lo), 0.0, 1.0); };
  return p;
}

// Density proportional to 1/theta on [lo, hi], lo > 0.
inline Prior reciprocal_prior(double lo, double hi) {
  double z = std::log(hi / lo);
  Prior p;
  p.kind = Prior::Kind::density;
  p.density_name = "reciprocal";
  p.theta_min = lo;
  p.theta_max = hi;
  p.f = [lo, hi, z](double t) { return (t >= lo && t <= hi) ? 1.0 / (t * z) : 0.0; };
  p.F = [lo, hi, z](double t) {
    if (t <= lo) return 0.0;
    if (t >= hi) return 1.0;
    return std::log(t / lo) / z;
  };
  return p;
}

// Piecewise-constant density: `weights[k]` is the mass of [breaks[k], breaks[k+1]].
inline Prior piecewise_uniform_prior(std::vector<double> breaks, std::vector<double> weights) {
  if (breaks.size() != weights.size() + 1 || weights.empty())
    throw Error(ErrorKind::ConfigError, "piecewise_uniform needs one more break than weights");
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::ConfigError, "weights must sum to 1");
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    if (!(breaks[k + 1] > breaks[k])) throw Error(ErrorKind::ConfigError, "breaks must increase");
  Prior p;
  p.kind = Prior::Kind::density;
  p.density_name = "piecewise_uniform";
  p.theta_min = breaks.front();
  p.theta_max = breaks.back();
  p.f = [breaks, weights](double t) {
    if (t < breaks.front() || t > breaks.back()) return 0.0;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), t) - breaks.begin());
    k = std::min(std::max<std::size_t>(k, 1), weights.size());
    return weights[k - 1] / (breaks[k] - breaks[k - 1]);
  };
  p.F = [breaks, weights](double t) {
    if (t <= breaks.front()) return 0.0;
    if (t >= breaks.back()) return 1.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (t >= breaks[k + 1]) {
        acc += weights[k];
      } else {
        acc += weights[k] * (t - breaks[k]) / (breaks[k + 1] - breaks[k]);
        break;
      }
    }
    return acc;
  };
  return p;
}

inline double density_mass(const Prior& p) {
  if (!p.is_density()) {
    double s = 0.0;
    for (const auto& at : p.atoms) s += at.mass;
    return s;
  }
  return integrate(p.f, p.theta_min, p.theta_max);
}

// Prior mass assigned to grid nodes. Atom priors must sit on grid nodes;
// densities are integrated over the Voronoi cell of each node.
inline std::vector<double> prior_masses_on(const Prior& p, const std::vector<double>& grid) {
  std::vector<double> mass(grid.size(), 0.0);
  if (!p.is_density()) {
    for (const auto& at : p.atoms) {
      std::size_t i = nearest_index(grid, at.theta);
      if (std::abs(grid[i] - at.theta) > 1e-12 * (1.0 + std::abs(at.theta)))
        throw Error(ErrorKind::ConfigError, "prior atom is not a grid node");
      mass[i] += at.mass;
    }
    return mass;
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double right = i + 1 < grid.size() ? 0.5 * (grid[i] + grid[i + 1]) : p.theta_max;
    double cur = i + 1 < grid.size() ? p.F(right) : 1.0;
    mass[i] = std::max(0.0, cur - prev);
    prev = cur;
  }
  return mass;
}

// Default state grid: the atoms themselves, or n uniform nodes over the support.
inline std::vector<double> default_theta_grid(const Prior& p, std::size_t n) {
  if (!p.is_density()) {
    std::vector<double> g;
    for (const auto& at : p.atoms) g.push_back(at.theta);
    return g;
  }
  return linspace(p.theta_min, p.theta_max, n);
}

struct Posterior {
  std::vector<Atom> points;  // theta strictly increasing, weights summing to 1
};

inline Posterior make_posterior(std::vector<Atom> pts) {
  std::sort(pts.begin(), pts.end(), [](const Atom& x, const Atom& y) { return x.theta < y.theta; });
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].mass > 0.0)) throw Error(ErrorKind::ConfigError, "posterior weights must be positive");
    if (i > 0 && !(pts[i].theta > pts[i - 1].theta))
      throw Error(ErrorKind::ConfigError, "posterior states must be distinct");
    total += pts[i].mass;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::ConfigError, "posterior weights must sum to 1");
  return Posterior{std::move(pts)};
}

// ---------------------------------------------------------------------------
// Receiver optimality.

inline double theta_star(const PreferenceModel& m, double a) {
  if (m.family == Family::quantile || m.identity_root) {
    if (a < m.rect.theta_lo - 1e-12 || a > m.rect.theta_hi + 1e-12)
      throw Error(ErrorKind::NoRoot, "u(a, .) has constant sign at a = " + format_double(a));
    return std::clamp(a, m.rect.theta_lo, m.rect.theta_hi);
  }
  double lo = m.rect.theta_lo, hi = m.rect.theta_hi;
  double ulo = m.u(a, lo), uhi = m.u(a, hi);
  if (ulo == 0.0) return lo;
  if (uhi == 0.0) return hi;
  if ((ulo > 0.0) == (uhi > 0.0))
    throw Error(ErrorKind::NoRoot, "u(a, .) has constant sign at a = " + format_double(a));
  const bool rising = ulo < 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    double um = m.u(a, mid);
    if (um == 0.0) return mid;
    if ((um < 0.0) == rising) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double expected_u(const PreferenceModel& m, const Posterior& mu, double a) {
  double s = 0.0;
  for (const auto& pt : mu.points) s += pt.mass * m.u(a, pt.theta);
  return s;
}

inline double receiver_best_response(const PreferenceModel& m, const Posterior& mu) {
  if (m.family == Family::quantile) {
    // Largest a with P(theta >= a) >= kappa; ties go to the sender.
    double tail = 0.0;
    for (auto it = mu.points.rbegin(); it != mu.points.rend(); ++it) {
      tail += it->mass;
      if (tail >= m.kappa - 1e-12) return it->theta;
    }
    return mu.points.front().theta;
  }
  double mean = 0.0, second = 0.0;
  for (const auto& pt : mu.points) {
    mean += pt.mass * pt.theta;
    second += pt.mass * pt.theta * pt.theta;
  }
  if (m.family == Family::simple || m.family == Family::simple_receiver ||
      m.family == Family::translation_invariant || m.family == Family::contest) {
    double a = m.family == Family::contest ? mean / (1.0 + second) : mean;
    if (a < m.rect.a_lo - 1e-12) throw Error(ErrorKind::BoundaryOptimum, "lower bound");
    if (a > m.rect.a_hi + 1e-12) throw Error(ErrorKind::BoundaryOptimum, "upper bound");
    return std::clamp(a, m.rect.a_lo, m.rect.a_hi);
  }
  double lo = m.rect.a_lo, hi = m.rect.a_hi;
  double glo = expected_u(m, mu, lo), ghi = expected_u(m, mu, hi);
  if (std::abs(glo) <= 1e-14) return lo;
  if (std::abs(ghi) <= 1e-14) return hi;
  if (glo < 0.0) throw Error(ErrorKind::BoundaryOptimum, "lower bound");
  if (ghi > 0.0) throw Error(ErrorKind::BoundaryOptimum, "upper bound");
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    double g = expected_u(m, mu, mid);
    if (g == 0.0) return mid;
    if (g > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double full_disclosure_action(const PreferenceModel& m, double theta) {
  return receiver_best_response(m, Posterior{{{theta, 1.0}}});
}

// ---------------------------------------------------------------------------
// Grid checks of the receiver-side assumptions.

struct GridCheckReport {
  bool pass = true;
  double a = 0.0, theta = 0.0, theta2 = 0.0;  // first violation
  std::string message;
};

inline GridCheckReport check_aggregate_quasiconcavity(const PreferenceModel& m,
                                                      const std::vector<double>& a_grid,
                                                      const std::vector<double>& theta_grid) {
  const std::size_t na = a_grid.size(), nt = theta_grid.size();
  std::vector<double> U(na * nt), UA(na * nt);
  double scale = 0.0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      U[i * nt + j] = m.u(a_grid[i], theta_grid[j]);
      UA[i * nt + j] = m.u_a(a_grid[i], theta_grid[j]);
      scale = std::max(scale, std::abs(U[i * nt + j]));
    }
  const double band = 1e-8 * std::max(scale, 1e-300);
  GridCheckReport rep;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      double uj = U[i * nt + j];
      if (std::abs(uj) <= band && !(UA[i * nt + j] < 0.0)) {
        return {false, a_grid[i], theta_grid[j], theta_grid[j], "u = 0 with u_a >= 0"};
      }
      if (!(uj < -band)) continue;
      for (std::size_t k = 0; k < nt; ++k) {
        double uk = U[i * nt + k];
        if (!(uk > band)) continue;
        double cross = uk * UA[i * nt + j] - uj * UA[i * nt + k];
        if (!(cross < 0.0)) {
          return {false, a_grid[i], theta_grid[j], theta_grid[k],
                  "u(a,t')u_a(a,t) - u(a,t)u_a(a,t') >= 0"};
        }
      }
    }
  }
  return rep;
}

// Sign pattern of u(a, .) along the grid must read (-)* then at most one zero
// then (+)*.
inline GridCheckReport check_strict_single_crossing(const PreferenceModel& m,
                                                    const std::vector<double>& a_grid,
                                                    const std::vector<double>& theta_grid) {
  double scale = 0.0;
  for (double a : a_grid)
    for (double t : theta_grid) scale = std::max(scale, std::abs(m.u(a, t)));
  const double band = 1e-8 * std::max(scale, 1e-300);
  for (double a : a_grid) {
    std::optional<std::size_t> nonneg;
    for (std::size_t j = 0; j < theta_grid.size(); ++j) {
      double uj = m.u(a, theta_grid[j]);
      if (nonneg) {
        if (!(uj > band))
          return {false, a, theta_grid[*nonneg], theta_grid[j], "u(a,t) >= 0 but u(a,t') <= 0 for t' > t"};
      } else if (uj >= -band) {
        nonneg = j;
      }
    }
  }
  return {};
}

}  // namespace persuasion
