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
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "persuasion/core_model.hpp"
#include "persuasion/discretize_lp.hpp"
#include "persuasion/dual_contact.hpp"
#include "persuasion/error.hpp"
#include "persuasion/simplex.hpp"

namespace persuasion {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

inline double det3(const Mat3& M) {
  return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
         M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
         M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

inline Vec3 mat_vec(const Mat3& M, const Vec3& y) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i] += M[i][j] * y[j];
  return out;
}

// Rows (v, u, u_a) at three states, columns ordered by state.
inline Mat3 twist_matrix(const PreferenceModel& m, double a, double t1, double t2, double t3) {
  const double ts[3] = {t1, t2, t3};
  Mat3 S{};
  for (int k = 0; k < 3; ++k) {
    S[0][k] = m.v(a, ts[k]);
    S[1][k] = m.u(a, ts[k]);
    S[2][k] = m.u_a(a, ts[k]);
  }
  return S;
}

inline double twist_determinant(const PreferenceModel& m, double a, double t1, double t2, double t3) {
  return det3(twist_matrix(m, a, t1, t2, t3));
}

inline Mat3 r_matrix(const PreferenceModel& m, double a1, double a2, double t1, double t2, double t3) {
  Mat3 R{};
  R[0] = {m.V(a2, t1) - m.V(a1, t1), -(m.V(a2, t2) - m.V(a1, t2)), m.V(a2, t3) - m.V(a1, t3)};
  R[1] = {-m.u(a1, t1), m.u(a1, t2), -m.u(a1, t3)};
  R[2] = {m.u(a2, t1), -m.u(a2, t2), m.u(a2, t3)};
  return R;
}

// Finds y >= 0 with Ry >= 0 and 1'Ry >= delta, after positive row and column
// rescaling (which leaves the existence question unchanged). Returns the
// direction in the original coordinates.
inline std::optional<Vec3> improving_direction(const Mat3& R, double delta = 1e-9) {
  Mat3 A = R;
  Vec3 col_scale{1.0, 1.0, 1.0};
  for (int pass = 0; pass < 4; ++pass) {
    for (int i = 0; i < 3; ++i) {
      double mx = 0.0;
      for (int j = 0; j < 3; ++j) mx = std::max(mx, std::abs(A[i][j]));
      if (mx > 0.0)
        for (int j = 0; j < 3; ++j) A[i][j] /= mx;
    }
    for (int j = 0; j < 3; ++j) {
      double mx = 0.0;
      for (int i = 0; i < 3; ++i) mx = std::max(mx, std::abs(A[i][j]));
      if (mx > 0.0) {
        for (int i = 0; i < 3; ++i) A[i][j] /= mx;
        col_scale[j] /= mx;
      }
    }
  }
  // Variables z (3) and surplus s (3): A z - s = 0, sum z = 1.
  LpProblem lp;
  lp.rows = 4;
  lp.b = {0.0, 0.0, 0.0, 1.0};
  for (int j = 0; j < 3; ++j) {
    std::vector<std::pair<int, double>> col;
    double csum = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (A[i][j] != 0.0) col.push_back({i, A[i][j]});
      csum += A[i][j];
    }
    col.push_back({3, 1.0});
    lp.cols.push_back(col);
    lp.c.push_back(csum);
  }
  for (int i = 0; i < 3; ++i) {
    lp.cols.push_back({{i, -1.0}});
    lp.c.push_back(0.0);
  }
  SimplexOptions opt;
  opt.tol = 1e-12;
  opt.pivot_tol = 1e-12;
  SimplexResult res = solve_simplex(lp, opt);
  if (res.status != LpStatus::optimal || res.objective < delta) return std::nullopt;
  Vec3 y{};
  for (int j = 0; j < 3; ++j) y[j] = res.x[j] * col_scale[j];
  return y;
}

// ---------------------------------------------------------------------------
// Single-dipped / single-peaked scans.

enum class Dippedness { single_dipped, single_peaked, neither, both };

inline const char* to_string(Dippedness d) {
  switch (d) {
    case Dippedness::single_dipped: return "single_dipped";
    case Dippedness::single_peaked: return "single_peaked";
    case Dippedness::neither: return "neither";
    case Dippedness::both: return "both";
  }
  return "neither";
}

struct Point {
  double a;
  double theta;
};

// (a1, theta1), (a2, theta2), (a1, theta3) with theta1 < theta2 < theta3.
struct Triple {
  double a1, theta1, a2, theta2, theta3;
};

struct DippednessVerdict {
  Dippedness kind = Dippedness::both;
  std::optional<Triple> peaked_triple;  // strictly single-peaked: a1 < a2
  std::optional<Triple> dipped_triple;  // strictly single-dipped: a1 > a2
};

inline DippednessVerdict classify_dippedness(std::vector<Point> pts, std::uint64_t cap = 100000000ULL) {
  std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) {
    return x.a != y.a ? x.a < y.a : x.theta < y.theta;
  });
  struct Section {
    double a, lo, hi;
  };
  std::vector<Section> secs;
  for (std::size_t k = 0; k < pts.size();) {
    std::size_t e = k;
    while (e < pts.size() && pts[e].a == pts[k].a) ++e;
    if (pts[e - 1].theta > pts[k].theta) secs.push_back({pts[k].a, pts[k].theta, pts[e - 1].theta});
    k = e;
  }
  if (static_cast<std::uint64_t>(secs.size()) * pts.size() > cap)
    throw Error(ErrorKind::ScanTooLarge, "triple scan exceeds the candidate cap");
  DippednessVerdict v;
  for (const auto& s : secs) {
    for (const auto& p : pts) {
      if (p.a == s.a || !(p.theta > s.lo && p.theta < s.hi)) continue;
      if (p.a > s.a && !v.peaked_triple) v.peaked_triple = Triple{s.a, s.lo, p.a, p.theta, s.hi};
      if (p.a < s.a && !v.dipped_triple) v.dipped_triple = Triple{s.a, s.lo, p.a, p.theta, s.hi};
    }
    if (v.peaked_triple && v.dipped_triple) break;
  }
  if (v.peaked_triple && v.dipped_triple) v.kind = Dippedness::neither;
  else if (v.peaked_triple) v.kind = Dippedness::single_peaked;
  else if (v.dipped_triple) v.kind = Dippedness::single_dipped;
  else v.kind = Dippedness::both;
  return v;
}

inline std::vector<Point> support_points(const Outcome& o) {
  std::vector<Point> pts;
  for (const auto& e : o.entries)
    pts.push_back({o.a_grid[static_cast<std::size_t>(e.a_index)], o.theta_grid[static_cast<std::size_t>(e.theta_index)]});
  return pts;
}

inline std::vector<Point> contact_points(const ContactSet& g, bool refined) {
  std::vector<Point> pts;
  const auto& secs = refined ? g.gamma_star : g.gamma;
  for (std::size_t i = 0; i < secs.size(); ++i)
    for (int j : secs[i]) pts.push_back({g.a_grid[i], g.theta_grid[static_cast<std::size_t>(j)]});
  return pts;
}

enum class Orientation { dipped, peaked };

inline const char* to_string(Orientation o) { return o == Orientation::dipped ? "dipped" : "peaked"; }

struct NestingReport {
  bool nested = true;
  double a_low = 0.0, a_high = 0.0;  // first offending action pair
};

// Pooled sections [min, max] must widen (dipped) or narrow (peaked) as the
// action rises.
inline NestingReport nested_pairs(const Outcome& o, Orientation orient) {
  std::vector<std::pair<double, std::pair<double, double>>> secs;
  for (const auto& [ai, cond] : o.conditionals()) {
    if (cond.size() < 2) continue;
    secs.push_back({o.a_grid[static_cast<std::size_t>(ai)],
                    {o.theta_grid[static_cast<std::size_t>(cond.front().first)],
                     o.theta_grid[static_cast<std::size_t>(cond.back().first)]}});
  }
  NestingReport rep;
  for (std::size_t k = 0; k < secs.size(); ++k)
    for (std::size_t l = k + 1; l < secs.size(); ++l) {
      auto [lo1, hi1] = secs[k].second;
      auto [lo2, hi2] = secs[l].second;
      bool ok = orient == Orientation::dipped ? (lo2 <= lo1 && hi2 >= hi1) : (lo2 >= lo1 && hi2 <= hi1);
      if (!ok) return {false, secs[k].first, secs[l].first};
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Twist condition and sufficient conditions for dipped / peaked structure.

inline std::vector<double> subsample(const std::vector<double>& g, std::size_t k) {
  if (g.size() <= k) return g;
  std::vector<double> out;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t idx = static_cast<std::size_t>(std::llround(static_cast<double>(i) * (g.size() - 1) / (k - 1)));
    out.push_back(g[idx]);
  }
  return out;
}

struct TwistReport {
  bool ok = true;
  int sign = 0;  // common sign of |S| over the scanned triples
  double min_normalized = std::numeric_limits<double>::infinity();
  double a = 0.0, theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;  // weakest triple
  double det = 0.0;
  std::size_t triples = 0;
};

// |S| over grid triples theta1 < theta*(a) < theta3, normalized by the product
// of row norms. Passes when the normalized value stays above 1e-10 with one sign.
inline TwistReport check_twist(const PreferenceModel& m, const std::vector<double>& a_grid,
                               const std::vector<double>& theta_grid, std::size_t max_nodes = 40) {
  auto as = subsample(a_grid, max_nodes), ts = subsample(theta_grid, max_nodes);
  TwistReport rep;
  bool seen_pos = false, seen_neg = false;
  for (double a : as) {
    double star;
    try {
      star = theta_star(m, a);
    } catch (const Error&) {
      continue;
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (!(ts[i] < star)) break;
      for (std::size_t k = ts.size(); k-- > i + 2;) {
        if (!(ts[k] > star)) break;
        for (std::size_t j = i + 1; j < k; ++j) {
          Mat3 S = twist_matrix(m, a, ts[i], ts[j], ts[k]);
          double d = det3(S);
          double norm = 1.0;
          for (int r = 0; r < 3; ++r)
            norm *= std::sqrt(S[r][0] * S[r][0] + S[r][1] * S[r][1] + S[r][2] * S[r][2]);
          double nd = norm > 0.0 ? std::abs(d) / norm : 0.0;
          ++rep.triples;
          if (d > 0.0) seen_pos = true;
          if (d < 0.0) seen_neg = true;
          if (nd < rep.min_normalized) {
            rep.min_normalized = nd;
            rep.a = a;
            rep.theta1 = ts[i];
            rep.theta2 = ts[j];
            rep.theta3 = ts[k];
            rep.det = d;
          }
        }
      }
    }
  }
  rep.ok = rep.triples > 0 && rep.min_normalized > 1e-10 && !(seen_pos && seen_neg);
  rep.sign = rep.ok ? (seen_pos ? 1 : -1) : 0;
  return rep;
}

struct MonotoneVerdict {
  bool weak = false;
  bool strict = false;
  std::string violation;
};

struct VariationalVerdict {
  bool certified = false;
  std::size_t checked = 0;
  std::optional<Triple> failure;  // first triple without an improving direction
};

struct SdpdReport {
  bool u_theta_positive = true;
  MonotoneVerdict mono_dipped, mono_peaked;
  VariationalVerdict var_dipped, var_peaked;
  TwistReport twist;
  bool v_positive = true;
  bool strict_dipped = false, weak_dipped = false;
  bool strict_peaked = false, weak_peaked = false;
};

namespace detail {

// Checks that every sequence is increasing (sign=+1) or decreasing (sign=-1).
// Returns {all weak, all strict}. The margin is 1e-10 (1 + |scale|).
inline std::pair<bool, bool> monotone(const std::vector<std::vector<double>>& seqs, int sign,
                                      std::string* where) {
  bool weak = true, strict = true;
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    const auto& r = seqs[s];
    double scale = 0.0;
    for (double x : r) scale = std::max(scale, std::abs(x));
    double margin = 1e-10 * (1.0 + scale);
    for (std::size_t k = 1; k < r.size(); ++k) {
      double d = sign * (r[k] - r[k - 1]);
      if (d < -margin) {
        if (weak && where) *where = "sequence " + std::to_string(s) + " step " + std::to_string(k);
        weak = false;
      }
      if (!(d > margin)) strict = false;
    }
  }
  return {weak, weak && strict};
}

inline VariationalVerdict variational_scan(const PreferenceModel& m, const std::vector<double>& as,
                                           const std::vector<double>& ts, Orientation orient) {
  VariationalVerdict out;
  out.certified = true;
  for (std::size_t p = 0; p < as.size(); ++p) {
    double a1 = as[p];
    double star;
    try {
      star = theta_star(m, a1);
    } catch (const Error&) {
      continue;
    }
    for (std::size_t q = 0; q < as.size(); ++q) {
      if (orient == Orientation::dipped ? !(as[q] > a1) : !(as[q] < a1)) continue;
      double a2 = as[q];
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] > star) break;
        for (std::size_t k = i + 2; k < ts.size(); ++k) {
          if (ts[k] < star) continue;
          for (std::size_t j = i + 1; j < k; ++j) {
            ++out.checked;
            if (!improving_direction(r_matrix(m, a1, a2, ts[i], ts[j], ts[k]))) {
              out.certified = false;
              out.failure = Triple{a1, ts[i], a2, ts[j], ts[k]};
              return out;
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

struct SdpdOptions {
  std::size_t mono_actions = 60, mono_states = 200;
  std::size_t var_actions = 12, var_states = 12;
  bool variational = true;
};

// Monotonicity conditions on u_atheta/u_theta and v_theta(a2,.)/u_theta(a1,.),
// plus a sampled check of the improving-direction alternative for every
// candidate triple combined with a constant twist sign.
inline SdpdReport check_sdpd_conditions(const PreferenceModel& m, const std::vector<double>& a_grid,
                                        const std::vector<double>& theta_grid, const SdpdOptions& opt = {}) {
  SdpdReport rep;
  auto as = subsample(a_grid, opt.mono_actions), ts = subsample(theta_grid, opt.mono_states);
  for (double a : as)
    for (double t : ts) {
      if (!(eval_u_theta(m, a, t) > 0.0)) rep.u_theta_positive = false;
      if (!(m.v(a, t) > 0.0)) rep.v_positive = false;
    }
  if (rep.u_theta_positive) {
    std::vector<std::vector<double>> r1;
    for (double a : as) {
      std::vector<double> seq;
      for (double t : ts) seq.push_back(eval_u_atheta(m, a, t) / eval_u_theta(m, a, t));
      r1.push_back(std::move(seq));
    }
    std::vector<std::vector<double>> r2_up, r2_down;
    for (std::size_t i = 0; i < as.size(); ++i)
      for (std::size_t k = 0; k < as.size(); ++k) {
        std::vector<double> seq;
        for (double t : ts) seq.push_back(eval_v_theta(m, as[k], t) / eval_u_theta(m, as[i], t));
        if (k >= i) r2_up.push_back(seq);
        if (k <= i) r2_down.push_back(std::move(seq));
      }
    for (int sgn : {1, -1}) {
      std::string where1, where2;
      auto [w1, s1] = detail::monotone(r1, sgn, &where1);
      auto [w2, s2] = detail::monotone(sgn > 0 ? r2_up : r2_down, sgn, &where2);
      MonotoneVerdict& v = sgn > 0 ? rep.mono_dipped : rep.mono_peaked;
      v.weak = w1 && w2;
      v.strict = v.weak && (s1 || s2);
      if (!w1) v.violation = "u_atheta/u_theta " + where1;
      else if (!w2) v.violation = "v_theta/u_theta " + where2;
    }
  } else {
    rep.mono_dipped.violation = rep.mono_peaked.violation = "u_theta not positive";
  }
  if (opt.variational && rep.v_positive) {
    rep.twist = check_twist(m, a_grid, theta_grid, opt.var_states);
    auto vas = subsample(a_grid, opt.var_actions), vts = subsample(theta_grid, opt.var_states);
    rep.var_dipped = detail::variational_scan(m, vas, vts, Orientation::dipped);
    rep.var_peaked = detail::variational_scan(m, vas, vts, Orientation::peaked);
  }
  rep.weak_dipped = rep.mono_dipped.weak || rep.var_dipped.certified;
  rep.weak_peaked = rep.mono_peaked.weak || rep.var_peaked.certified;
  rep.strict_dipped = rep.mono_dipped.strict || (rep.var_dipped.certified && rep.twist.ok);
  rep.strict_peaked = rep.mono_peaked.strict || (rep.var_peaked.certified && rep.twist.ok);
  return rep;
}

// ---------------------------------------------------------------------------
// Pairwise decomposition of a posterior.

struct Piece {
  double weight;
  Posterior posterior;
};

inline std::vector<Piece> pairwise_split(const PreferenceModel& m, const Posterior& mu) {
  const double astar = receiver_best_response(m, mu);
  double scale = 0.0;
  for (const auto& pt : mu.points) scale = std::max(scale, std::abs(m.u(astar, pt.theta)));
  if (m.family != Family::quantile && std::abs(expected_u(m, mu, astar)) > 1e-9)
    throw Error(ErrorKind::MomentNonzero, "posterior is not obedient at its best response");
  struct Slot {
    double theta, mass, u;
  };
  std::vector<Piece> out;
  std::vector<Slot> neg, pos;
  for (const auto& pt : mu.points) {
    double uu = m.u(astar, pt.theta);
    if (std::abs(uu) <= 1e-12 * std::max(scale, 1e-300)) {
      out.push_back({pt.mass, Posterior{{{pt.theta, 1.0}}}});
    } else if (uu < 0.0) {
      neg.push_back({pt.theta, pt.mass, uu});
    } else {
      pos.push_back({pt.theta, pt.mass, uu});
    }
  }
  auto pick = [](const std::vector<Slot>& v) {
    int best = -1;
    double mom = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      double mk = v[k].mass * std::abs(v[k].u);
      if (v[k].mass > 0.0 && mk > mom) {
        mom = mk;
        best = static_cast<int>(k);
      }
    }
    return best;
  };
  std::vector<std::pair<int, int>> pair_of;  // piece index -> (neg slot, pos slot)
  std::vector<int> piece_index;
  while (true) {
    int in = pick(neg), ip = pick(pos);
    if (in < 0 || ip < 0) break;
    Slot& sn = neg[static_cast<std::size_t>(in)];
    Slot& sp = pos[static_cast<std::size_t>(ip)];
    double mn = sn.mass * -sn.u, mp = sp.mass * sp.u;
    double xn, xp;
    if (mn <= mp) {
      xn = sn.mass;
      xp = std::min(sp.mass, xn * -sn.u / sp.u);
    } else {
      xp = sp.mass;
      xn = std::min(sn.mass, xp * sp.u / -sn.u);
    }
    sn.mass = (xn == sn.mass) ? 0.0 : sn.mass - xn;
    sp.mass = (xp == sp.mass) ? 0.0 : sp.mass - xp;
    double w = xn + xp;
    out.push_back({w, Posterior{{{sn.theta, xn / w}, {sp.theta, xp / w}}}});
    piece_index.push_back(static_cast<int>(out.size() - 1));
    pair_of.push_back({in, ip});
  }
  // Rounding leftovers (bounded by the moment tolerance) rejoin the last piece
  // that already holds the state, or stand alone.
  auto fold = [&](std::vector<Slot>& side, bool negative) {
    for (std::size_t k = 0; k < side.size(); ++k) {
      if (side[k].mass <= 0.0) continue;
      int target = -1;
      for (std::size_t r = pair_of.size(); r-- > 0;) {
        if ((negative ? pair_of[r].first : pair_of[r].second) == static_cast<int>(k)) {
          target = piece_index[r];
          break;
        }
      }
      if (target < 0) {
        out.push_back({side[k].mass, Posterior{{{side[k].theta, 1.0}}}});
        continue;
      }
      Piece& pc = out[static_cast<std::size_t>(target)];
      double total = pc.weight + side[k].mass;
      for (auto& at : pc.posterior.points) {
        double mass = at.mass * pc.weight + (at.theta == side[k].theta ? side[k].mass : 0.0);
        at.mass = mass / total;
      }
      pc.weight = total;
    }
  };
  fold(neg, true);
  fold(pos, false);
  for (auto& pc : out)
    std::sort(pc.posterior.points.begin(), pc.posterior.points.end(),
              [](const Atom& x, const Atom& y) { return x.theta < y.theta; });
  return out;
}

// ---------------------------------------------------------------------------
// Full disclosure and pooling tests over pairs of support states.

struct PairWitness {
  double theta1 = 0.0, theta2 = 0.0, rho = 0.0;
  double pooled = 0.0, separated = 0.0;  // both sides of the comparison
};

struct PairTestVerdict {
  bool holds = true;
  bool strict = true;
  std::size_t resolution = 0;  // rho grid size
  std::optional<PairWitness> witness;
};

inline std::vector<double> default_rho_grid(std::size_t k = 99) {
  std::vector<double> g;
  for (std::size_t i = 1; i <= k; ++i) g.push_back(static_cast<double>(i) / static_cast<double>(k + 1));
  return g;
}

inline std::vector<double> support_sample(const Prior& prior, std::size_t cap = 200) {
  if (!prior.is_density()) {
    std::vector<double> s;
    for (const auto& at : prior.atoms) s.push_back(at.theta);
    return subsample(s, cap);
  }
  return linspace(prior.theta_min, prior.theta_max, cap);
}

namespace detail {
// pooled and separated sender values for rho d_t1 + (1-rho) d_t2.
inline std::pair<double, double> pair_values(const PreferenceModel& m, double t1, double t2, double rho,
                                             double a1, double a2) {
  Posterior mu{{{t1, rho}, {t2, 1.0 - rho}}};
  double a = receiver_best_response(m, mu);
  return {rho * m.V(a, t1) + (1.0 - rho) * m.V(a, t2), rho * m.V(a1, t1) + (1.0 - rho) * m.V(a2, t2)};
}
}  // namespace detail

inline PairTestVerdict full_disclosure_test(const PreferenceModel& m, const Prior& prior,
                                            const std::vector<double>& rho_grid = default_rho_grid()) {
  auto s = support_sample(prior);
  std::vector<double> fd;
  for (double t : s) fd.push_back(full_disclosure_action(m, t));
  PairTestVerdict v;
  v.resolution = rho_grid.size();
  double tightest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      for (double rho : rho_grid) {
        auto [pooled, sep] = detail::pair_values(m, s[i], s[j], rho, fd[i], fd[j]);
        double margin = sep - pooled;
        double tol = 1e-10 * (1.0 + std::abs(sep));
        if (margin < -tol) {
          v.holds = v.strict = false;
          v.witness = PairWitness{s[i], s[j], rho, pooled, sep};
          return v;
        }
        if (margin <= tol) v.strict = false;
        if (margin < tightest) {
          tightest = margin;
          v.witness = PairWitness{s[i], s[j], rho, pooled, sep};
        }
      }
  return v;
}

// For each pair, some rho on the grid must make pooling strictly better.
inline PairTestVerdict pooling_test(const PreferenceModel& m, const Prior& prior,
                                    const std::vector<double>& rho_grid = default_rho_grid()) {
  auto s = support_sample(prior);
  std::vector<double> fd;
  for (double t : s) fd.push_back(full_disclosure_action(m, t));
  PairTestVerdict v;
  v.resolution = rho_grid.size();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      bool found = false;
      PairWitness best{s[i], s[j], 0.0, 0.0, 0.0};
      double best_gain = -std::numeric_limits<double>::infinity();
      for (double rho : rho_grid) {
        auto [pooled, sep] = detail::pair_values(m, s[i], s[j], rho, fd[i], fd[j]);
        double gain = pooled - sep;
        if (gain > best_gain) {
          best_gain = gain;
          best = PairWitness{s[i], s[j], rho, pooled, sep};
        }
        if (gain > 1e-10 * (1.0 + std::abs(sep))) {
          found = true;
          break;
        }
      }
      if (!found) {
        v.holds = v.strict = false;
        v.witness = best;
        return v;
      }
    }
  return v;
}

struct NdsddPoint {
  double a = 0.0, theta = 0.0;
  double lhs = 0.0, rhs = 0.0;
  bool pass = true;
};

inline std::vector<NdsddPoint> local_ndSDD_test(const PreferenceModel& m, const std::vector<double>& a_grid) {
  std::vector<NdsddPoint> out;
  for (double a : a_grid) {
    NdsddPoint p;
    p.a = a;
    try {
      p.theta = theta_star(m, a);
    } catch (const Error&) {
      continue;
    }
    double t = p.theta;
    double v = m.v(a, t), ua = m.u_a(a, t);
    double uaa = eval_u_aa(m, a, t), vt = eval_v_theta(m, a, t);
    double ut = eval_u_theta(m, a, t), uat = eval_u_atheta(m, a, t);
    p.lhs = eval_v_a(m, a, t);
    p.rhs = v * uaa / ua + 2.0 * (vt * ua - v * uat) / ut;
    p.pass = p.lhs <= p.rhs + 1e-10 * (1.0 + std::abs(p.rhs));
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Removal of strictly single-peaked triples for u = theta - a.

struct TripleRemovalReport {
  Outcome outcome;
  std::size_t iterations = 0;
  std::vector<double> values;  // value after each shift, starting with the input
};

inline TripleRemovalReport remove_single_peaked_triples(const Outcome& in, const PreferenceModel& m,
                                                        bool require_improvement = true,
                                                        std::size_t max_iterations = 100000) {
  if (!(m.family == Family::simple || m.family == Family::simple_receiver ||
        m.family == Family::translation_invariant))
    throw Error(ErrorKind::NotApplicable, "mass shifts preserve obedience only when u = theta - a");
  TripleRemovalReport rep;
  rep.outcome = in;
  std::map<std::pair<int, int>, double> mass;
  for (const auto& e : in.entries) mass[{e.a_index, e.theta_index}] += e.mass;
  auto rebuild = [&]() {
    Outcome o;
    o.a_grid = in.a_grid;
    o.theta_grid = in.theta_grid;
    for (const auto& [k, w] : mass)
      if (w > kSupportThreshold) o.entries.push_back({k.first, k.second, w});
    o.sort_entries();
    return o;
  };
  rep.values.push_back(value_under(in, m));
  for (; rep.iterations < max_iterations; ++rep.iterations) {
    // First strictly single-peaked triple in (a1, theta1, a2, theta2, theta3) order.
    std::optional<std::array<int, 5>> hit;
    std::map<int, std::vector<int>> by_a;
    for (const auto& [k, w] : mass)
      if (w > kSupportThreshold) by_a[k.first].push_back(k.second);
    for (auto it1 = by_a.begin(); it1 != by_a.end() && !hit; ++it1) {
      const auto& s1 = it1->second;
      if (s1.size() < 2) continue;
      for (auto it2 = std::next(it1); it2 != by_a.end() && !hit; ++it2)
        for (int j2 : it2->second) {
          auto lo = std::find_if(s1.rbegin(), s1.rend(), [&](int j) { return j < j2; });
          auto hi = std::find_if(s1.begin(), s1.end(), [&](int j) { return j > j2; });
          if (lo != s1.rend() && hi != s1.end()) {
            hit = std::array<int, 5>{it1->first, *lo, it2->first, j2, *hi};
            break;
          }
        }
    }
    if (!hit) break;
    auto [i1, j1, i2, j2, j3] = *hit;
    const double t1 = in.theta_grid[static_cast<std::size_t>(j1)];
    const double t2 = in.theta_grid[static_cast<std::size_t>(j2)];
    const double t3 = in.theta_grid[static_cast<std::size_t>(j3)];
    const double w1 = t3 - t2, w2 = t3 - t1, w3 = t2 - t1;
    double eps = std::min({mass[{i1, j1}] / w1, mass[{i2, j2}] / w2, mass[{i1, j3}] / w3});
    Mat3 R = r_matrix(m, in.a_grid[static_cast<std::size_t>(i1)], in.a_grid[static_cast<std::size_t>(i2)], t1, t2, t3);
    double gain = R[0][0] * w1 * eps + R[0][1] * w2 * eps + R[0][2] * w3 * eps;
    if (require_improvement && gain < -1e-12 * (1.0 + std::abs(rep.values.back())))
      throw Error(ErrorKind::NotApplicable, "triple shift would lower the sender's value");
    auto shift = [&](int from_a, int to_a, int j, double amount, double cur) {
      mass[{from_a, j}] = amount >= cur ? 0.0 : cur - amount;
      mass[{to_a, j}] += amount;
    };
    shift(i1, i2, j1, w1 * eps, mass[{i1, j1}]);
    shift(i2, i1, j2, w2 * eps, mass[{i2, j2}]);
    shift(i1, i2, j3, w3 * eps, mass[{i1, j3}]);
    // The binding entry is zeroed exactly so the triple disappears.
    double r1 = mass[{i1, j1}], r2 = mass[{i2, j2}], r3 = mass[{i1, j3}];
    if (r1 <= 1e-15) mass[{i1, j1}] = 0.0;
    if (r2 <= 1e-15) mass[{i2, j2}] = 0.0;
    if (r3 <= 1e-15) mass[{i1, j3}] = 0.0;
    rep.values.push_back(value_under(rebuild(), m));
  }
  rep.outcome = rebuild();
  return rep;
}

// ---------------------------------------------------------------------------
// Aggregate report for the classify pipeline.

struct StructureReport {
  TwistReport twist;
  std::optional<bool> pairwise_ok;
  std::optional<DippednessVerdict> dipped;
  SdpdReport sdpd;
  PairTestVerdict full_disclosure;
  PairTestVerdict pooling_nd;
  std::vector<NdsddPoint> local_ndsdd;
};

inline StructureReport classify_model(const PreferenceModel& m, const Prior& prior,
                                      const std::vector<double>& a_grid, const std::vector<double>& theta_grid,
                                      const SdpdOptions& opt = {}) {
  StructureReport rep;
  rep.twist = check_twist(m, a_grid, theta_grid);
  rep.sdpd = check_sdpd_conditions(m, a_grid, theta_grid, opt);
  rep.full_disclosure = full_disclosure_test(m, prior);
  rep.pooling_nd = pooling_test(m, prior);
  rep.local_ndsdd = local_ndSDD_test(m, a_grid);
  return rep;
}

}  // namespace persuasion
