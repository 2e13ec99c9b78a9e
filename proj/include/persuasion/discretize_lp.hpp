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
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "persuasion/core_model.hpp"
#include "persuasion/error.hpp"
#include "persuasion/simplex.hpp"

namespace persuasion {

struct DiscreteProblem {
  std::vector<double> a_grid;
  std::vector<double> theta_grid;
  std::vector<double> prior_mass;
  PreferenceModel model;
  bool atom_states = false;  // state grid is the exact support of an atom prior

  // Grid node standing for theta*(a): exact for atom supports, the nearest
  // node within half a step for discretized densities.
  std::optional<std::size_t> node_for(double t) const {
    std::size_t j = nearest_index(theta_grid, t);
    double tol = atom_states ? 1e-9 * (1.0 + std::abs(t)) : half_step(theta_grid, j) + 1e-15;
    if (std::abs(theta_grid[j] - t) > tol) return std::nullopt;
    return j;
  }
};

inline void validate(const DiscreteProblem& pb) {
  auto increasing = [](const std::vector<double>& g) {
    for (std::size_t i = 1; i < g.size(); ++i)
      if (!(g[i] > g[i - 1])) return false;
    return true;
  };
  if (pb.a_grid.empty() || pb.theta_grid.empty())
    throw Error(ErrorKind::ConfigError, "grids must be nonempty");
  if (!increasing(pb.a_grid) || !increasing(pb.theta_grid))
    throw Error(ErrorKind::ConfigError, "grids must be strictly increasing");
  if (pb.prior_mass.size() != pb.theta_grid.size())
    throw Error(ErrorKind::ConfigError, "prior mass length differs from the state grid");
  double total = 0.0;
  for (double w : pb.prior_mass) {
    if (w < 0.0) throw Error(ErrorKind::ConfigError, "negative prior mass");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::ConfigError, "prior mass must sum to 1");
}

// Uniform action grid over the model rectangle plus the state grid built from the prior.
inline DiscreteProblem make_problem(const PreferenceModel& m, const Prior& prior, std::size_t grid_a,
                                    std::size_t grid_theta) {
  DiscreteProblem pb;
  pb.model = m;
  pb.a_grid = linspace(m.rect.a_lo, m.rect.a_hi, grid_a);
  pb.theta_grid = default_theta_grid(prior, grid_theta);
  pb.prior_mass = prior_masses_on(prior, pb.theta_grid);
  pb.atom_states = !prior.is_density();
  // Absorb rounding so the masses sum to one exactly enough for validation.
  double total = 0.0;
  for (double w : pb.prior_mass) total += w;
  for (double& w : pb.prior_mass) w /= total;
  return pb;
}

// The primal LP with bookkeeping that maps columns and rows back to the grids.
struct PrimalLp {
  LpProblem lp;
  std::vector<int> col_a, col_theta;   // grid indices of each column
  std::vector<int> obedience_row;      // row index per action, -1 if dropped
  std::vector<double> row_scale;       // obedience row scaling 1 / max|u|
  std::size_t num_actions = 0, num_states = 0;
};

inline PrimalLp build_primal(const DiscreteProblem& pb, std::size_t variable_cap = 250000) {
  validate(pb);
  const std::size_t m = pb.a_grid.size(), n = pb.theta_grid.size();
  if (m * n > variable_cap)
    throw Error(ErrorKind::GridTooLarge, std::to_string(m * n) + " variables exceed the cap of " +
                                             std::to_string(variable_cap));
  PrimalLp out;
  out.num_actions = m;
  out.num_states = n;
  out.obedience_row.assign(m, -1);
  out.row_scale.assign(m, 0.0);
  LpProblem& lp = out.lp;
  lp.rows = static_cast<int>(n);
  lp.b = pb.prior_mass;
  std::vector<double> urow(n);
  for (std::size_t i = 0; i < m; ++i) {
    double umax = 0.0;
    bool has_nonpos = false, has_nonneg = false;
    for (std::size_t j = 0; j < n; ++j) {
      urow[j] = pb.model.u(pb.a_grid[i], pb.theta_grid[j]);
      if (pb.prior_mass[j] > 0.0) umax = std::max(umax, std::abs(urow[j]));
    }
    for (std::size_t j = 0; j < n; ++j) {
      // Rounding residue of an exact root counts as a root.
      if (std::abs(urow[j]) <= 1e-13 * umax) urow[j] = 0.0;
      if (pb.prior_mass[j] <= 0.0) continue;
      has_nonpos = has_nonpos || urow[j] <= 0.0;
      has_nonneg = has_nonneg || urow[j] >= 0.0;
    }
    // Constant-sign actions can never be obedient with positive mass.
    if (!(has_nonpos && has_nonneg)) continue;
    const double scale = umax > 0.0 ? 1.0 / umax : 1.0;
    const int row = lp.rows++;
    lp.b.push_back(0.0);
    out.obedience_row[i] = row;
    out.row_scale[i] = scale;
    for (std::size_t j = 0; j < n; ++j) {
      if (pb.prior_mass[j] <= 0.0) continue;
      std::vector<std::pair<int, double>> col{{static_cast<int>(j), 1.0}};
      if (urow[j] != 0.0) col.push_back({row, urow[j] * scale});
      lp.cols.push_back(std::move(col));
      lp.c.push_back(pb.model.V(pb.a_grid[i], pb.theta_grid[j]));
      out.col_a.push_back(static_cast<int>(i));
      out.col_theta.push_back(static_cast<int>(j));
    }
  }
  return out;
}

struct OutcomeEntry {
  int a_index;
  int theta_index;
  double mass;
};

// Sparse joint measure over (action, state) grid nodes.
struct Outcome {
  std::vector<double> a_grid, theta_grid;
  std::vector<OutcomeEntry> entries;

  std::vector<double> action_marginal() const {
    std::vector<double> alpha(a_grid.size(), 0.0);
    for (const auto& e : entries) alpha[e.a_index] += e.mass;
    return alpha;
  }
  std::vector<double> state_marginal() const {
    std::vector<double> phi(theta_grid.size(), 0.0);
    for (const auto& e : entries) phi[e.theta_index] += e.mass;
    return phi;
  }
  // Conditional pi_a as (theta index, probability), sorted by state.
  std::map<int, std::vector<std::pair<int, double>>> conditionals() const {
    std::map<int, std::vector<std::pair<int, double>>> out;
    for (const auto& e : entries) out[e.a_index].push_back({e.theta_index, e.mass});
    for (auto& [a, v] : out) {
      double total = 0.0;
      for (const auto& pr : v) total += pr.second;
      for (auto& pr : v) pr.second /= total;
      std::sort(v.begin(), v.end());
    }
    return out;
  }
  void sort_entries() {
    std::sort(entries.begin(), entries.end(), [](const OutcomeEntry& x, const OutcomeEntry& y) {
      return x.a_index != y.a_index ? x.a_index < y.a_index : x.theta_index < y.theta_index;
    });
  }
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  double dual_value = 0.0;
  Outcome outcome;
  std::vector<double> prior_mass;
  std::vector<double> dual_row_prices;  // p over the state grid
  std::vector<double> dual_obedience;   // q over the action grid, NaN if dropped
  std::int64_t iterations = 0;
  double max_reduced_cost = 0.0;
};

// Entries below this mass are treated as numerical zeros of degenerate bases.
inline constexpr double kSupportThreshold = 1e-13;

inline LpSolution solve_lp(const PrimalLp& primal, const DiscreteProblem& pb,
                           const SimplexOptions& opt = {}) {
  SimplexResult res = solve_simplex(primal.lp, opt);
  LpSolution sol;
  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.max_reduced_cost = res.max_reduced_cost;
  sol.prior_mass = pb.prior_mass;
  sol.outcome.a_grid = pb.a_grid;
  sol.outcome.theta_grid = pb.theta_grid;
  if (res.status == LpStatus::infeasible)
    throw Error(ErrorKind::Infeasible, "no obedience-consistent outcome on this grid");
  if (res.status == LpStatus::iteration_limit)
    throw Error(ErrorKind::IterationLimit, "simplex stopped after " + std::to_string(res.iterations) + " pivots");
  const std::size_t n = primal.num_states, m = primal.num_actions;
  for (std::size_t k = 0; k < res.x.size(); ++k) {
    if (res.x[k] > kSupportThreshold)
      sol.outcome.entries.push_back({primal.col_a[k], primal.col_theta[k], res.x[k]});
  }
  sol.outcome.sort_entries();
  sol.value = 0.0;
  for (const auto& e : sol.outcome.entries)
    sol.value += e.mass * pb.model.V(pb.a_grid[e.a_index], pb.theta_grid[e.theta_index]);
  sol.dual_row_prices.assign(res.y.begin(), res.y.begin() + static_cast<long>(n));
  sol.dual_obedience.assign(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < m; ++i) {
    int row = primal.obedience_row[i];
    // The LP row reads sum u x = 0; the multiplier in the p - q u >= V form is its negative.
    if (row >= 0) sol.dual_obedience[i] = -res.y[static_cast<std::size_t>(row)] * primal.row_scale[i];
  }
  // States without mass carry no column; give them the least feasible price.
  for (std::size_t j = 0; j < n; ++j) {
    if (pb.prior_mass[j] > 0.0) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (std::isnan(sol.dual_obedience[i])) continue;
      double a = pb.a_grid[i], t = pb.theta_grid[j];
      best = std::max(best, pb.model.V(a, t) + sol.dual_obedience[i] * pb.model.u(a, t));
    }
    sol.dual_row_prices[j] = std::isfinite(best) ? best : 0.0;
  }
  sol.dual_value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.dual_value += sol.dual_row_prices[j] * pb.prior_mass[j];
  return sol;
}

inline LpSolution solve_problem(const DiscreteProblem& pb, const SimplexOptions& opt = {}) {
  return solve_lp(build_primal(pb), pb, opt);
}

inline double duality_gap(const LpSolution& sol) { return std::abs(sol.value - sol.dual_value); }

inline double value_under(const Outcome& o, const PreferenceModel& m) {
  double s = 0.0;
  for (const auto& e : o.entries) s += e.mass * m.V(o.a_grid[e.a_index], o.theta_grid[e.theta_index]);
  return s;
}

struct FeasibilityReport {
  double max_p1 = 0.0;        // worst per-node state-marginal error
  double max_p2 = 0.0;        // worst per-action obedience residual
  double max_p2_scaled = 0.0; // same divided by max|u| of the action
  double total_mass = 0.0;
};

inline FeasibilityReport check_feasibility(const Outcome& o, const std::vector<double>& prior_mass,
                                           const PreferenceModel& m) {
  FeasibilityReport rep;
  auto phi = o.state_marginal();
  for (std::size_t j = 0; j < phi.size(); ++j)
    rep.max_p1 = std::max(rep.max_p1, std::abs(phi[j] - prior_mass[j]));
  std::map<int, std::pair<double, double>> obey;  // a -> (sum u x, max |u|)
  for (const auto& e : o.entries) {
    double uu = m.u(o.a_grid[e.a_index], o.theta_grid[e.theta_index]);
    auto& slot = obey[e.a_index];
    slot.first += uu * e.mass;
    slot.second = std::max(slot.second, std::abs(uu));
    rep.total_mass += e.mass;
  }
  for (const auto& [a, pr] : obey) {
    rep.max_p2 = std::max(rep.max_p2, std::abs(pr.first));
    if (pr.second > 0.0) rep.max_p2_scaled = std::max(rep.max_p2_scaled, std::abs(pr.first) / pr.second);
  }
  return rep;
}

// Outcome that discloses every state, placing each at its own best response.
// Requires each full-disclosure action to be an action-grid node.
inline Outcome full_disclosure_outcome(const DiscreteProblem& pb) {
  Outcome o;
  o.a_grid = pb.a_grid;
  o.theta_grid = pb.theta_grid;
  for (std::size_t j = 0; j < pb.theta_grid.size(); ++j) {
    if (pb.prior_mass[j] <= 0.0) continue;
    double a = full_disclosure_action(pb.model, pb.theta_grid[j]);
    std::size_t i = nearest_index(pb.a_grid, a);
    o.entries.push_back({static_cast<int>(i), static_cast<int>(j), pb.prior_mass[j]});
  }
  o.sort_entries();
  return o;
}

}  // namespace persuasion
