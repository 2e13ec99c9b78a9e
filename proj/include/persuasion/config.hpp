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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "persuasion/core_model.hpp"
#include "persuasion/error.hpp"

namespace persuasion {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ProblemConfig {
  PreferenceModel model;
  Prior prior;
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where + ": missing '" + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  return v.get<double>();
}

inline std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) fail(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::vector<std::vector<double>> matrix(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + " must be an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : j) out.push_back(numbers(row, where));
  return out;
}

inline Curve curve(const json& j, const std::string& where) {
  const std::string kind = need(j, "kind", where).get<std::string>();
  Curve c;
  if (kind == "poly") {
    c = poly_curve(numbers(need(j, "coefficients", where), where + ".coefficients"));
  } else if (kind == "inverse") {
    c = inverse_curve();
  } else if (kind == "exp") {
    c = exp_curve(j.value("c", 1.0), j.value("k", 1.0));
  } else if (kind == "sin") {
    c = sine_curve(number(j, "k", where));
  } else if (kind == "hinge_sq") {
    c = hinge_square_curve(number(j, "knot", where));
  } else if (kind == "gauss_integral") {
    c = gauss_integral_curve();
  } else {
    fail(where + ": unknown curve kind '" + kind + "'");
  }
  if (j.contains("arg_scale")) c = scale_argument(c, number(j, "arg_scale", where));
  return c;
}

// V(a, theta) = sum c[i][j] a^i theta^j.
inline PreferenceModel bivariate_receiver(std::vector<std::vector<double>> c, Rect r) {
  auto eval = [c](double a, double t, int da, int dt) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c[i].size(); ++j) {
        if (static_cast<int>(i) < da || static_cast<int>(j) < dt) continue;
        double k = 1.0;
        for (int d = 0; d < da; ++d) k *= static_cast<double>(i) - d;
        for (int d = 0; d < dt; ++d) k *= static_cast<double>(j) - d;
        s += k * c[i][j] * std::pow(a, static_cast<double>(i) - da) * std::pow(t, static_cast<double>(j) - dt);
      }
    return s;
  };
  return make_simple_receiver([eval](double a, double t) { return eval(a, t, 0, 0); },
                              [eval](double a, double t) { return eval(a, t, 1, 0); }, r,
                              [eval](double a, double t) { return eval(a, t, 1, 1); },
                              [eval](double a, double t) { return eval(a, t, 2, 0); });
}

inline Prior prior(const json& j) {
  const std::string where = "prior";
  const std::string kind = need(j, "kind", where).get<std::string>();
  if (kind == "atoms") {
    std::vector<Atom> atoms;
    for (const auto& at : need(j, "atoms", where)) {
      auto pair = numbers(at, "prior.atoms[]");
      if (pair.size() != 2) fail("prior.atoms entries are [theta, mass]");
      atoms.push_back({pair[0], pair[1]});
    }
    double total = 0.0;
    for (const auto& at : atoms) {
      if (!(at.mass > 0.0)) fail("prior atom masses must be positive");
      total += at.mass;
    }
    if (std::abs(total - 1.0) > 1e-12) fail("prior atom masses must sum to 1");
    return atom_prior(std::move(atoms));
  }
  if (kind != "density") fail("prior.kind must be 'atoms' or 'density'");
  const std::string name = need(j, "density", where).get<std::string>();
  if (name == "piecewise_uniform")
    return piecewise_uniform_prior(numbers(need(j, "breaks", where), "prior.breaks"),
                                   numbers(need(j, "weights", where), "prior.weights"));
  auto support = numbers(need(j, "support", where), "prior.support");
  if (support.size() != 2 || !(support[1] > support[0])) fail("prior.support must be [lo, hi] with lo < hi");
  if (name == "uniform") return uniform_prior(support[0], support[1]);
  if (name == "reciprocal") {
    if (!(support[0] > 0.0)) fail("reciprocal density needs a positive support");
    return reciprocal_prior(support[0], support[1]);
  }
  fail("unknown density '" + name + "'");
}

}  // namespace config_detail

// Builds a problem from a parsed configuration document.
inline ProblemConfig problem_from_json(const json& doc) {
  using namespace config_detail;
  if (!doc.is_object()) fail("configuration must be a JSON object");
  if (need(doc, "schema_version", "config").get<int>() != kSchemaVersion)
    fail("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  const std::string family = need(doc, "family", "config").get<std::string>();
  const json params = doc.value("parameters", json::object());
  ProblemConfig problem;
  problem.prior = prior(need(doc, "prior", "config"));
  Rect r{problem.prior.theta_min, problem.prior.theta_max, problem.prior.theta_min, problem.prior.theta_max};
  if (!problem.prior.is_density()) {
    r.theta_lo = r.a_lo = problem.prior.atoms.front().theta;
    r.theta_hi = r.a_hi = problem.prior.atoms.back().theta;
  }
  if (doc.contains("rect")) {
    auto a = numbers(need(doc["rect"], "a", "rect"), "rect.a");
    auto t = numbers(need(doc["rect"], "theta", "rect"), "rect.theta");
    if (a.size() != 2 || t.size() != 2 || !(a[1] > a[0]) || !(t[1] > t[0]))
      fail("rect.a and rect.theta must be increasing [lo, hi] pairs");
    r = {a[0], a[1], t[0], t[1]};
  }
  const std::string where = "parameters";
  if (family == "simple") {
    problem.model = make_simple(curve(need(params, "V", where), "parameters.V"), r);
  } else if (family == "simple_receiver") {
    if (params.contains("w"))
      problem.model = make_separable_receiver(curve(params["w"], "parameters.w"), r);
    else
      problem.model = bivariate_receiver(matrix(need(params, "coefficients", where), "parameters.coefficients"), r);
  } else if (family == "simple_sender") {
    problem.model = make_simple_sender(curve(need(params, "V", where), "parameters.V"),
                                    curve(need(params, "T", where), "parameters.T"), r);
  } else if (family == "translation_invariant") {
    problem.model = make_translation_invariant(curve(need(params, "P", where), "parameters.P"), r);
  } else if (family == "contest") {
    problem.model = make_contest(number(params, "lo", where), number(params, "hi", where));
  } else if (family == "quantile") {
    Curve V = params.contains("V") ? curve(params["V"], "parameters.V") : poly_curve({0.0, 1.0});
    problem.model = make_quantile(number(params, "kappa", where), V);
  } else if (family == "custom") {
    auto as = numbers(need(params, "a_grid", where), "parameters.a_grid");
    auto ts = numbers(need(params, "theta_grid", where), "parameters.theta_grid");
    auto table = [&](const char* key) {
      return Table2(as, ts, matrix(need(params, key, where), (std::string("parameters.") + key).c_str()));
    };
    Table2 V = table("V"), v = table("v"), u = table("u"), ua = table("u_a");
    r = {as.front(), as.back(), ts.front(), ts.back()};
    problem.model = make_custom(V, v, u, ua, r);
  } else {
    fail("unknown family '" + family + "'");
  }
  return problem;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
}

inline ProblemConfig load_problem(const std::string& path) {
  try {
    return problem_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
}

}  // namespace persuasion
