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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "persuasion/dual_contact.hpp"
#include "persuasion/error.hpp"
#include "persuasion/fixtures.hpp"
#include "persuasion/nad_ode.hpp"
#include "persuasion/numeric.hpp"
#include "persuasion/structure.hpp"

namespace persuasion {

using json = nlohmann::json;

// Minimal CSV writer; numbers use the shortest round-trip representation.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

inline std::string cell(double x) { return format_double(x); }
inline std::string cell(std::size_t x) { return std::to_string(x); }
inline std::string cell(int x) { return std::to_string(x); }

// NaN and infinities have no JSON literal; they are written as null.
inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

inline void write_outcome_csv(const std::filesystem::path& path, const Outcome& o) {
  CsvWriter w(path, {"a", "theta", "mass"});
  for (const auto& e : o.entries)
    w.row({cell(o.a_grid[static_cast<std::size_t>(e.a_index)]),
           cell(o.theta_grid[static_cast<std::size_t>(e.theta_index)]), cell(e.mass)});
}

// State prices go to `path`; multipliers go to a sibling file with a _q suffix.
inline void write_dual_csv(const std::filesystem::path& path, const DualCertificate& c) {
  CsvWriter wp(path, {"theta", "p"});
  for (std::size_t j = 0; j < c.theta_grid.size(); ++j) wp.row({cell(c.theta_grid[j]), cell(c.p[j])});
  std::filesystem::path qpath = path;
  qpath.replace_filename(path.stem().string() + "_q" + path.extension().string());
  CsvWriter wq(qpath, {"a", "q", "Q_lo", "Q_hi", "rule"});
  for (std::size_t i = 0; i < c.a_grid.size(); ++i)
    wq.row({cell(c.a_grid[i]), cell(c.q[i]), cell(c.Q_lo[i]), cell(c.Q_hi[i]), to_string(c.rule[i])});
}

inline void write_contact_csv(const std::filesystem::path& path, const ContactSet& g) {
  CsvWriter w(path, {"a", "theta", "in_gamma", "in_gamma_star"});
  for (std::size_t i = 0; i < g.a_grid.size(); ++i)
    for (int j : g.gamma[i])
      w.row({cell(g.a_grid[i]), cell(g.theta_grid[static_cast<std::size_t>(j)]), "1",
             g.in_gamma_star(i, static_cast<std::size_t>(j)) ? "1" : "0"});
}

inline void write_nad_csv(const std::filesystem::path& path, const NadSolution& s) {
  CsvWriter w(path, {"a", "t1", "t2", "q"});
  for (std::size_t k = 0; k < s.a.size(); ++k) w.row({cell(s.a[k]), cell(s.t1[k]), cell(s.t2[k]), cell(s.q[k])});
}

inline json to_json(const Triple& t) {
  return {{"a1", t.a1}, {"theta1", t.theta1}, {"a2", t.a2}, {"theta2", t.theta2}, {"theta3", t.theta3}};
}

inline json to_json(const DippednessVerdict& v) {
  json j = {{"kind", to_string(v.kind)}};
  j["peaked_witness"] = v.peaked_triple ? to_json(*v.peaked_triple) : json(nullptr);
  j["dipped_witness"] = v.dipped_triple ? to_json(*v.dipped_triple) : json(nullptr);
  return j;
}

inline json to_json(const PairTestVerdict& v) {
  json j = {{"holds", v.holds}, {"strict", v.strict}, {"rho_resolution", v.resolution}};
  if (v.witness)
    j["witness"] = {{"theta1", v.witness->theta1}, {"theta2", v.witness->theta2}, {"rho", v.witness->rho}};
  else
    j["witness"] = nullptr;
  return j;
}

inline json to_json(const StructureReport& r) {
  json j;
  j["twist_ok"] = r.twist.ok;
  j["twist"] = {{"sign", r.twist.sign}, {"min_normalized", num(r.twist.min_normalized)}, {"triples", r.twist.triples}};
  j["pairwise_ok"] = r.pairwise_ok ? json(*r.pairwise_ok) : json(nullptr);
  j["dipped"] = r.dipped ? to_json(*r.dipped) : json(nullptr);
  j["sdpd_conditions"] = {{"strict_dipped", r.sdpd.strict_dipped}, {"weak_dipped", r.sdpd.weak_dipped},
                          {"strict_peaked", r.sdpd.strict_peaked}, {"weak_peaked", r.sdpd.weak_peaked},
                          {"monotone_dipped", r.sdpd.mono_dipped.strict},
                          {"monotone_peaked", r.sdpd.mono_peaked.strict},
                          {"variational_dipped", r.sdpd.var_dipped.certified},
                          {"variational_peaked", r.sdpd.var_peaked.certified}};
  j["full_disclosure"] = to_json(r.full_disclosure);
  j["pooling_nd"] = to_json(r.pooling_nd);
  json nd = json::array();
  for (const auto& p : r.local_ndsdd)
    nd.push_back({{"a", p.a}, {"theta", p.theta}, {"lhs", num(p.lhs)}, {"rhs", num(p.rhs)}, {"pass", p.pass}});
  j["local_ndSDD"] = nd;
  return j;
}

inline json to_json(const FixtureReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"measured", num(c.measured)}, {"tolerance", num(c.tolerance)},
                      {"pass", c.pass}, {"detail", c.detail}});
  return {{"fixture", r.id}, {"resolution", r.resolution}, {"pass", r.pass()}, {"checks", checks},
          {"facts", r.facts}};
}

}  // namespace persuasion
