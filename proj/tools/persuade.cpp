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

// persuade: command-line front end for the solver and its checks.
//
// Exit codes: 0 ok, 2 infeasible, 3 tolerance failure, 5 failed NAD
// precondition, 64 configuration error, 1 any other pipeline error. Every
// nonzero exit prints an error object to stderr and writes error.json.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "persuasion.hpp"

namespace fs = std::filesystem;
using namespace persuasion;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitTolerance = 3;
constexpr int kExitPrecondition = 5;
constexpr int kExitConfig = 64;
constexpr int kExitOther = 1;
constexpr std::size_t kMaxGrid = 5001;

struct RunConfig {
  std::string fixture_id;
  std::string config_path;
  std::vector<std::string> params;
  std::size_t grid_a = 0, grid_theta = 0;
  double tol_gap = 1e-8;
  double tol_contact = 0.0;  // 0 selects the default contact tolerance
  double tol_nad = 1e-3;
  double tol_dual = 1e-9;
  std::string out = "out";
  bool emit_csv = false;
  int jobs = 1;
  // subcommand-specific
  std::string orientation = "auto";
  std::size_t resolution = 0;
  std::string certificate;
};

struct Loaded {
  PreferenceModel model;
  Prior prior;
  std::optional<Fixture> fixture;
  std::string source;
};

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::UnknownFixture:
    case ErrorKind::GridTooLarge:
      return kExitConfig;
    case ErrorKind::Infeasible:
      return kExitInfeasible;
    case ErrorKind::PreconditionFailed:
    case ErrorKind::NotApplicable:
      return kExitPrecondition;
    default:
      return kExitOther;
  }
}

Params parse_params(const std::vector<std::string>& raw) {
  Params out;
  for (const auto& kv : raw) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::ConfigError, "--param expects k=v, got '" + kv + "'");
    try {
      std::size_t used = 0;
      std::string val = kv.substr(eq + 1);
      out[kv.substr(0, eq)] = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "--param value is not a number: '" + kv + "'");
    }
  }
  return out;
}

void validate(const RunConfig& rc) {
  for (std::size_t g : {rc.grid_a, rc.grid_theta})
    if (g != 0 && (g < 2 || g > kMaxGrid))
      throw Error(ErrorKind::ConfigError, "grid sizes must lie in [2, " + std::to_string(kMaxGrid) + "]");
  for (double t : {rc.tol_gap, rc.tol_nad, rc.tol_dual})
    if (!(t > 0.0)) throw Error(ErrorKind::ConfigError, "tolerances must be positive");
  if (rc.tol_contact < 0.0) throw Error(ErrorKind::ConfigError, "tolerances must be positive");
  if (rc.jobs < 1) throw Error(ErrorKind::ConfigError, "--jobs must be at least 1");
}

Loaded load(const RunConfig& rc) {
  validate(rc);
  if (rc.fixture_id.empty() == rc.config_path.empty())
    throw Error(ErrorKind::ConfigError, "give exactly one of --fixture or --config");
  Loaded ld;
  if (!rc.fixture_id.empty()) {
    Fixture fx = fixture(rc.fixture_id, parse_params(rc.params));
    ld.model = fx.model;
    ld.prior = fx.prior;
    ld.source = "fixture:" + rc.fixture_id;
    ld.fixture = std::move(fx);
  } else {
    ProblemConfig problem = load_problem(rc.config_path);
    ld.model = problem.model;
    ld.prior = problem.prior;
    ld.source = "config:" + rc.config_path;
  }
  return ld;
}

DiscreteProblem problem_for(const Loaded& ld, const RunConfig& rc) {
  std::size_t na = rc.grid_a ? rc.grid_a : 201, nt = rc.grid_theta ? rc.grid_theta : 201;
  return make_problem(ld.model, ld.prior, na, nt);
}

fs::path out_dir(const RunConfig& rc) {
  fs::path p(rc.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorKind::ConfigError, "cannot create output directory '" + rc.out + "'");
  return p;
}

json problem_header(const Loaded& ld, const DiscreteProblem* pb) {
  json j = {{"source", ld.source}, {"family", to_string(ld.model.family)}, {"model", ld.model.name}};
  if (pb) j["grid"] = {{"a", pb->a_grid.size()}, {"theta", pb->theta_grid.size()}};
  return j;
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& rc) {
  Loaded ld = load(rc);
  DiscreteProblem pb = problem_for(ld, rc);
  fs::path dir = out_dir(rc);
  LpSolution sol = solve_problem(pb);
  DualCertificate cert = select_q(sol.dual_row_prices, pb, rc.tol_contact);
  ContactSet gamma = contact_set(cert, pb, rc.tol_contact);
  SupportVerdict sv = verify_support_optimality(sol.outcome, gamma);

  bool pairwise = true;
  std::size_t widest = 0;
  for (const auto& [ai, cond] : sol.outcome.conditionals()) {
    pairwise = pairwise && gamma.gamma_star[static_cast<std::size_t>(ai)].size() <= 2;
    widest = std::max(widest, cond.size());
  }
  DippednessVerdict dipped = classify_dippedness(support_points(sol.outcome));

  write_outcome_csv(dir / "outcome.csv", sol.outcome);
  write_dual_csv(dir / "dual.csv", cert);
  write_contact_csv(dir / "contact.csv", gamma);

  const double gap = duality_gap(sol);
  const bool ok = gap <= rc.tol_gap && sv.pass;
  json s = problem_header(ld, &pb);
  s["status"] = ok ? "optimal" : "tolerance_failure";
  s["value"] = num(sol.value);
  s["dual_value"] = num(sol.dual_value);
  s["gap"] = num(gap);
  s["iterations"] = sol.iterations;
  s["support_size"] = sol.outcome.entries.size();
  s["contact_tolerance"] = num(gamma.eps);
  s["support_in_contact_set"] = sv.pass;
  s["complementary_slackness"] = num(complementary_slackness(sol.outcome, cert, pb.model));
  s["structure"] = {{"dipped", to_string(dipped.kind)},
                    {"dipped_witness", to_json(dipped)},
                    {"pairwise_ok", pairwise},
                    {"max_conditional_support", widest}};
  write_json(dir / "summary.json", s);
  std::cout << s.dump() << '\n';
  return ok ? kExitOk : kExitTolerance;
}

int cmd_classify(const RunConfig& rc) {
  Loaded ld = load(rc);
  DiscreteProblem pb = problem_for(ld, rc);
  fs::path dir = out_dir(rc);
  StructureReport rep = classify_model(ld.model, ld.prior, pb.a_grid, pb.theta_grid);
  json j = problem_header(ld, &pb);
  j.update(to_json(rep));
  write_json(dir / "structure.json", j);
  std::cout << j.dump() << '\n';
  return kExitOk;
}

Orientation pick_orientation(const Loaded& ld, const RunConfig& rc, const DiscreteProblem& pb, json& notes) {
  if (ld.model.family == Family::quantile) {
    if (rc.orientation == "peaked")
      throw Error(ErrorKind::PreconditionFailed, "quantile model pools dipped pairs only");
    notes["orientation_source"] = "quantile closed form";
    return Orientation::dipped;
  }
  SdpdReport sd = check_sdpd_conditions(ld.model, pb.a_grid, pb.theta_grid);
  notes["sdpd"] = {{"strict_dipped", sd.strict_dipped}, {"strict_peaked", sd.strict_peaked}};
  std::optional<Orientation> certified;
  if (sd.strict_dipped) certified = Orientation::dipped;
  else if (sd.strict_peaked) certified = Orientation::peaked;
  if (!certified)
    throw Error(ErrorKind::PreconditionFailed, "strict single-dipped or single-peaked conditions not certified");
  if (rc.orientation != "auto" && rc.orientation != to_string(*certified))
    throw Error(ErrorKind::PreconditionFailed, "requested orientation '" + rc.orientation +
                                                   "' but the certified orientation is " + to_string(*certified));
  notes["orientation_source"] = "strict conditions";
  return *certified;
}

int cmd_nad(const RunConfig& rc) {
  Loaded ld = load(rc);
  detail::require_density(ld.prior);
  DiscreteProblem pb = problem_for(ld, rc);
  fs::path dir = out_dir(rc);
  json report = problem_header(ld, nullptr);
  Orientation orient = pick_orientation(ld, rc, pb, report);
  NadSolution sol = nad_shoot(ld.model, ld.prior, orient);
  NadReport ver = nad_verify(sol, ld.model, ld.prior, rc.tol_nad);
  SandLeverResult sl = sand_lever_assign(sol, ld.prior, ld.model, rc.grid_theta ? rc.grid_theta : 2001);

  write_nad_csv(dir / "nad.csv", sol);
  write_outcome_csv(dir / "nad_outcome.csv", sl.outcome);
  report["orientation"] = to_string(orient);
  report["a_lo"] = num(sol.a_lo);
  report["a_hi"] = num(sol.a_hi);
  report["mesh_step"] = num(sol.h);
  report["matching_residual"] = num(sol.matching_residual);
  report["bisection_steps"] = sol.bisection_steps;
  report["closed_form"] = sol.closed_form;
  report["verify"] = {{"obedience", num(ver.obedience)}, {"foc", num(ver.foc)},
                      {"boundary", num(ver.boundary)}, {"tolerance", rc.tol_nad}, {"pass", ver.pass}};
  report["sand_lever"] = {{"value", num(value_under(sl.outcome, ld.model))},
                          {"tracking_error", num(sl.tracking_error)},
                          {"max_deficit", num(sl.max_deficit)},
                          {"levers", sl.levers}};
  write_json(dir / "report.json", report);
  std::cout << report.dump() << '\n';
  return ver.pass ? kExitOk : kExitTolerance;
}

void write_fixture_curves(const fs::path& path, const Fixture& fx) {
  CsvWriter w(path, {"curve", "x", "value"});
  auto emit = [&](const char* name, const Fn1& f, double lo, double hi) {
    if (!f) return;
    for (double x : linspace(lo, hi, 201)) w.row({name, cell(x), cell(f(x))});
  };
  const Rect& r = fx.model.rect;
  emit("p", fx.p, r.theta_lo, r.theta_hi);
  emit("q", fx.q, r.a_lo, r.a_hi);
  double lo = fx.a_lo.value_or(r.a_lo), hi = fx.a_hi.value_or(r.a_hi);
  emit("t1", fx.t1, lo, hi);
  emit("t2", fx.t2, lo, hi);
  emit("q_nad", fx.q_nad, lo, hi);
}

int cmd_fixture(const RunConfig& rc, const std::string& id) {
  validate(rc);
  Params params = parse_params(rc.params);
  FixtureReport rep = run_fixture(id, rc.resolution, params);
  fs::path dir = out_dir(rc);
  json j = to_json(rep);
  j["note"] = fixture(id, params).note;
  write_json(dir / "fixture.json", j);
  if (rc.emit_csv) write_fixture_curves(dir / "fixture_curves.csv", fixture(id, params));
  std::cout << j.dump() << '\n';
  return rep.pass() ? kExitOk : kExitTolerance;
}

int cmd_dual_check(const RunConfig& rc) {
  Loaded ld = load(rc);
  json cj = read_json_file(rc.certificate);
  DiscreteProblem pb;
  DualCertificate cert;
  try {
    pb.model = ld.model;
    pb.a_grid = cj.at("a").get<std::vector<double>>();
    pb.theta_grid = cj.at("theta").get<std::vector<double>>();
    cert.p = cj.at("p").get<std::vector<double>>();
    cert.q = cj.at("q").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, rc.certificate + ": " + e.what());
  }
  if (cert.p.size() != pb.theta_grid.size() || cert.q.size() != pb.a_grid.size())
    throw Error(ErrorKind::ConfigError, "certificate vectors do not match their grids");
  pb.prior_mass = prior_masses_on(ld.prior, pb.theta_grid);
  pb.atom_states = !ld.prior.is_density();
  double total = 0.0;
  for (double w : pb.prior_mass) total += w;
  for (double& w : pb.prior_mass) w /= total;
  validate(pb);
  cert.a_grid = pb.a_grid;
  cert.theta_grid = pb.theta_grid;

  fs::path dir = out_dir(rc);
  double worst = d1_min_residual(cert, pb.model, pb.prior_mass);
  double dual_value = 0.0;
  for (std::size_t j = 0; j < pb.theta_grid.size(); ++j) dual_value += cert.p[j] * pb.prior_mass[j];
  LpSolution sol = solve_problem(pb);
  const bool feasible = worst >= -rc.tol_dual;
  const bool optimal = feasible && std::abs(dual_value - sol.value) <= rc.tol_gap;
  json j = problem_header(ld, &pb);
  j["min_d1_residual"] = num(worst);
  j["certificate_value"] = num(dual_value);
  j["lp_value"] = num(sol.value);
  j["value_gap"] = num(dual_value - sol.value);
  j["feasible"] = feasible;
  j["optimal"] = optimal;
  write_json(dir / "dual_check.json", j);
  std::cout << j.dump() << '\n';
  return optimal ? kExitOk : kExitTolerance;
}

int report_error(const RunConfig& rc, const std::string& kind, const std::string& message, int code) {
  json err = {{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << err.dump() << '\n';
  std::error_code ec;
  fs::create_directories(rc.out, ec);
  if (!ec) {
    std::ofstream f(fs::path(rc.out) / "error.json");
    if (f) f << err.dump(2) << '\n';
  }
  return code;
}

void add_problem_options(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--fixture", rc.fixture_id, "Built-in fixture id");
  sub->add_option("--config", rc.config_path, "Problem configuration (JSON)");
  sub->add_option("--param", rc.params, "Fixture parameter k=v (repeatable)");
  sub->add_option("--grid-a", rc.grid_a, "Action grid size");
  sub->add_option("--grid-theta", rc.grid_theta, "State grid size (densities only)");
}

void add_common_options(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--tol-gap", rc.tol_gap, "Duality gap tolerance");
  sub->add_option("--tol-contact", rc.tol_contact, "Contact set tolerance (default scales with max |V|)");
  sub->add_option("--tol-nad", rc.tol_nad, "NAD verification tolerance");
  sub->add_option("--tol-dual", rc.tol_dual, "Certificate feasibility tolerance");
  sub->add_option("--out", rc.out, "Output directory");
  sub->add_flag("--emit-csv", rc.emit_csv, "Also write artifact curves as CSV");
  sub->add_option("--jobs", rc.jobs, "Worker thread cap (pipelines run single-threaded)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal persuasion solver and certificate checks"};
  app.require_subcommand(1);
  RunConfig rc;
  std::string fixture_id;

  auto* solve = app.add_subcommand("solve", "Solve the discretized LP and recover the dual certificate");
  auto* classify = app.add_subcommand("classify", "Run structural tests without solving");
  auto* nad = app.add_subcommand("nad", "Negative assortative disclosure shooter and sand-lever assignment");
  auto* fix = app.add_subcommand("fixture", "Run a built-in fixture against its closed forms");
  auto* dual = app.add_subcommand("dual-check", "Verify a supplied (p, q) certificate");
  for (auto* sub : {solve, classify, nad, dual}) {
    add_problem_options(sub, rc);
    add_common_options(sub, rc);
  }
  add_common_options(fix, rc);
  fix->add_option("id", fixture_id, "Fixture id")->required();
  fix->add_option("--resolution", rc.resolution, "Grid or mesh resolution (default: per fixture)");
  fix->add_option("--param", rc.params, "Fixture parameter k=v (repeatable)");
  nad->add_option("--orientation", rc.orientation, "auto, dipped or peaked")
      ->check(CLI::IsMember({"auto", "dipped", "peaked"}));
  dual->add_option("--certificate", rc.certificate, "Certificate JSON with a, q, theta, p")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return report_error(rc, "ConfigError", e.what(), kExitConfig);
  }

  try {
    if (*solve) return cmd_solve(rc);
    if (*classify) return cmd_classify(rc);
    if (*nad) return cmd_nad(rc);
    if (*fix) return cmd_fixture(rc, fixture_id);
    if (*dual) return cmd_dual_check(rc);
  } catch (const Error& e) {
    return report_error(rc, to_string(e.kind()), e.what(), exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    return report_error(rc, "InternalError", e.what(), kExitOther);
  }
  return kExitOther;
}
