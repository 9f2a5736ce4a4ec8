#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "epicone/boundary_chart.hpp"
#include "epicone/curve.hpp"
#include "epicone/epiperimetric.hpp"
#include "epicone/flat_norm.hpp"
#include "epicone/monotonicity.hpp"
#include "epicone/scenarios.hpp"

using namespace epicone;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// ---- conversions ----------------------------------------------------------

json vec(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

Point point_from(const json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("expected a nonempty numeric array");
  Point p(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p(static_cast<int>(i)) = j[i].get<double>();
  return p;
}

Point parse_point(const std::string& s, int ambient) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      v.push_back(std::stod(cell));
    } catch (...) {
      throw UsageError("bad coordinate in point: " + cell);
    }
  }
  if (static_cast<int>(v.size()) != ambient)
    throw UsageError("point needs " + std::to_string(ambient) + " comma-separated coordinates");
  return Eigen::Map<Point>(v.data(), ambient);
}

json cone_json(const ConeSpec& S) {
  json j;
  j["ambient"] = S.ambient;
  j["half"] = {{"line", vec(S.half.line)}, {"inward", vec(S.half.inward)}};
  j["Q"] = S.Q;
  j["planes"] = json::array();
  for (const auto& p : S.planes) j["planes"].push_back({{"u", vec(p.plane.u)}, {"v", vec(p.plane.v)}, {"theta", p.theta}});
  j["density"] = S.density();
  return j;
}

ConeSpec cone_from(const json& j) {
  ConeSpec S;
  try {
    S.ambient = j.value("ambient", 4);
    S.half.line = point_from(j.at("half").at("line"));
    S.half.inward = point_from(j.at("half").at("inward"));
    S.Q = j.value("Q", 0);
    if (j.contains("planes"))
      for (const auto& p : j["planes"])
        S.planes.push_back({Plane2(point_from(p.at("u")), point_from(p.at("v"))), p.value("theta", 1)});
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad cone file: ") + e.what());
  }
  if (S.half.line.size() != S.ambient || S.half.inward.size() != S.ambient)
    throw UsageError("cone directions must have the ambient dimension");
  validate(S);
  return S;
}

json chain_json(const SimplicialCurrent& C) {
  json j;
  j["dim"] = C.dim;
  j["ambient"] = C.ambient;
  j["vertices"] = json::array();
  j["simplices"] = json::array();
  std::map<int, int> used;
  for (int i = 0; i < C.size(); ++i)
    for (int a = 0; a <= C.dim; ++a) used.emplace(C.simplices[i][a], 0);
  int k = 0;
  for (auto& [v, id] : used) {
    id = k++;
    j["vertices"].push_back(vec(C.vertices[v]));
  }
  for (int i = 0; i < C.size(); ++i) {
    json s = json::array();
    for (int a = 0; a <= C.dim; ++a) s.push_back(used[C.simplices[i][a]]);
    s.push_back(C.mult[i]);
    j["simplices"].push_back(s);
  }
  return j;
}

json fit_json(const DecayFit& f) {
  return {{"exponent", f.exponent}, {"constant", f.constant}, {"residual", f.residual},
          {"dropped", f.dropped},   {"void", f.is_void}};
}

json epi_json(const EpiReport& r) {
  json j;
  j["kind"] = r.kind;
  j["theta0"] = r.theta0;
  j["interior"] = r.interior;
  j["E_f"] = r.E_f;
  j["E_h"] = r.E_h;
  j["gap"] = r.gap;
  j["c0"] = r.c0;
  j["c0_mode"] = r.c0_mode;
  j["linear_coefficient"] = r.l0.size() ? vec(r.l0) : json::array();
  j["mass_H"] = r.mass_H;
  j["mass_S_B1"] = r.mass_S_B1;
  j["mass_cone_Z"] = r.mass_cone_Z;
  j["mass_S2"] = r.mass_S2;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["margin_error"] = r.margin_error;
  j["eps"] = r.eps;
  j["eps1"] = r.eps1;
  j["rho"] = r.rho;
  j["sup_y"] = r.sup_y;
  j["lip_y"] = r.lip_y;
  j["reconstruction_error"] = r.reconstruction_error;
  j["parseval_residual"] = r.parseval_residual;
  j["boundary_exact"] = r.boundary_exact;
  j["flat_gauge"] = r.flat_gauge;
  j["mass_gauge"] = r.mass_gauge;
  j["hausdorff_gauge"] = r.hausdorff_gauge;
  j["hypotheses_ok"] = r.hypotheses_ok;
  if (!r.components.empty()) {
    j["components"] = json::array();
    for (const auto& c : r.components) j["components"].push_back(epi_json(c));
  }
  return j;
}

// ---- output ------------------------------------------------------------------

struct Output {
  std::string dir;
  bool json_stdout = false;

  fs::path path(const std::string& name) const { return fs::path(dir) / name; }
  bool files() const { return !dir.empty(); }

  void prepare() const {
    if (files()) {
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw UsageError("cannot create output directory " + dir);
    }
  }
  void text(const std::string& name, const std::function<void(std::ostream&)>& write) const {
    if (!files()) return;
    std::ofstream f(path(name));
    if (!f) throw UsageError("cannot write " + path(name).string());
    write(f);
  }
  // Writes <cmd>.json when a directory is set; stdout gets the JSON with
  // --json and the summary lines otherwise.
  void report(const std::string& cmd, const json& j, const std::vector<std::string>& summary) const {
    text(cmd + ".json", [&](std::ostream& os) { os << j.dump(2) << "\n"; });
    if (json_stdout)
      std::cout << j.dump(2) << "\n";
    else
      for (const auto& s : summary) std::cout << s << "\n";
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::vector<double> default_radii() {
  std::vector<double> r;
  for (int j = 0; j < 8; ++j) r.push_back(0.2 * std::pow(0.5, j));
  return r;
}

void add_scenario_params(CLI::App* c, ScenarioParams& p) {
  c->add_option("--resolution", p.resolution, "angular cells per half turn")->check(CLI::Range(4, 4096));
  c->add_option("--scale", p.scale, "innermost graded radius");
  c->add_option("--Q", p.Q, "extra full sheets (multi-cone)")->check(CLI::NonNegativeNumber);
  c->add_option("--c", p.c, "curved boundary amplitude");
  c->add_option("--alpha", p.alpha, "curved boundary Holder exponent");
  c->add_option("--amplitude", p.amplitude, "perturbed-cone amplitude");
  c->add_option("--beta", p.beta, "perturbed-cone decay exponent");
  c->add_option("--k", p.k, "perturbed-cone angular mode");
  c->add_option("--eps", p.eps, "Kahler graph coefficient");
}

json scenario_params_json(const ScenarioParams& p) {
  return {{"resolution", p.resolution}, {"scale", p.scale}, {"R", p.R},         {"Q", p.Q},
          {"c", p.c},                   {"alpha", p.alpha}, {"amplitude", p.amplitude},
          {"beta", p.beta},             {"k", p.k},         {"eps", p.eps}};
}

// ---- subcommands -------------------------------------------------------------

struct C0Args {
  int theta0 = 0, K = 32, winding = 1;
  bool interior = false;
};

int run_c0(const C0Args& a, const Output& out) {
  auto g = gap_constant(a.theta0, a.K, a.interior, a.winding);
  json j;
  j["config"] = {{"theta0", a.theta0}, {"K", a.K}, {"interior", a.interior}, {"winding", a.winding}};
  j["c0"] = g.c0;
  j["mode"] = g.mode;
  j["by_order"] = g.by_order;
  j["first_order"] = g.first_order;
  out.report("c0", j, {"c0 " + fmt(g.c0), "mode " + std::to_string(g.mode)});
  return 0;
}

struct StraightenArgs {
  std::string gamma;
  int samples = 1000;
  double theta = pi / 16;
  int fit_samples = 200;
};

BoundaryGraph graph_from(const json& j) {
  std::string type = j.value("type", "power");
  BoundaryGraph g;
  int ambient = j.value("ambient", 4);
  if (type == "flat")
    g = flat_graph(ambient);
  else if (type == "power")
    g = power_graph(j.value("c", 0.1), j.value("p", 2.0), ambient, j.value("axis", 0));
  else if (type == "scenario")
    g = build_scenario(j.value("name", "curved-boundary-graph")).graph;
  else
    throw UsageError("unknown boundary graph type: " + type);
  if (j.contains("eps1")) g.eps1 = j["eps1"].get<double>();
  if (j.contains("r1")) g.r1 = j["r1"].get<double>();
  return g;
}

int run_straighten(const StraightenArgs& a, const Output& out) {
  std::ifstream f(a.gamma);
  if (!f) throw UsageError("cannot read " + a.gamma);
  json spec;
  try {
    spec = json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad boundary graph file: ") + e.what());
  }
  auto g = graph_from(spec);
  auto s = build_straightening(g, a.theta, a.samples);
  auto fit = fit_chart_constants(s.map, fit_samples(g.ambient, a.theta, a.fit_samples));
  const double tol_sphere = 1e-10, tol_gamma = 1e-8, tol_inverse = 1e-10, tol_jac = 1e-6;
  bool ok = s.checks.sphere_max_err <= tol_sphere && s.checks.gamma_max_err <= tol_gamma &&
            s.checks.inverse_max_err <= tol_inverse && s.checks.jacobian_max_err <= tol_jac;
  json j;
  j["config"] = {{"gamma", spec}, {"samples", a.samples}, {"theta", a.theta}, {"fit_samples", a.fit_samples}};
  j["sphere_max_err"] = s.checks.sphere_max_err;
  j["gamma_max_err"] = s.checks.gamma_max_err;
  j["inverse_max_err"] = s.checks.inverse_max_err;
  j["jacobian_max_err"] = s.checks.jacobian_max_err;
  j["seminorm"] = s.checks.seminorm;
  j["checked_samples"] = s.checks.samples;
  j["C1"] = fit.C1;
  j["alpha1"] = fit.alpha1;
  j["fit_constant"] = fit.constant;
  j["fit_residual"] = fit.residual;
  j["fit_valid"] = fit.valid;
  j["tolerances"] = {{"sphere", tol_sphere}, {"gamma", tol_gamma}, {"inverse", tol_inverse}, {"jacobian", tol_jac}};
  j["passed"] = ok;
  out.report("straighten", j,
             {"sphere_max_err " + fmt(s.checks.sphere_max_err), "gamma_max_err " + fmt(s.checks.gamma_max_err),
              "C1 " + fmt(fit.C1), "alpha1 " + fmt(fit.alpha1), "fit_residual " + fmt(fit.residual),
              ok ? "PASS" : "FAIL"});
  return ok ? 0 : 2;
}

struct LipArgs {
  std::string curve;
  double delta = 0.5;
  bool symmetric = false;
  ApproxOptions opt;
};

int run_lipapprox(const LipArgs& a, const Output& out) {
  std::ifstream f(a.curve);
  if (!f) throw UsageError("cannot read " + a.curve);
  auto c = read_curve_csv(f, a.symmetric);
  auto [approx, r] = lipschitz_approximate(c, a.delta, a.opt);
  out.text("approx.csv", [&](std::ostream& os) { write_curve_csv(os, approx); });
  bool ok = r.E_tilde <= r.E && r.sup_y_tilde <= r.sup_y;
  json j;
  j["config"] = {{"curve", a.curve},      {"delta", a.delta},   {"symmetric", a.symmetric},
                 {"eps0", a.opt.eps0},    {"C", a.opt.C},       {"min_gap", a.opt.min_gap},
                 {"samples", c.t.size()}, {"Q", c.Q}};
  j["E"] = r.E;
  j["E_tilde"] = r.E_tilde;
  j["sup_y"] = r.sup_y;
  j["sup_y_tilde"] = r.sup_y_tilde;
  j["lip"] = r.lip;
  j["lip_constant"] = r.lip_constant;
  j["sym_diff_mass"] = r.sym_diff_mass;
  j["sym_constant"] = r.sym_constant;
  j["bad_set_measure"] = r.bad_set_measure;
  j["weak_l1_constant"] = r.weak_l1_constant;
  j["components"] = r.components;
  j["kept_components"] = r.kept_components;
  j["period_convention"] = r.period_convention;
  j["passed"] = ok;
  out.report("lipapprox", j,
             {"E " + fmt(r.E), "E_tilde " + fmt(r.E_tilde), "sup_y " + fmt(r.sup_y), "lip " + fmt(r.lip),
              "sym_diff_mass " + fmt(r.sym_diff_mass), "bad_set_measure " + fmt(r.bad_set_measure),
              ok ? "PASS" : "FAIL"});
  return ok ? 0 : 2;
}

struct EpiArgs {
  std::string cone, curve, current;
  int theta0 = -1;
  int K = 32;
  double eps1 = -1, eps = -1, delta = 0.5;
  int radial = 32, levels = 2;
};

int run_epi(const EpiArgs& a, const Output& out) {
  if (a.curve.empty() == a.current.empty()) throw UsageError("give exactly one of --curve and --current");
  ConeSpec S = halfplane_cone(4);
  if (!a.cone.empty()) {
    std::ifstream f(a.cone);
    if (!f) throw UsageError("cannot read " + a.cone);
    try {
      S = cone_from(json::parse(f));
    } catch (const json::parse_error& e) {
      throw UsageError(std::string("bad cone file: ") + e.what());
    }
  }
  CompetitorOptions co;
  co.K = a.K;
  co.eps = a.eps;
  co.eps1 = a.eps1;
  co.radial = a.radial;
  co.levels = a.levels;
  EpiReport r;
  SimplicialCurrent H;
  int theta0 = a.theta0 >= 0 ? a.theta0 : S.Q;
  if (!a.curve.empty()) {
    std::ifstream f(a.curve);
    if (!f) throw UsageError("cannot read " + a.curve);
    auto z = read_curve_csv(f, false, false);
    auto c = build_competitor(z, theta0, co);
    r = c.report;
    H = c.H;
  } else {
    EpiCheckOptions eo;
    eo.delta = a.delta;
    eo.competitor = co;
    double eps1 = a.eps1 > 0 ? a.eps1 : gap_constant(theta0, a.K).c0 / 2;
    r = epiperimetric_check(S, load_current(a.current), eps1, eo);
  }
  if (H.size() > 0) out.text("competitor.cur", [&](std::ostream& os) { write_current(os, H); });
  bool ok = r.hypotheses_ok && r.margin - r.margin_error >= 0;
  json j;
  j["config"] = {{"cone", cone_json(S)}, {"curve", a.curve}, {"current", a.current}, {"theta0", theta0},
                 {"K", a.K},             {"eps1", a.eps1},   {"eps", a.eps},         {"delta", a.delta},
                 {"radial", a.radial},   {"levels", a.levels}};
  j["report"] = epi_json(r);
  j["passed"] = ok;
  out.report("epi-check", j,
             {"margin " + fmt(r.margin), "margin_error " + fmt(r.margin_error), "c0 " + fmt(r.c0),
              "eps1 " + fmt(r.eps1), ok ? "PASS" : "FAIL"});
  return ok ? 0 : 2;
}

struct FlatArgs {
  std::string a, b, center;
  double radius = 0;
};

int run_flatnorm(const FlatArgs& a, const Output& out) {
  auto T = load_current(a.a), S = load_current(a.b);
  if (T.ambient != S.ambient) throw UsageError("currents live in different ambient spaces");
  FlatResult r;
  if (a.radius > 0) {
    Point x = a.center.empty() ? Point(Point::Zero(T.ambient)) : parse_point(a.center, T.ambient);
    r = flat_distance(T, S, x, a.radius);
  } else {
    r = flat_distance(T, S);
  }
  out.text("witness_R.cur", [&](std::ostream& os) { write_current(os, r.R); });
  out.text("witness_Q.cur", [&](std::ostream& os) { write_current(os, r.Q); });
  bool ok = r.status == LPStatus::Optimal && r.integral;
  json j;
  j["config"] = {{"a", a.a}, {"b", a.b}, {"center", a.center}, {"radius", a.radius}};
  j["value"] = r.value;
  j["lp_status"] = to_string(r.status);
  j["integral"] = r.integral;
  j["iterations"] = r.iterations;
  j["branch_nodes"] = r.branch_nodes;
  j["cells"] = r.cells;
  j["faces"] = r.faces;
  j["mass_R"] = mass(r.R);
  j["mass_Q"] = mass(r.Q);
  j["passed"] = ok;
  out.report("flatnorm", j,
             {"value " + fmt(r.value), std::string("lp_status ") + to_string(r.status),
              std::string("integral ") + (r.integral ? "true" : "false")});
  return ok ? 0 : 2;
}

struct MonoArgs {
  std::string current, scenario, point;
  ScenarioParams params;
  TraceOptions trace;
  bool C3_set = false;
  bool slices = false;
  int facets = 64;
  double rel_tol = 1e-6;
};

int run_monotone(MonoArgs a, const Output& out) {
  if (a.current.empty() == a.scenario.empty()) throw UsageError("give exactly one of --current and --scenario");
  SimplicialCurrent T;
  Point x;
  if (!a.current.empty()) {
    T = load_current(a.current);
    x = a.point.empty() ? Point(Point::Zero(T.ambient)) : parse_point(a.point, T.ambient);
  } else {
    auto S = build_scenario(a.scenario, a.params);
    T = S.T;
    x = a.point.empty() ? S.x : parse_point(a.point, T.ambient);
    if (!a.C3_set) {
      a.trace.C3 = S.C3;
      a.trace.alpha3 = S.alpha3;
    }
  }
  auto tr = monotonicity_trace(T, x, a.trace);
  auto lc = ledger_check(tr, a.rel_tol);
  out.text("trace.csv", [&](std::ostream& os) {
    os << "r,mass,ratio,perp_integral\n" << std::setprecision(17);
    for (std::size_t j = 0; j < tr.radii.size(); ++j)
      os << tr.radii[j] << "," << tr.masses[j] << "," << tr.ratios[j] << ","
         << (j < tr.perp_integrals.size() ? tr.perp_integrals[j] : 0.0) << "\n";
  });
  json j;
  j["config"] = {{"current", a.current},     {"scenario", a.scenario},
                 {"point", vec(x)},          {"C3", a.trace.C3},
                 {"alpha3", a.trace.alpha3}, {"r0", a.trace.r0},
                 {"q", a.trace.q},           {"steps", a.trace.steps},
                 {"mesh_factor", a.trace.mesh_factor}, {"rel_tol", a.rel_tol},
                 {"slices", a.slices},       {"facets", a.facets}};
  if (!a.scenario.empty()) j["config"]["scenario_params"] = scenario_params_json(a.params);
  j["mesh"] = {{"simplices", T.size()}, {"vertices", T.vertices.size()}, {"dim", T.dim}, {"ambient", T.ambient}};
  j["radii"] = tr.radii;
  j["masses"] = tr.masses;
  j["ratios"] = tr.ratios;
  j["perp_integrals"] = tr.perp_integrals;
  j["warnings"] = tr.warnings;
  j["ledger"] = {{"ok", lc.ok},
                 {"monotone", lc.monotone},
                 {"tol", lc.tol},
                 {"worst_slack", lc.worst_slack},
                 {"worst_outer", lc.worst_outer},
                 {"worst_inner", lc.worst_inner},
                 {"worst_monotone", lc.worst_monotone}};
  bool ok = lc.ok;
  std::vector<std::string> summary{"radii " + std::to_string(tr.radii.size()), "worst_slack " + fmt(lc.worst_slack),
                                   std::string("ledger ") + (lc.ok ? "ok" : "violated")};
  if (tr.radii.size() >= 4 && lc.monotone) {
    auto d = density(tr, a.rel_tol);
    j["density"] = {{"theta", d.theta}, {"error", d.error}, {"last", d.last}, {"extrapolated", d.extrapolated}};
    summary.push_back("density " + fmt(d.theta) + " +- " + fmt(d.error));
  } else {
    j["density"] = nullptr;
  }
  if (a.slices) {
    SliceOptions so;
    so.C3 = a.trace.C3;
    so.alpha3 = a.trace.alpha3;
    so.facets = a.facets;
    j["slices"] = json::array();
    out.text("slices.csv", [&](std::ostream& os) {
      os << "r,s,lhs,rhs1,rhs2,method\n" << std::setprecision(17);
      for (std::size_t k = 0; k + 1 < tr.radii.size(); ++k) {
        auto sc = slice_continuity(T, x, tr.radii[k + 1], tr.radii[k], so);
        os << sc.r << "," << sc.s << "," << sc.lhs << "," << sc.rhs1 << "," << sc.rhs2 << "," << sc.lhs_method << "\n";
      }
    });
    for (std::size_t k = 0; k + 1 < tr.radii.size(); ++k) {
      auto sc = slice_continuity(T, x, tr.radii[k + 1], tr.radii[k], so);
      bool holds = sc.chain_holds();
      ok = ok && holds;
      j["slices"].push_back({{"r", sc.r},
                             {"s", sc.s},
                             {"lhs", sc.lhs},
                             {"lhs_method", sc.lhs_method},
                             {"M1", sc.M1},
                             {"M2", sc.M2},
                             {"rhs1", sc.rhs1},
                             {"rhs2", sc.rhs2},
                             {"tail", sc.tail},
                             {"holds", holds}});
    }
  }
  j["passed"] = ok;
  summary.push_back(ok ? "PASS" : "FAIL");
  out.report("monotone", j, summary);
  return ok ? 0 : 2;
}

struct BlowupArgs {
  std::string scenario;
  ScenarioParams params;
  std::vector<double> radii = default_radii();
  BlowupOptions opt;
};

int run_blowup(const BlowupArgs& a, const Output& out) {
  for (double r : a.radii)
    if (!(r > 0)) throw UsageError("radii must be positive");
  auto S = build_scenario(a.scenario, a.params);
  auto b = blowup(S.T, S.x, S.cone, a.radii, a.opt);
  auto series = [&](const std::string& name, const std::vector<double>& v) {
    out.text(name + ".csv", [&](std::ostream& os) {
      os << "r," << name << "\n" << std::setprecision(17);
      for (std::size_t i = 0; i < b.radii.size(); ++i) os << b.radii[i] << "," << v[i] << "\n";
    });
  };
  series("excess", b.excess);
  series("flat", b.flat);
  series("hausdorff", b.hausdorff);
  const double max_residual = 0.1;
  bool ok = true;
  for (const auto* f : {&b.excess_fit, &b.flat_fit, &b.hausdorff_fit})
    if (!f->is_void) ok = ok && f->exponent > 0 && f->residual < max_residual;
  json j;
  j["config"] = {{"scenario", a.scenario},
                 {"scenario_params", scenario_params_json(a.params)},
                 {"radii", a.radii},
                 {"facets", a.opt.facets},
                 {"hausdorff_k", a.opt.hausdorff_k},
                 {"hausdorff_rings", a.opt.hausdorff_rings},
                 {"max_residual", max_residual}};
  j["mesh"] = {{"simplices", S.T.size()}, {"vertices", S.T.vertices.size()}};
  j["theta"] = b.theta;
  j["excess"] = b.excess;
  j["flat"] = b.flat;
  j["hausdorff"] = b.hausdorff;
  j["hausdorff_symmetric"] = b.hausdorff_symmetric;
  j["fits"] = {{"excess", fit_json(b.excess_fit)}, {"flat", fit_json(b.flat_fit)}, {"hausdorff", fit_json(b.hausdorff_fit)}};
  j["passed"] = ok;
  auto line = [](const std::string& n, const DecayFit& f) {
    return n + " " + (f.is_void ? std::string("void") : "exponent " + fmt(f.exponent) + " residual " + fmt(f.residual));
  };
  out.report("blowup", j,
             {line("excess", b.excess_fit), line("flat", b.flat_fit), line("hausdorff", b.hausdorff_fit),
              ok ? "PASS" : "FAIL"});
  return ok ? 0 : 2;
}

struct ScenarioArgs {
  std::string name, out;
  ScenarioParams params;
  std::string almost_min;  // "", "cone" or "random"
  std::optional<std::uint64_t> seed;
  double C0 = -1, alpha0 = -1;
};

int run_scenario(const ScenarioArgs& a, const Output& out) {
  auto S = build_scenario(a.name, a.params);
  if (!a.out.empty()) save_current(a.out, S.T);
  bool ok = boundary_matches(S, 0.5 * a.params.R);
  json j;
  j["config"] = {{"name", a.name}, {"out", a.out}, {"params", scenario_params_json(a.params)}};
  j["mesh"] = {{"simplices", S.T.size()}, {"vertices", S.T.vertices.size()}, {"mass", mass(S.T)}};
  j["x"] = vec(S.x);
  j["expected_cone"] = cone_json(S.cone);
  j["gamma"] = chain_json(S.gamma);
  j["constants"] = {{"analytic", S.constants.analytic}, {"C0", S.constants.C0}, {"r0", S.constants.r0},
                    {"alpha0", S.constants.alpha0},     {"C3", S.C3},           {"alpha3", S.alpha3},
                    {"holder", S.holder}};
  j["plateau_iterations"] = S.plateau_iterations;
  j["boundary_matches"] = ok;
  std::vector<std::string> summary{"simplices " + std::to_string(S.T.size()), "mass " + fmt(mass(S.T)),
                                   std::string("boundary ") + (ok ? "matches" : "differs")};
  if (!a.almost_min.empty()) {
    AlmostMinOptions o;
    if (a.almost_min == "random") {
      if (!a.seed) throw UsageError("--seed is required with --almost-min random");
      o.strategy = CompetitorStrategy::RandomPatch;
      o.seed = *a.seed;
    } else if (a.almost_min != "cone") {
      throw UsageError("--almost-min takes cone or random");
    }
    double C0 = a.C0 >= 0 ? a.C0 : S.constants.C0;
    double alpha0 = a.alpha0 > 0 ? a.alpha0 : S.holder;
    std::vector<double> radii;
    for (int k = 0; k < 6; ++k) radii.push_back(0.4 * a.params.R * std::pow(0.5, k));
    auto rep = verify_almost_minimality(S.T, S.x, radii, C0, alpha0, o);
    bool am = rep.worst_margin >= 0;
    j["almost_minimality"] = {{"strategy", a.almost_min}, {"seed", a.seed ? json(*a.seed) : json(nullptr)},
                              {"C0", C0},                 {"alpha0", alpha0},
                              {"radii", rep.radii},       {"mass_T", rep.mass_T},
                              {"mass_H", rep.mass_H},     {"margin", rep.margin},
                              {"worst_margin", rep.worst_margin}, {"C0_needed", rep.C0_needed},
                              {"ok", am}};
    ok = ok && am;
    summary.push_back("almost-min worst margin " + fmt(rep.worst_margin) + ", C0 needed " + fmt(rep.C0_needed));
  }
  j["passed"] = ok;
  summary.push_back(ok ? "PASS" : "FAIL");
  if (!a.out.empty()) {
    fs::path side = fs::path(a.out).replace_extension(".json");
    std::ofstream f(side);
    if (!f) throw UsageError("cannot write " + side.string());
    f << j.dump(2) << "\n";
  }
  out.report("scenario", j, summary);
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary tangent cone toolkit"};
  app.require_subcommand(1);
  Output out;
  auto common = [&](CLI::App* c) {
    c->add_option("--out-dir", out.dir, "directory for the JSON report and CSV tables");
    c->add_flag("--json", out.json_stdout, "print the JSON report on stdout");
  };
  std::function<int()> action;

  C0Args c0;
  auto* cc0 = app.add_subcommand("c0", "gap constant and its attaining mode");
  cc0->add_option("--theta0", c0.theta0)->check(CLI::NonNegativeNumber);
  cc0->add_option("--K", c0.K)->check(CLI::PositiveNumber);
  cc0->add_flag("--interior", c0.interior);
  cc0->add_option("--winding", c0.winding)->check(CLI::PositiveNumber);
  common(cc0);
  cc0->callback([&] { action = [&] { return run_c0(c0, out); }; });

  StraightenArgs st;
  auto* cst = app.add_subcommand("straighten", "boundary straightening map checks and constant fit");
  cst->add_option("--gamma", st.gamma, "boundary graph JSON")->required();
  cst->add_option("--samples", st.samples)->check(CLI::Range(10, 1000000));
  cst->add_option("--theta", st.theta);
  cst->add_option("--fit-samples", st.fit_samples)->check(CLI::Range(100, 1000000));
  common(cst);
  cst->callback([&] { action = [&] { return run_straighten(st, out); }; });

  LipArgs la;
  auto* cla = app.add_subcommand("lipapprox", "Lipschitz approximation of a lifted curve");
  cla->add_option("--curve", la.curve, "curve CSV (t,theta,y1,...)")->required();
  cla->add_option("--delta", la.delta);
  cla->add_flag("--symmetric", la.symmetric);
  cla->add_option("--eps0", la.opt.eps0);
  cla->add_option("--C", la.opt.C);
  cla->add_option("--min-gap", la.opt.min_gap);
  common(cla);
  cla->callback([&] { action = [&] { return run_lipapprox(la, out); }; });

  EpiArgs ea;
  auto* cea = app.add_subcommand("epi-check", "epiperimetric competitor and inequality margin");
  cea->add_option("--cone", ea.cone, "cone JSON (default: the half-plane)");
  cea->add_option("--curve", ea.curve, "boundary component as a lifted curve CSV");
  cea->add_option("--current", ea.current, "cross-section as a 1-current on the unit sphere");
  cea->add_option("--theta0", ea.theta0);
  cea->add_option("--K", ea.K)->check(CLI::PositiveNumber);
  cea->add_option("--eps1", ea.eps1);
  cea->add_option("--eps", ea.eps);
  cea->add_option("--delta", ea.delta);
  cea->add_option("--radial", ea.radial)->check(CLI::PositiveNumber);
  cea->add_option("--levels", ea.levels)->check(CLI::Range(1, 4));
  common(cea);
  cea->callback([&] { action = [&] { return run_epi(ea, out); }; });

  FlatArgs fa;
  auto* cfa = app.add_subcommand("flatnorm", "flat distance between two currents with witness");
  cfa->add_option("--a", fa.a)->required();
  cfa->add_option("--b", fa.b)->required();
  cfa->add_option("--center", fa.center, "restrict to a ball: comma-separated centre");
  cfa->add_option("--radius", fa.radius, "restrict to a ball of this radius");
  common(cfa);
  cfa->callback([&] { action = [&] { return run_flatnorm(fa, out); }; });

  MonoArgs ma;
  auto* cma = app.add_subcommand("monotone", "almost-monotonicity trace and ledger");
  cma->add_option("--current", ma.current);
  cma->add_option("--scenario", ma.scenario);
  add_scenario_params(cma, ma.params);
  cma->add_option("--point", ma.point, "comma-separated base point");
  auto* oc3 = cma->add_option("--C3", ma.trace.C3);
  cma->add_option("--alpha3", ma.trace.alpha3);
  cma->add_option("--steps", ma.trace.steps)->check(CLI::Range(1, 200));
  cma->add_option("--r0", ma.trace.r0);
  cma->add_option("--q", ma.trace.q);
  cma->add_option("--mesh-factor", ma.trace.mesh_factor);
  cma->add_option("--rel-tol", ma.rel_tol);
  cma->add_flag("--slices", ma.slices, "slice continuity chain on consecutive radii");
  cma->add_option("--facets", ma.facets)->check(CLI::Range(8, 4096));
  common(cma);
  cma->callback([&] {
    ma.C3_set = oc3->count() > 0;
    action = [&] { return run_monotone(ma, out); };
  });

  BlowupArgs ba;
  auto* cba = app.add_subcommand("blowup", "decay of excess, flat and Hausdorff distance under blow-up");
  cba->add_option("--scenario", ba.scenario)->required();
  add_scenario_params(cba, ba.params);
  cba->add_option("--radii", ba.radii)->delimiter(',');
  cba->add_option("--facets", ba.opt.facets)->check(CLI::Range(8, 4096));
  common(cba);
  cba->callback([&] { action = [&] { return run_blowup(ba, out); }; });

  ScenarioArgs sa;
  auto* csa = app.add_subcommand("scenario", "build a scenario current with a JSON sidecar");
  csa->add_option("--name", sa.name)->required();
  csa->add_option("--out", sa.out, "current file; the sidecar goes next to it as .json");
  add_scenario_params(csa, sa.params);
  csa->add_option("--almost-min", sa.almost_min, "competitor check: cone or random");
  csa->add_option("--seed", sa.seed, "seed for random competitors");
  csa->add_option("--C0", sa.C0);
  csa->add_option("--alpha0", sa.alpha0);
  common(csa);
  csa->callback([&] { action = [&] { return run_scenario(sa, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    out.prepare();
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const MathError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
