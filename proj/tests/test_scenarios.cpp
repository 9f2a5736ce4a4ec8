#include <gtest/gtest.h>

#include "epicone/monotonicity.hpp"
#include "epicone/scenarios.hpp"

using namespace epicone;

namespace {

double traced_density(const Scenario& S) {
  TraceOptions o;
  o.r0 = 0.4;
  o.q = 0.5;
  o.steps = 8;
  o.C3 = S.C3;
  o.alpha3 = S.alpha3;
  return density(monotonicity_trace(S.T, S.x, o)).theta;
}

// compactly supported bump on the unit half-disk, zero on the diameter and the rim
double bump(const Point& z) {
  double s = 1 - z(0) * z(0) - z(1) * z(1);
  return s > 0 ? z(1) * s * s : 0.0;
}

}  // namespace

TEST(Scenarios, NamesAndUnknown) {
  auto names = scenario_names();
  EXPECT_EQ(names.size(), 6u);
  EXPECT_THROW(build_scenario("no-such-scenario"), UsageError);
  ScenarioParams p;
  p.resolution = 2;
  EXPECT_THROW(build_scenario("halfplane", p), UsageError);
}

TEST(Scenarios, BoundaryMatchesDeclaredCurve) {
  ScenarioParams p;
  p.resolution = 16;
  for (const auto& n : scenario_names()) {
    auto S = build_scenario(n, p);
    EXPECT_TRUE(boundary_matches(S, 0.5)) << n;
    EXPECT_EQ(S.T.dim, 2) << n;
    EXPECT_EQ(S.T.ambient, 4) << n;
  }
}

TEST(Scenarios, Densities) {
  ScenarioParams p;
  EXPECT_NEAR(traced_density(build_scenario("halfplane", p)), 0.5, 1e-10);
  EXPECT_NEAR(traced_density(build_scenario("multi-cone", p)), 2.5, 1e-10);
  p.Q = 1;
  EXPECT_NEAR(traced_density(build_scenario("multi-cone", p)), 1.5, 1e-10);
  EXPECT_NEAR(traced_density(build_scenario("perturbed-cone")), 0.5, 1e-4);
  EXPECT_NEAR(traced_density(build_scenario("kahler-line")), 0.5, 1e-4);
  EXPECT_NEAR(traced_density(build_scenario("curved-boundary-graph")), 0.5, 1e-3);
}

TEST(Scenarios, HemisphereMass) {
  ScenarioParams p;
  p.resolution = 64;
  auto S = build_scenario("hemisphere", p);
  EXPECT_NEAR(mass(S.T), 2 * pi, 0.005 * 2 * pi);
  for (const auto& v : S.T.vertices) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  EXPECT_NEAR(S.x.norm(), 1.0, 1e-15);
  EXPECT_NEAR(S.x(2), 0.0, 1e-15);
}

TEST(Scenarios, PlateauSolveIsStationary) {
  ScenarioParams p;
  p.resolution = 12;
  auto S = build_scenario("curved-boundary-graph", p);
  EXPECT_GT(S.plateau_iterations, 1);
  auto dT = boundary(S.T);
  std::vector<bool> on_bd(S.T.vertices.size(), false);
  for (const auto& s : dT.simplices) on_bd[s[0]] = on_bd[s[1]] = true;
  // finite-difference area gradient in the graph direction at free vertices
  auto grad = [&](SimplicialCurrent T, int v) {
    const double h = 1e-5;
    T.vertices[v](2) += h;
    double up = mass(T);
    T.vertices[v](2) -= 2 * h;
    double dn = mass(T);
    return (up - dn) / (2 * h);
  };
  double worst = 0;
  int checked = 0;
  for (std::size_t v = 0; v < S.T.vertices.size(); v += 7) {
    if (on_bd[v]) continue;
    worst = std::max(worst, std::abs(grad(S.T, static_cast<int>(v))));
    ++checked;
  }
  EXPECT_GT(checked, 10);
  EXPECT_LT(worst, 1e-8);
  // the unrelaxed harmonic model is not stationary for the discrete area
  ScenarioParams big = p;
  big.c = 0.6;
  auto Sb = build_scenario("curved-boundary-graph", big);
  auto raw = Sb.T;
  for (auto& v : raw.vertices) {
    double e = 1 + big.alpha, rho = std::hypot(v(0), v(1)), phi = std::atan2(v(1), v(0));
    double b = (1 - std::cos(e * pi)) / std::sin(e * pi);
    v(2) = rho == 0 ? 0.0 : big.c * std::pow(rho, e) * (std::cos(e * phi) + b * std::sin(e * phi));
  }
  EXPECT_GT(mass(raw), mass(Sb.T));
}

TEST(FirstVariation, RotationOfHemisphere) {
  ScenarioParams p;
  p.resolution = 32;
  auto S = build_scenario("hemisphere", p);
  auto X = [](const Point& z) {
    Point v = Point::Zero(4);
    v(0) = -z(1);
    v(1) = z(0);
    return v;
  };
  auto fv = first_variation(S.T, X, VariationMode::Spherical);
  EXPECT_LT(std::abs(fv.geometric), 1e-8);
  EXPECT_LT(std::abs(fv.formula), 1e-12);
}

TEST(FirstVariation, HemisphereRadialLift) {
  auto X = [](const Point& z) { return Point(z(2) * z); };
  double prev = 1e9;
  for (int res : {16, 32, 64}) {
    ScenarioParams p;
    p.resolution = res;
    auto S = build_scenario("hemisphere", p);
    auto fv = first_variation(S.T, X, VariationMode::Spherical);
    double err = std::abs(fv.geometric - 2 * pi);
    EXPECT_LT(err, prev);
    prev = err;
    if (res == 64) {
      EXPECT_NEAR(fv.geometric, 2 * pi, 0.01 * 2 * pi);
      EXPECT_NEAR(fv.formula, 2 * pi, 0.01 * 2 * pi);
    }
  }
}

TEST(FirstVariation, FlatAndHolomorphicBumps) {
  auto S = build_scenario("halfplane");
  auto X = [](const Point& z) { return Point(bump(z) * unit(4, 2)); };
  auto fv = first_variation(S.T, X, VariationMode::MeanCurvature);
  EXPECT_LT(std::abs(fv.geometric), 1e-8);
  EXPECT_EQ(fv.formula, 0.0);
  // semicalibrated with d omega(X, e1, e2) = X_3: the formula integrates the bump
  VariationOptions o;
  o.domega = [](const Point&, const Point& Xz, const Point&, const Point&) { return Xz(2); };
  auto fs = first_variation(S.T, X, VariationMode::Semicalibrated, o);
  // integral of x2 (1 - rho^2)^2 over the upper half-disk is 16/105
  EXPECT_NEAR(fs.formula, 16.0 / 105, 1e-6);
  auto K = build_scenario("kahler-line");
  auto Y = [](const Point& z) { return Point(bump(z) * unit(4, 3)); };
  auto fk = first_variation(K.T, Y, VariationMode::MeanCurvature);
  EXPECT_LT(std::abs(fk.geometric), 1e-3);
}

TEST(FirstVariation, RejectsNonTangentField) {
  ScenarioParams p;
  p.resolution = 16;
  auto S = build_scenario("hemisphere", p);
  auto X = [](const Point&) { return unit(4, 2); };
  EXPECT_THROW(first_variation(S.T, X, VariationMode::Spherical), UsageError);
}

TEST(AlmostMinimality, FlatConeFillIsExact) {
  auto S = build_scenario("halfplane");
  auto rep = verify_almost_minimality(S.T, S.x, {0.4, 0.2, 0.1, 0.05}, 0.0, 1.0);
  for (double m : rep.margin) EXPECT_LT(std::abs(m), 1e-12);
  EXPECT_LT(rep.C0_needed, 1e-10);
}

TEST(AlmostMinimality, RandomPatchesCostMass) {
  auto S = build_scenario("halfplane");
  AlmostMinOptions o;
  o.strategy = CompetitorStrategy::RandomPatch;
  o.seed = 5;
  auto rep = verify_almost_minimality(S.T, S.x, {0.4, 0.2, 0.1}, 0.0, 1.0, o);
  EXPECT_GT(rep.worst_margin, 0.0);
}

TEST(AlmostMinimality, CurvedGraphBeatsConeFill) {
  auto S = build_scenario("curved-boundary-graph");
  std::vector<double> radii;
  for (int j = 0; j < 6; ++j) radii.push_back(0.4 * std::pow(0.5, j));
  auto rep = verify_almost_minimality(S.T, S.x, radii, 0.0, S.holder);
  // the discrete area minimiser needs no slack against the cone competitor
  EXPECT_EQ(rep.C0_needed, 0.0);
  EXPECT_GT(rep.worst_margin, 0.0);
}

TEST(AlmostMinimality, DetectsNonMinimalPerturbation) {
  ScenarioParams p;
  p.k = 1;
  p.amplitude = 1.0;
  auto S = build_scenario("perturbed-cone", p);
  auto rep = verify_almost_minimality(S.T, S.x, {0.4, 0.2, 0.1}, 0.0, 1.0);
  EXPECT_LT(rep.worst_margin, 0.0);
  for (std::size_t j = 0; j < rep.radii.size(); ++j) EXPECT_LT(rep.mass_H[j], rep.mass_T[j]);
}
