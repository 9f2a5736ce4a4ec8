#include <gtest/gtest.h>

#include "epicone/epiperimetric.hpp"

using namespace epicone;

namespace {

struct Samples {
  std::vector<double> t;
  std::vector<Point> y;
};

// y(t) = sum amp_j sin(nu_j t) e_(comp_j) on [0, Lambda], n + 1 samples
Samples modes(int theta0, const std::vector<std::pair<int, double>>& km, int n = 1000, int codim = 2) {
  Samples s;
  double L = (2 * theta0 + 1) * pi;
  for (int i = 0; i <= n; ++i) {
    double t = i == n ? L : L * i / n;
    Point y = Point::Zero(codim);
    for (auto [k, a] : km) y(0) += a * std::sin(double(k) / (2 * theta0 + 1) * t);
    if (i == 0 || i == n) y.setZero();
    s.t.push_back(t);
    s.y.push_back(y);
  }
  return s;
}

LiftedCurve graph_curve(const Samples& s) {
  LiftedCurve c;
  c.t = s.t;
  c.theta = s.t;
  c.y = s.y;
  c.Q = 1;
  c.L = s.t.back() - s.t.front();
  return c;
}

}  // namespace

TEST(Fourier, BasisFunction) {
  auto s = modes(0, {{1, 1.0}});
  auto p = fourier_analyze(s.t, s.y, 0, 32);
  EXPECT_NEAR(p.a[1](0), 1.0, 1e-8);
  for (int k = 2; k <= 32; ++k) EXPECT_LT(p.a[k].norm(), 1e-8) << k;
  EXPECT_LT(std::abs(p.parseval_residual), 1e-8);
}

TEST(Fourier, TwoModes) {
  auto s = modes(0, {{2, 0.3}, {5, 0.1}});
  auto p = fourier_analyze(s.t, s.y, 0, 32);
  EXPECT_NEAR(p.a[2](0), 0.3, 1e-6);
  EXPECT_NEAR(p.a[5](0), 0.1, 1e-6);
  EXPECT_LT(p.reconstruction_error, 1e-8);
}

TEST(Fourier, FractionalMode) {
  auto s = modes(1, {{1, 0.2}});
  auto p = fourier_analyze(s.t, s.y, 1, 32);
  EXPECT_NEAR(p.a[1](0), 0.2, 1e-6);
  EXPECT_NEAR(p.Lambda, 3 * pi, 1e-15);
}

TEST(Fourier, NonzeroEndpointRejected) {
  Samples s;
  for (int i = 0; i <= 10; ++i) {
    s.t.push_back(pi * i / 10);
    s.y.push_back(Point::Constant(1, 0.1));
  }
  EXPECT_THROW(fourier_analyze(s.t, s.y, 0, 8), UsageError);
}

TEST(Fourier, InteriorConstantAndCosine) {
  Samples s;
  int n = 800;
  for (int i = 0; i <= n; ++i) {
    double t = 0.3 + 4 * pi * i / n;
    Point y(1);
    y(0) = 0.1 + 0.2 * std::cos(3 * (t - 0.3) / 2);
    s.t.push_back(t);
    s.y.push_back(y);
  }
  auto p = fourier_analyze(s.t, s.y, 0, 8, true, 2);
  EXPECT_NEAR(p.b[0](0), 0.1, 1e-10);
  EXPECT_NEAR(p.b[3](0), 0.2, 1e-10);
  EXPECT_LT(p.reconstruction_error, 1e-9);
}

TEST(Extension, ZeroProfile) {
  auto s = modes(0, {}, 100);
  auto p = fourier_analyze(s.t, s.y, 0, 8);
  auto f = extend_cone(p);
  EXPECT_EQ(f.value(0.5, 1.0).norm(), 0.0);
  EXPECT_EQ(dirichlet_energy(f), 0.0);
}

TEST(Extension, LinearModeCoincides) {
  for (int th = 0; th <= 2; ++th) {
    auto s = modes(th, {{2 * th + 1, 0.4}});
    auto p = fourier_analyze(s.t, s.y, th, 16);
    auto f = extend_cone(p), h = extend_homogeneous(p);
    for (double r : {0.1, 0.5, 0.9})
      for (double t : {0.3, 1.7, 2.9}) {
        EXPECT_NEAR((f.value(r, t) - h.value(r, t)).norm(), 0, 1e-12);
        EXPECT_NEAR(f.grad(r, t).squared(), 0.16, 1e-9);
      }
  }
}

TEST(Extension, GradientMatchesFiniteDifferences) {
  auto s = modes(1, {{2, 0.3}, {5, 0.1}});
  auto p = fourier_analyze(s.t, s.y, 1, 16);
  for (bool hom : {false, true}) {
    Extension e(p, hom);
    for (double r : {0.2, 0.6}) {
      for (double t : {0.5, 4.0, 8.0}) {
        double d = 1e-6;
        Point dr = (e.value(r + d, t) - e.value(r - d, t)) / (2 * d);
        Point dt = (e.value(r, t + d) - e.value(r, t - d)) / (2 * d * r);
        auto g = e.grad(r, t);
        EXPECT_LT((g.dr - dr).norm(), 1e-6);
        EXPECT_LT((g.dt - dt).norm(), 1e-6);
      }
    }
  }
}

TEST(Extension, HomogeneousIsHarmonic) {
  auto s = modes(1, {{1, 0.2}, {2, 0.3}, {4, 0.1}});
  auto p = fourier_analyze(s.t, s.y, 1, 16);
  auto h = extend_homogeneous(p);
  double d = 1e-3;
  for (double r : {0.3, 0.5, 0.8})
    for (double t : {1.0, 4.5, 7.0}) {
      auto u = [&](double rr, double tt) { return h.value(rr, tt)(0); };
      double urr = (u(r + d, t) - 2 * u(r, t) + u(r - d, t)) / (d * d);
      double ur = (u(r + d, t) - u(r - d, t)) / (2 * d);
      double utt = (u(r, t + d) - 2 * u(r, t) + u(r, t - d)) / (d * d);
      EXPECT_LT(std::abs(urr + ur / r + utt / (r * r)), 1e-4);
    }
}

TEST(Energy, ClosedFormsSingleMode) {
  auto s = modes(0, {{2, 1.0}});
  auto p = fourier_analyze(s.t, s.y, 0, 32);
  double Ef = dirichlet_energy(extend_cone(p)), Eh = dirichlet_energy(extend_homogeneous(p));
  EXPECT_NEAR(Ef, 5 * pi / 4, 1e-8);
  EXPECT_NEAR(Eh, pi, 1e-8);
  EXPECT_NEAR(Ef - Eh, pi / 4, 1e-8);
}

TEST(Energy, ClosedFormsAllModes) {
  for (int th = 0; th <= 2; ++th) {
    double L = (2 * th + 1) * pi;
    for (int k = 1; k <= 8; ++k) {
      auto s = modes(th, {{k, 0.7}}, 2000);
      auto p = fourier_analyze(s.t, s.y, th, 12);
      double nu = double(k) / (2 * th + 1);
      EXPECT_NEAR(dirichlet_energy(extend_cone(p)), mode_energy_cone(0.49, nu, L), 1e-8) << th << " " << k;
      EXPECT_NEAR(dirichlet_energy(extend_homogeneous(p)), mode_energy_homogeneous(0.49, nu, L), 1e-8) << th << " " << k;
    }
  }
}

TEST(Energy, ModeOrthogonality) {
  auto s = modes(1, {{1, 0.2}, {2, -0.3}, {5, 0.15}, {7, 0.05}}, 3000);
  auto p = fourier_analyze(s.t, s.y, 1, 12);
  double L = 3 * pi, sf = 0, sh = 0;
  for (auto [k, a] : std::vector<std::pair<int, double>>{{1, 0.2}, {2, -0.3}, {5, 0.15}, {7, 0.05}}) {
    sf += mode_energy_cone(a * a, k / 3.0, L);
    sh += mode_energy_homogeneous(a * a, k / 3.0, L);
  }
  EXPECT_NEAR(dirichlet_energy(extend_cone(p)), sf, 1e-8);
  EXPECT_NEAR(dirichlet_energy(extend_homogeneous(p)), sh, 1e-8);
}

TEST(Energy, ScalingCovariance) {
  auto s = modes(0, {{2, 0.03}, {3, 0.01}});
  auto p = fourier_analyze(s.t, s.y, 0, 16);
  auto s2 = s;
  for (auto& y : s2.y) y *= 3.0;
  auto p2 = fourier_analyze(s2.t, s2.y, 0, 16);
  double Ef = dirichlet_energy(extend_cone(p)), Eh = dirichlet_energy(extend_homogeneous(p));
  EXPECT_NEAR(dirichlet_energy(extend_cone(p2)), 9 * Ef, 1e-10);
  EXPECT_NEAR(dirichlet_energy(extend_homogeneous(p2)), 9 * Eh, 1e-10);
}

TEST(Energy, GapDominatesNonlinearPart) {
  for (int th = 0; th <= 1; ++th) {
    auto g = gap_constant(th, 16);
    auto s = modes(th, {{1, 0.02}, {2, 0.03}, {2 * th + 1, 0.05}, {4, -0.02}, {6, 0.01}}, 2000);
    auto p = fourier_analyze(s.t, s.y, th, 16);
    double Ef = dirichlet_energy(extend_cone(p)), Eh = dirichlet_energy(extend_homogeneous(p));
    double a0 = p.a[2 * th + 1].squaredNorm();
    double El0 = mode_energy_cone(a0, 1.0, p.Lambda);
    EXPECT_GE(Ef - Eh, -1e-9);
    EXPECT_GE(Ef - Eh, g.c0 * (Ef - El0) - 1e-9);
  }
}

TEST(GapConstant, Values) {
  auto g0 = gap_constant(0, 3);
  EXPECT_NEAR(g0.c0, 0.2, 1e-15);
  EXPECT_EQ(g0.mode, 2);
  auto g1 = gap_constant(1, 10);
  EXPECT_NEAR(g1.c0, 0.04, 1e-15);
  EXPECT_EQ(g1.mode, 4);
  for (std::size_t i = 1; i < g1.by_order.size(); ++i) EXPECT_LE(g1.by_order[i], g1.by_order[i - 1]);
  EXPECT_THROW(gap_constant(1, 3), UsageError);
}

TEST(GapConstant, QuadratureRatioPerMode) {
  // the ratio gap / (E_f - E_l0) per mode, measured by quadrature
  for (int th = 0; th <= 1; ++th) {
    auto g = gap_constant(th, 10);
    double best = 1e9;
    for (int k = 1; k <= 10; ++k) {
      if (k == 2 * th + 1) continue;
      auto s = modes(th, {{k, 1.0}}, 2000);
      auto p = fourier_analyze(s.t, s.y, th, 12);
      double Ef = dirichlet_energy(extend_cone(p)), Eh = dirichlet_energy(extend_homogeneous(p));
      best = std::min(best, (Ef - Eh) / Ef);
    }
    EXPECT_NEAR(best, g.c0, 1e-8);
  }
}

TEST(Competitor, FlatCrossSection) {
  auto s = modes(0, {}, 128);
  auto c = build_competitor(graph_curve(s), 0, CompetitorOptions{.eps = 0.05});
  EXPECT_TRUE(c.report.boundary_exact);
  EXPECT_NEAR(c.report.margin, 0, 1e-12);
  EXPECT_EQ(c.report.E_f, 0);
  EXPECT_EQ(c.report.E_h, 0);
  EXPECT_NEAR(c.report.mass_H, c.report.mass_S_B1, 1e-12);
}

TEST(Competitor, FlatMultiSheet) {
  auto s = modes(1, {}, 192);
  auto c = build_competitor(graph_curve(s), 1, CompetitorOptions{.eps = 0.05});
  EXPECT_TRUE(c.report.boundary_exact);
  EXPECT_NEAR(c.report.margin, 0, 1e-12);
  EXPECT_NEAR(c.report.mass_S_B1, 192 * std::sin(3 * pi / 192) / 2, 1e-12);
}

TEST(Competitor, WiggleMarginPositive) {
  auto s = modes(0, {{2, 0.05}}, 256);
  auto c = build_competitor(graph_curve(s), 0);
  const auto& r = c.report;
  EXPECT_TRUE(r.boundary_exact);
  EXPECT_NEAR(r.c0, 0.2, 1e-15);
  EXPECT_NEAR(r.eps1, 0.1, 1e-15);
  EXPECT_GT(r.margin - r.margin_error, 0);
  // continuum prediction (a^2 Lambda / 8) (rho^2 (1-nu)^2 - eps1 (nu^2 - 1))
  double a2 = 0.0025, pred = a2 * pi / 8 * (r.rho * r.rho - 0.1 * 3);
  EXPECT_NEAR(r.margin, pred, 0.05 * pred);
  EXPECT_NEAR(r.mass_cone_Z - r.mass_S_B1, a2 * pi * 3 / 8, 0.05 * a2 * pi * 3 / 8);
  EXPECT_NEAR(r.margin, 5.89896e-4, 2e-9);  // regression
}

TEST(Competitor, TiltIsTight) {
  auto s = modes(0, {{1, 0.04}}, 256);
  auto c = build_competitor(graph_curve(s), 0);
  EXPECT_LT(std::abs(c.report.margin), 1e-6);
  // planar: the cone over Z is a half disk of area pi / 2 up to the polygon
  EXPECT_NEAR(c.report.mass_cone_Z, pi / 2, 1e-4);
  EXPECT_NEAR(c.report.mass_H, c.report.mass_cone_Z, 1e-8);
}

TEST(Competitor, ModifiedCurveUsesPatch) {
  auto s = modes(0, {{2, 0.03}}, 200);
  LiftedCurve z3 = graph_curve(s), z1 = z3;
  for (int i = 90; i <= 110; ++i) z1.y[i](1) += 0.004 * std::sin(pi * (i - 90) / 20.0);
  auto c = build_competitor(z3, 0, {}, &z1);
  EXPECT_TRUE(c.report.boundary_exact);
  EXPECT_GT(c.report.mass_S2, 0);
  EXPECT_LT(c.report.mass_S2, 1e-3);
}

TEST(Competitor, Preconditions) {
  auto s = modes(0, {{2, 0.05}}, 64);
  EXPECT_THROW(build_competitor(graph_curve(s), 0, CompetitorOptions{.eps = 0.01}), MathError);
}

namespace {

SimplicialCurrent sphere_polyline(const std::function<Point(double)>& X, double t0, double t1, int k, bool closed) {
  std::vector<Point> pts;
  for (int i = 0; i <= (closed ? k - 1 : k); ++i) {
    Point p = X(t0 + (t1 - t0) * i / k);
    pts.push_back(p / p.norm());
  }
  if (!closed) {
    pts.front() = unit(4, 0);
    pts.back() = -unit(4, 0);
  }
  return polyline(pts, closed);
}

Point wiggle(double t, double a, double nu) {
  Point p = Point::Zero(4);
  p << std::cos(t), std::sin(t), a * std::sin(nu * t), 0;
  return p;
}

}  // namespace

TEST(EpiCheck, CrossSectionItself) {
  auto S = halfplane_cone(4);
  auto r = epiperimetric_check(S, cross_section(S, 128), 0.1);
  EXPECT_NEAR(r.margin, 0, 1e-12);
  EXPECT_TRUE(r.hypotheses_ok);
  EXPECT_EQ(r.components.size(), 1u);
}

TEST(EpiCheck, WiggledHalfCircle) {
  auto S = halfplane_cone(4);
  auto Z = sphere_polyline([](double t) { return wiggle(t, 0.03, 2); }, 0, pi, 256, false);
  auto r = epiperimetric_check(S, Z, 0.1);
  EXPECT_NEAR(r.eps1, 0.1, 1e-12);
  EXPECT_GT(r.margin - r.margin_error, 0);
  EXPECT_TRUE(r.boundary_exact);
  EXPECT_TRUE(r.hypotheses_ok);
  EXPECT_LT(r.mass_S2, 1e-12);
}

TEST(EpiCheck, MultiSheetBoundaryComponent) {
  auto S = halfplane_cone(4, 1);
  auto Z = sphere_polyline([](double t) { return wiggle(t, 0.02, 2.0 / 3); }, 0, 3 * pi, 384, false);
  auto r = epiperimetric_check(S, Z, 0.1);
  EXPECT_EQ(r.theta0, 1);
  EXPECT_NEAR(r.c0, 0.04, 1e-15);
  EXPECT_GT(r.margin - r.margin_error, 0);
}

TEST(EpiCheck, HalfPlanePlusOrthogonalPlane) {
  auto S = halfplane_cone(4);
  S.planes.push_back({Plane2(unit(4, 2), unit(4, 3), 1), 1});
  auto Z0 = sphere_polyline([](double t) { return wiggle(t, 0.03, 2); }, 0, pi, 256, false);
  auto Z1 = sphere_polyline(
      [](double s) {
        Point p(4);
        p << 0.02 * std::sin(3 * s), 0.01 * std::cos(2 * s), std::cos(s), std::sin(s);
        return p;
      },
      0, 2 * pi, 256, true);
  auto r = epiperimetric_check(S, add(Z0, Z1), 0.1);
  ASSERT_EQ(r.components.size(), 2u);
  EXPECT_EQ(r.components[1].kind, "interior");
  EXPECT_GT(r.components[1].margin, 0);
  EXPECT_GT(r.margin - r.margin_error, 0);
}

TEST(EpiCheck, FarComponentRejected) {
  auto S = halfplane_cone(4);
  auto Z = sphere_polyline(
      [](double t) {
        Point p(4);
        p << std::cos(t), 0, std::sin(t), 0;
        return p;
      },
      0, pi, 64, false);
  EXPECT_THROW(epiperimetric_check(S, Z, 0.1), MathError);
}
