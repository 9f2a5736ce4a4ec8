#include <gtest/gtest.h>

#include <random>

#include "epicone/excess.hpp"
#include "epicone/flat_norm.hpp"
#include "epicone/meshes.hpp"

using namespace epicone;

namespace {

Point P(std::initializer_list<double> v, int n = 4) {
  Point p = Point::Zero(n);
  int i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

// Graph of z -> (z, s*z2) over the disk, embedded in R^4.
SimplicialCurrent linear_graph(double s, int nr, int nt) {
  return polar_mesh(graded_radii(1.0, nr), nt, 0, 2 * pi, [s](double r, double phi) {
    Point p = Point::Zero(4);
    p(0) = r * std::cos(phi);
    p(1) = r * std::sin(phi);
    p(2) = s * p(1);
    return p;
  });
}

}  // namespace

TEST(Mass, UnitSquare) {
  SimplicialCurrent T(2, 4);
  for (auto p : {P({0, 0}), P({1, 0}), P({1, 1}), P({0, 1})}) T.add_vertex(p);
  T.add(0, 1, 2, 1);
  T.add(0, 2, 3, 1);
  EXPECT_NEAR(mass(T), 1.0, 1e-15);
}

TEST(Mass, HalfDiskMultiplicityThree) {
  auto T = flat_half_disk(1.0, 40, 200, 4, 3);
  // inscribed polygon: exact value is 3 * (n/2) sin(pi/n) for n angular cells
  double poly = 3 * 0.5 * 200 * std::sin(pi / 200);
  EXPECT_NEAR(mass(T), poly, 1e-12);
  EXPECT_NEAR(mass(T), 3 * pi / 2, 1e-3);
  EXPECT_NEAR(mass(T, Point::Zero(4), 1.0), mass(T), 1e-12);
}

TEST(Mass, LinearGraphAreaFactor) {
  double s = 0.3;
  auto T = linear_graph(s, 20, 256);
  Eigen::Matrix2d A;
  A << 0, 0, 0, s;  // D l for l(x) = s x2 in the first normal direction
  double factor = std::sqrt((Eigen::Matrix2d::Identity() + A.transpose() * A).determinant());
  EXPECT_NEAR(factor, std::sqrt(1 + s * s), 1e-15);
  EXPECT_NEAR(mass(T), pi * factor, 1e-3);
}

TEST(Mass, BallClippingMatchesRestrictedChain) {
  auto T = linear_graph(0.4, 10, 64);
  Point x = P({0.1, -0.05, 0.0});
  double exact = mass(T, x, 0.55);
  auto inside = restrict_to_ball(T, x, 0.55, 2048);
  EXPECT_NEAR(mass(inside), exact, 2e-5);
  EXPECT_LT(mass(inside), exact);
}

TEST(Boundary, SingleTriangle) {
  SimplicialCurrent T(2, 4);
  for (auto p : {P({0, 0}), P({1, 0}), P({0, 1})}) T.add_vertex(p);
  T.add(0, 1, 2, 1);
  auto B = boundary(T);
  auto m = chain_map(B);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.at({0, 1, -1, -1}), 1);
  EXPECT_EQ(m.at({1, 2, -1, -1}), 1);
  EXPECT_EQ(m.at({0, 2, -1, -1}), -1);
}

TEST(Boundary, DiskHasOnlyPolygonBoundary) {
  auto T = flat_disk(1.0, 6, 24);
  auto B = boundary(T);
  EXPECT_EQ(B.size(), 24);
  for (int i = 0; i < B.size(); ++i) {
    EXPECT_NEAR(B.vertices[B.simplices[i][0]].norm(), 1.0, 1e-14);
    EXPECT_NEAR(B.vertices[B.simplices[i][1]].norm(), 1.0, 1e-14);
  }
  EXPECT_TRUE(boundary(B).empty());
}

TEST(Boundary, BoundaryOfBoundaryVanishes) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  std::uniform_int_distribution<int> M(-3, 3), V(0, 9);
  for (int trial = 0; trial < 20; ++trial) {
    SimplicialCurrent T(2, 4);
    for (int i = 0; i < 10; ++i) T.add_vertex(P({U(rng), U(rng), U(rng), U(rng)}));
    for (int i = 0; i < 15; ++i) {
      int a = V(rng), b = V(rng), c = V(rng);
      int m = M(rng);
      if (a == b || b == c || a == c || m == 0) continue;
      T.add(a, b, c, m);
    }
    EXPECT_TRUE(boundary(boundary(T)).empty());
  }
}

TEST(Boundary, SampledConeBoundary) {
  // brute-force face cancellation oracle: count each edge's signed incidences
  auto S = halfplane_cone();
  auto T = sample_cone(S, 16);
  std::map<std::pair<int, int>, long> count;
  for (int i = 0; i < T.size(); ++i) {
    auto s = T.simplices[i];
    for (int e = 0; e < 3; ++e) {
      int a = s[e], b = s[(e + 1) % 3];
      if (a < b) count[{a, b}] += T.mult[i];
      else count[{b, a}] -= T.mult[i];
    }
  }
  auto B = chain_map(boundary(T));
  for (auto& [k, v] : count)
    if (v != 0) EXPECT_EQ(B.at({k.first, k.second, -1, -1}), v);
  // boundary = cross-section plus the segment from -e1 to e1 through 0
  SimplicialCurrent expect = cross_section(S, 16);
  SimplicialCurrent seg = polyline({-unit(4, 0), Point::Zero(4), unit(4, 0)}, false);
  EXPECT_TRUE(same_chain(boundary(T), add(expect, seg)));
}

TEST(PushForward, DilationScalesMass) {
  auto T = linear_graph(0.2, 8, 48);
  Point x = P({0.1, 0.2, 0.04});
  double r = 0.37;
  auto D = push_forward(dilation(x, r), T);
  EXPECT_NEAR(mass(D, Point::Zero(4), 1.0) * r * r, mass(T, x, r), 1e-12);
}

TEST(PushForward, IdentityAndRotation) {
  auto T = linear_graph(0.2, 5, 32);
  auto I = push_forward([](const Point& p) { return p; }, T);
  EXPECT_TRUE(same_chain(I, T, 0));
  Mat R = Mat::Identity(4, 4);
  double c = std::cos(pi / 4), s = std::sin(pi / 4);
  R(0, 0) = c, R(0, 2) = -s, R(2, 0) = s, R(2, 2) = c;
  auto Rt = push_forward([&](const Point& p) { return Point(R * p); }, T);
  EXPECT_NEAR(mass(Rt), mass(T), 1e-12);
}

TEST(Cone, PolygonAreaExact) {
  for (int k : {6, 32, 257}) {
    auto Z = polygon_loop(unit(4, 0), unit(4, 1), 1.0, k, 2);
    auto C = cone_over(Z, Point::Zero(4));
    EXPECT_NEAR(mass(C), 2 * 0.5 * k * std::sin(2 * pi / k), 1e-12);
  }
  auto Z = polygon_loop(unit(4, 0), unit(4, 1), 1.0, 4096);
  EXPECT_NEAR(mass(cone_over(Z, Point::Zero(4))), pi, 1e-5);
}

TEST(Cone, HalfCircle) {
  auto Z = cross_section(halfplane_cone(), 512);
  auto C = cone_over(Z, Point::Zero(4));
  EXPECT_NEAR(mass(C), pi / 2, 1e-5);
  EXPECT_NEAR(mass(C, Point::Zero(4), 1.0), mass(C), 1e-12);
}

TEST(Cone, CollinearSegmentDropped) {
  SimplicialCurrent Z = polyline({P({1, 0}), P({2, 0}), P({2, 1})}, false);
  int dropped = 0;
  auto C = cone_over(Z, Point::Zero(4), &dropped);
  EXPECT_EQ(dropped, 1);
  EXPECT_EQ(C.size(), 1);
}

TEST(Cone, Homogeneity) {
  auto Z = cross_section(halfplane_cone(), 12);
  auto C = cone_over(Z, Point::Zero(4));
  double s = 0.6;
  auto scaled = push_forward([s](const Point& p) { return Point(s * p); }, C);
  auto Zs = push_forward([s](const Point& p) { return Point(s * p); }, Z);
  EXPECT_TRUE(same_chain(scaled, cone_over(Zs, Point::Zero(4))));
}

TEST(Slice, FlatDiskCircle) {
  auto T = flat_disk(1.0, 7, 40);
  auto sr = slice_by_radius(T, Point::Zero(4), 0.5, 4096);
  EXPECT_NEAR(mass(sr.slice), pi, 1e-5);
  EXPECT_FALSE(sr.perturbed);
  EXPECT_TRUE(boundary(sr.slice).empty());
}

TEST(Slice, ConeHomogeneity) {
  auto C = sample_cone(halfplane_cone(), 24);
  auto s1 = slice_by_radius(C, Point::Zero(4), 0.99, 64);
  auto s2 = slice_by_radius(C, Point::Zero(4), 0.33, 64);
  EXPECT_NEAR(mass(s2.slice), (0.33 / 0.99) * mass(s1.slice), 1e-12);
}

TEST(Slice, BookkeepingHalfPlane) {
  auto T = flat_half_disk(1.5, 9, 30);
  Point x = Point::Zero(4);
  BallClipper c(T, x, 1.0, 128);
  auto dT = boundary(T);
  auto cT = c.clip(T);
  auto cB = c.clip(dT);
  EXPECT_TRUE(c.perturbed());  // r = 1 hits mesh rings
  auto lhs = boundary(cT.inside);
  auto rhs = add(cT.slice, cB.inside);
  EXPECT_TRUE(same_chain(lhs, rhs, 0));
  // slice is a half circle from e1 to -e1
  EXPECT_NEAR(mass(cT.slice), pi, 1e-3);
  auto ds = chain_map(boundary(cT.slice));
  EXPECT_EQ(ds.size(), 2u);
}

TEST(Slice, InsideOutsideSplitIsExact) {
  auto T = linear_graph(0.5, 6, 20);
  Point x = P({0.2, 0.1, 0.05});
  BallClipper c(T, x, 0.45, 64);
  auto cT = c.clip(T);
  auto sum = add(cT.inside, cT.outside);
  EXPECT_TRUE(same_chain(boundary(sum), boundary(T), 0));
  EXPECT_NEAR(mass(cT.inside) + mass(cT.outside), mass(T), 1e-12);
}

TEST(Flat, IdenticalIsZero) {
  auto T = polygon_loop(unit(4, 0), unit(4, 1), 1.0, 16);
  auto r = flat_distance(T, T);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.R.empty());
  EXPECT_TRUE(r.Q.empty());
}

TEST(Flat, ParallelSegmentsOnGrid) {
  double eps = 0.1;
  auto K = grid_complex(10, 3, eps, Vec2(0, -eps));
  std::vector<Point> a, b;
  for (int i = 0; i <= 10; ++i) a.push_back(P({i * eps, 0})), b.push_back(P({i * eps, eps}));
  auto T = reindex_onto(K, polyline(a, false));
  auto S = reindex_onto(K, polyline(b, false));
  auto r = flat_distance_on_complex(K, T, S);
  // hand decomposition: Q = rectangle (area eps), R = two sides (2 eps)
  EXPECT_NEAR(r.value, 3 * eps, 1e-12);
  EXPECT_TRUE(r.integral);
  // witness satisfies T - S = R + dQ
  EXPECT_TRUE(same_chain(add(T, negate(S)), add(r.R, boundary(r.Q)), 0));
  // overlay refinement gives the same optimum
  auto r2 = flat_distance(polyline({P({0, 0}), P({1, 0})}, false), polyline({P({0, eps}), P({1, eps})}, false));
  EXPECT_NEAR(r2.value, 3 * eps, 1e-12);
}

TEST(Flat, CirclesWithMultiplicity) {
  int k = 48;
  auto T = polygon_loop(unit(4, 0), unit(4, 1), 1.0, k, 2);
  auto S = polygon_loop(unit(4, 0), unit(4, 1), 1.0, k, 1);
  auto r = flat_distance(T, S);
  double area = 0.5 * k * std::sin(2 * pi / k), perim = 2 * k * std::sin(pi / k);
  EXPECT_NEAR(r.value, std::min(area, perim), 1e-9);
  EXPECT_TRUE(r.integral);
}

TEST(Flat, SameCombinatoricsUsesHomotopy) {
  auto T = flat_disk(1.0, 3, 12);
  auto S = push_forward([](const Point& p) { Point q = p; q(2) += 0.01; return q; }, T);
  auto r = flat_distance(T, S);
  // a translation by v has flat distance at most |v| (M(T) + M(dT))
  EXPECT_LE(r.value, 0.01 * (mass(T) + mass(boundary(T))) + 1e-12);
  EXPECT_GT(r.value, 0.0);
  EXPECT_NEAR(homotopy_mass_bound(T, [](const Point& p) { Point q = p; q(2) += 0.01; return q; }),
              0.01 * (mass(T) + mass(boundary(T))), 1e-12);
}

TEST(Excess, ParallelIsZero) {
  auto T = flat_disk(1.0, 4, 16);
  Plane2 tau(unit(4, 0), unit(4, 1));
  EXPECT_NEAR(cylindrical_excess(T, tau), 0.0, 1e-14);
}

TEST(Excess, ReversedOrientationIsTwiceMass) {
  auto T = flat_disk(0.8, 4, 16);
  Plane2 tau(unit(4, 0), unit(4, 1), -1);
  EXPECT_NEAR(cylindrical_excess(T, tau), 2 * mass(T), 1e-12);
}

TEST(Excess, LinearGraphQuadratureOracle) {
  double s = 0.1;
  // independent oracle: integrate (1 - <T,tau>) over the disk with the area element
  GaussLegendre g(64);
  double J = std::sqrt(1 + s * s);
  double oracle = g.integrate([&](double r) {
    return g.integrate([&](double) { return (1 - 1 / J) * J * r; }, 0, 2 * pi);
  }, 0, 1);
  EXPECT_NEAR(oracle, pi * (J - 1), 1e-13);
  // graph extends beyond the unit cylinder so the clipping is exercised
  auto T = polar_mesh(graded_radii(1.3, 26), 512, 0, 2 * pi, [s](double r, double phi) {
    Point p = Point::Zero(4);
    p(0) = r * std::cos(phi);
    p(1) = r * std::sin(phi);
    p(2) = s * p(1);
    return p;
  });
  Plane2 tau(unit(4, 0), unit(4, 1));
  EXPECT_NEAR(cylindrical_excess(T, tau), oracle, 1e-12 + 1e-4 * oracle);
  // identity with mass(T within C1) - mass(projection)
  EXPECT_NEAR(cylindrical_excess(T, tau), pi * J * (1 - 1 / J), 1e-4 * oracle);
}

TEST(BoundaryExcess, FlatHalfCircle) {
  auto Z = cross_section(halfplane_cone(), 64);
  auto be = boundary_excess(Z);
  EXPECT_NEAR(be.value, 0.0, 1e-12);
  EXPECT_NEAR(be.rotation, 0.0, 1e-6);
}

TEST(BoundaryExcess, TiltedHalfCircle) {
  double beta = 0.3;
  Point w = std::cos(beta) * unit(4, 1) + std::sin(beta) * unit(4, 3);
  ConeSpec S = halfplane_cone();
  S.half.inward = w;
  auto Z = cross_section(S, 64);
  auto be = boundary_excess(Z);
  EXPECT_NEAR(be.value, 0.0, 1e-10);
  EXPECT_NEAR(be.rotation, beta, 1e-6);
  EXPECT_NEAR(std::abs(be.plane.v.dot(w)), 1.0, 1e-9);
}

TEST(BoundaryExcess, WiggledGraphMatchesQuadrature) {
  double eps = 0.05;
  int k = 2048;
  std::vector<Point> pts;
  for (int j = 0; j <= k; ++j) {
    double t = pi * j / k;
    Point p = P({std::cos(t), std::sin(t), eps * std::sin(2 * t)});
    pts.push_back(p.normalized());
  }
  auto Z = polyline(pts, false);
  auto be = boundary_excess(Z);
  // oracle: (1/2) int |Df - Dl0|^2 for f = r eps sin(2t), l0 = 0
  GaussLegendre g(64);
  double oracle = 0.5 * g.integrate([&](double t) {
    return g.integrate([&](double r) {
      double fr = eps * std::sin(2 * t), ft = 2 * eps * std::cos(2 * t);
      return (fr * fr + ft * ft) * r;
    }, 0, 1);
  }, 0, pi);
  EXPECT_NEAR(be.value, oracle, 0.05 * oracle);
}
