#pragma once

#include "epicone/current.hpp"

namespace epicone {

// Oriented 2-plane through the origin; orientation sign * (u ^ v).
struct Plane2 {
  Point u, v;
  int orientation = 1;

  Plane2() = default;
  Plane2(Point a, Point b, int o = 1) : u(std::move(a)), v(std::move(b)), orientation(o) {
    if (std::abs(u.norm() - 1) > 1e-12 || std::abs(v.norm() - 1) > 1e-12 || std::abs(u.dot(v)) > 1e-12)
      throw UsageError("plane basis must be orthonormal");
  }
  Point project(const Point& z) const { return z.dot(u) * u + z.dot(v) * v; }
  Vec2 coords(const Point& z) const { return {z.dot(u), z.dot(v)}; }
  double distance(const Point& z) const { return (z - project(z)).norm(); }
  // Oriented (e1, e2) basis.
  Point first() const { return u; }
  Point second() const { return orientation > 0 ? v : Point(-v); }
};

// <a1 ^ a2, b1 ^ b2>
inline double wedge_dot(const Point& a1, const Point& a2, const Point& b1, const Point& b2) {
  return a1.dot(b1) * a2.dot(b2) - a1.dot(b2) * a2.dot(b1);
}

struct HalfPlane {
  Point line;    // boundary direction e1
  Point inward;  // unit, orthogonal to line
  Plane2 plane() const { return Plane2(line, inward, 1); }
  double distance(const Point& z) const {
    double a = z.dot(line), b = std::max(0.0, z.dot(inward));
    return (z - a * line - b * inward).norm();
  }
};

struct WeightedPlane {
  Plane2 plane;
  int theta = 1;
};

// One oriented half-plane, Q copies of the plane containing it, and further
// planes with multiplicities.
struct ConeSpec {
  int ambient = 4;
  HalfPlane half;
  int Q = 0;
  std::vector<WeightedPlane> planes;

  double density() const {
    double d = Q + 0.5;
    for (const auto& p : planes) d += p.theta;
    return d;
  }
  // distance from z to the support
  double support_distance(const Point& z) const {
    double d = Q > 0 ? half.plane().distance(z) : half.distance(z);
    for (const auto& p : planes) d = std::min(d, p.plane.distance(z));
    return d;
  }
};

inline void validate(const ConeSpec& S) {
  if (std::abs(S.half.line.norm() - 1) > 1e-12 || std::abs(S.half.inward.norm() - 1) > 1e-12 ||
      std::abs(S.half.line.dot(S.half.inward)) > 1e-12)
    throw UsageError("half-plane directions must be orthonormal");
  if (S.Q < 0) throw UsageError("Q must be nonnegative");
  std::vector<Plane2> all{S.half.plane()};
  for (const auto& p : S.planes) {
    if (p.theta <= 0) throw UsageError("plane multiplicities must be positive");
    all.push_back(p.plane);
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      Mat M(S.ambient, 4);
      M << all[i].u, all[i].v, all[j].u, all[j].v;
      Eigen::JacobiSVD<Mat> svd(M);
      if (svd.singularValues()(3) < 1e-9) {
        if (i == 0) throw UsageError("the plane containing the half-plane is given through Q, not in planes");
        throw UsageError("planes of a cone must meet only at the origin");
      }
    }
}

inline ConeSpec halfplane_cone(int ambient = 4, int Q = 0) {
  ConeSpec S;
  S.ambient = ambient;
  S.half = {unit(ambient, 0), unit(ambient, 1)};
  S.Q = Q;
  return S;
}

// Unit cross-section: half circle from e1 through the inward direction to -e1,
// Q full circles in the containing plane, theta_i circles in the other planes.
// k is the number of segments per half turn.
inline SimplicialCurrent cross_section(const ConeSpec& S, int k = 64, double R = 1.0) {
  SimplicialCurrent Z(1, S.ambient);
  std::vector<Point> half;
  for (int j = 0; j <= k; ++j) {
    double t = pi * j / k;
    half.push_back(R * (std::cos(t) * S.half.line + std::sin(t) * S.half.inward));
  }
  Z = polyline(half, false);
  if (S.Q > 0)
    Z = add(Z, polygon_loop(S.half.line, S.half.inward, R, 2 * k, S.Q));
  for (const auto& p : S.planes) Z = add(Z, polygon_loop(p.plane.first(), p.plane.second(), R, 2 * k, p.theta));
  return weld(Z, 1e-12 * R);
}

// Cone over the cross-section, restricted to B_R.
inline SimplicialCurrent sample_cone(const ConeSpec& S, int k = 64, double R = 1.0) {
  return weld(cone_over(cross_section(S, k, R), Point::Zero(S.ambient)), 1e-12 * R);
}

}  // namespace epicone
