#pragma once

#include "epicone/cone.hpp"

namespace epicone {

// Area of {z in triangle abc : |p_tau z| <= 1}.
inline double triangle_cylinder_area(const Point& a, const Point& b, const Point& c, const Plane2& tau) {
  double area = triangle_area(a, b, c);
  if (area == 0) return 0;
  TriFrame f = tri_frame(a, b, c);
  Eigen::Matrix2d A;
  A.col(0) = tau.coords(f.e1);
  A.col(1) = tau.coords(f.e2);
  Vec2 off = tau.coords(a);
  std::vector<Vec2> tri{Vec2(0, 0), f.to2(b), f.to2(c)};
  double det = A.determinant();
  if (std::abs(det) > 1e-12) {
    std::vector<Vec2> proj;
    for (const auto& w : tri) proj.push_back(A * w + off);
    return std::abs(polygon_disk_area(proj, Vec2(0, 0), 1.0)) / std::abs(det);
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double s0 = svd.singularValues()(0);
  if (s0 < 1e-12) return off.norm() <= 1 ? area : 0.0;
  // rank one: A w = s0 (l.w) g, region is a strip in l.w
  Vec2 g = svd.matrixU().col(0), l = svd.matrixV().col(0);
  double qa = s0 * s0, qb = 2 * s0 * g.dot(off), qc = off.squaredNorm() - 1;
  double disc = qb * qb - 4 * qa * qc;
  if (disc <= 0) return 0.0;
  double lo = (-qb - std::sqrt(disc)) / (2 * qa), hi = (-qb + std::sqrt(disc)) / (2 * qa);
  auto poly = clip_halfplane(clip_halfplane(tri, l, hi), -l, -lo);
  return poly.size() < 3 ? 0.0 : std::abs(polygon_area(poly));
}

// <T-vector of simplex i, tau-vector>, including the multiplicity sign.
inline double tangent_alignment(const SimplicialCurrent& T, int i, const Plane2& tau) {
  const auto& s = T.simplices[i];
  TriFrame f = tri_frame(T.vertices[s[0]], T.vertices[s[1]], T.vertices[s[2]]);
  double d = wedge_dot(f.e1, f.e2, tau.first(), tau.second());
  return T.mult[i] > 0 ? d : -d;
}

// E(T, tau) = (1/2) sum |T - tau|^2 |m| area(simplex within C_1(tau)).
inline double cylindrical_excess(const SimplicialCurrent& T, const Plane2& tau) {
  if (T.dim != 2) throw UsageError("cylindrical excess needs a 2-current");
  Summer s;
  for (int i = 0; i < T.size(); ++i) {
    const auto& q = T.simplices[i];
    double a = triangle_cylinder_area(T.vertices[q[0]], T.vertices[q[1]], T.vertices[q[2]], tau);
    if (a == 0) continue;
    double e = std::max(0.0, 1.0 - tangent_alignment(T, i, tau));
    s.add(e * std::abs(static_cast<double>(T.mult[i])) * a);
  }
  return s.value();
}

// E((0 x Z) extended to infinity, tau): excess of the full cone over Z inside
// the cylinder C_1(tau). Each sector between rays through a and b meets the
// cylinder in an ellipse sector whose area is angle'/(2|det|).
class ConeExcess {
 public:
  explicit ConeExcess(const SimplicialCurrent& Z) : V(Z.ambient, static_cast<int>(Z.vertices.size())) {
    if (Z.dim != 1) throw UsageError("cone excess needs a 1-current");
    for (int j = 0; j < V.cols(); ++j) V.col(j) = Z.vertices[j];
    for (int i = 0; i < Z.size(); ++i) {
      const Point& a = Z.vertices[Z.simplices[i][0]];
      const Point& b = Z.vertices[Z.simplices[i][1]];
      double wedge = std::sqrt(std::max(0.0, a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2)));
      if (wedge <= 2e-15 * a.norm() * b.norm()) continue;
      segs.push_back({Z.simplices[i][0], Z.simplices[i][1], static_cast<double>(Z.mult[i]), wedge});
    }
  }

  double operator()(const Plane2& tau) const {
    Eigen::VectorXd pf = V.transpose() * tau.first(), ps = V.transpose() * tau.second();
    Summer s;
    for (const auto& g : segs) {
      Vec2 pa(pf(g.a), ps(g.a)), pb(pf(g.b), ps(g.b));
      double c = cross2(pa, pb);
      double align = (g.m < 0 ? -c : c) / g.wedge;
      double e = std::max(0.0, 1.0 - align);
      if (e == 0) continue;
      double det = std::abs(c) / g.wedge;
      if (det < 1e-14) return std::numeric_limits<double>::infinity();
      double ang = std::atan2(std::abs(c), pa.dot(pb));
      s.add(e * std::abs(g.m) * ang / (2 * det));
    }
    return s.value();
  }

 private:
  struct Seg {
    int a, b;
    double m, wedge;
  };
  Mat V;
  std::vector<Seg> segs;
};

inline double cone_excess(const SimplicialCurrent& Z, const Plane2& tau) { return ConeExcess(Z)(tau); }

// Planes through the line R e1: tau = span(e1, w), w a unit vector orthogonal
// to e1 in hyperspherical angles; angles[0] is the rotation angle from e2.
inline Point plane_direction(const std::vector<double>& ang, int ambient) {
  Point w = Point::Zero(ambient);
  int m = ambient - 1;  // w lives in span(e2..e_n)
  double s = 1.0;
  for (int j = 0; j + 1 < m; ++j) {
    w(1 + j) = s * std::cos(ang[j]);
    s *= std::sin(ang[j]);
  }
  w(m) = s;
  return w;
}

struct BoundaryExcess {
  double value = 0;
  Plane2 plane;
  double rotation = 0;  // angle between the plane and span(e1, e2)
};

// E-flat: minimum of cone_excess over oriented planes containing e1.
// Assumes Z lies on the unit sphere with boundary delta(-e1) - delta(e1).
inline BoundaryExcess boundary_excess(const SimplicialCurrent& Z, int starts = 16) {
  if (Z.dim != 1) throw UsageError("boundary excess needs a 1-current");
  int n = Z.ambient;
  if (n < 3) throw UsageError("ambient dimension must be at least 3");
  for (const auto& v : Z.vertices)
    if (std::abs(v.norm() - 1) > 1e-9) throw UsageError("curve must lie on the unit sphere");
  {
    SimplicialCurrent expect(0, n);
    expect.add_vertex(-unit(n, 0));
    expect.add_vertex(unit(n, 0));
    expect.add({0, -1, -1, -1}, 1);
    expect.add({1, -1, -1, -1}, -1);
    if (!same_chain(boundary(compact(Z)), expect, 1e-9))
      throw UsageError("curve boundary must be delta(-e1) - delta(e1)");
  }
  int na = std::max(1, n - 2);
  ConeExcess ce(Z);
  auto eval = [&](const std::vector<double>& a) { return ce(Plane2(unit(n, 0), plane_direction(a, n), 1)); };
  auto rot = [&](const std::vector<double>& a) {
    return std::acos(std::clamp(plane_direction(a, n)(1), -1.0, 1.0));
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  std::vector<double> best;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k < starts; ++k) {
    std::vector<double> a(na);
    for (int j = 0; j < na; ++j) {
      double frac = std::fmod((k + 0.5) * (j == 0 ? 1.0 / starts : 0.6180339887498949 * (j + 1)), 1.0);
      a[j] = (n == 3 ? 2 * pi * frac - pi : (j == 0 ? pi * frac : 2 * pi * frac));
    }
    if (k == 0) std::fill(a.begin(), a.end(), 0.0);
    double val = eval(a);
    for (double h = 0.5; h > 1e-11; h *= 0.5) {
      for (int sweep = 0; sweep < 2; ++sweep)
        for (int j = 0; j < na; ++j) {
          double lo = a[j] - h, hi = a[j] + h;
          double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
          auto at = [&](double t) {
            auto b = a;
            b[j] = t;
            return eval(b);
          };
          double f1 = at(x1), f2 = at(x2);
          for (int it = 0; it < 60 && hi - lo > std::max(1e-13, 0.25 * h); ++it) {
            if (f1 < f2) {
              hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = at(x1);
            } else {
              lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = at(x2);
            }
          }
          double t = 0.5 * (lo + hi), ft = at(t);
          if (ft < val) a[j] = t, val = ft;
        }
    }
    bool better = val < best_val - 1e-12 ||
                  (std::abs(val - best_val) <= 1e-12 && !best.empty() && rot(a) < rot(best));
    if (best.empty() || better) best = a, best_val = val;
  }
  BoundaryExcess r;
  r.value = best_val;
  r.plane = Plane2(unit(n, 0), plane_direction(best, n), 1);
  r.rotation = rot(best);
  return r;
}

}  // namespace epicone
