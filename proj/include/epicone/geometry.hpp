#pragma once

#include "epicone/core.hpp"

#include <array>
#include <optional>

namespace epicone {

using Vec2 = Eigen::Vector2d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// k-volume of a segment or triangle in any ambient dimension.
inline double segment_length(const Point& a, const Point& b) { return (b - a).norm(); }

inline double triangle_area(const Point& a, const Point& b, const Point& c) {
  // |u ^ v| from its 2x2 minors; the Gram form loses sqrt(eps) on slivers
  Point u = b - a, v = c - a;
  Summer s;
  for (int i = 0; i < u.size(); ++i)
    for (int j = i + 1; j < u.size(); ++j) {
      double m = u(i) * v(j) - u(j) * v(i);
      s.add(m * m);
    }
  return 0.5 * std::sqrt(s.value());
}

// Orthonormal frame of an oriented triangle: origin a, (e1, e2) spanning the
// plane with (b - a, c - a) positively oriented.
struct TriFrame {
  Point origin, e1, e2;
  Vec2 to2(const Point& p) const {
    Point d = p - origin;
    return {d.dot(e1), d.dot(e2)};
  }
  Point to3(const Vec2& w) const { return origin + w.x() * e1 + w.y() * e2; }
};

inline TriFrame tri_frame(const Point& a, const Point& b, const Point& c) {
  TriFrame f;
  f.origin = a;
  f.e1 = (b - a).normalized();
  Point v = c - a;
  v -= v.dot(f.e1) * f.e1;
  f.e2 = v.normalized();
  return f;
}

// Signed area of triangle (0, p, q) intersected with the disk of radius R at 0.
inline double origin_tri_disk_area(const Vec2& p, const Vec2& q, double R) {
  Vec2 d = q - p;
  double A = d.squaredNorm();
  if (A == 0.0) return 0.0;
  double B = p.dot(d), C = p.squaredNorm() - R * R;
  std::array<double, 4> ts{0.0, 0.0, 0.0, 1.0};
  int nt = 1;
  double disc = B * B - A * C;
  if (disc > 0) {
    double sq = std::sqrt(disc);
    double t1 = (-B - sq) / A, t2 = (-B + sq) / A;
    if (t1 > 0 && t1 < 1) ts[nt++] = t1;
    if (t2 > 0 && t2 < 1) ts[nt++] = t2;
  }
  ts[nt++] = 1.0;
  double area = 0.0;
  for (int i = 0; i + 1 < nt; ++i) {
    Vec2 a = p + ts[i] * d, b = p + ts[i + 1] * d;
    Vec2 m = p + 0.5 * (ts[i] + ts[i + 1]) * d;
    if (m.squaredNorm() <= R * R)
      area += 0.5 * cross2(a, b);
    else
      area += 0.5 * R * R * std::atan2(cross2(a, b), a.dot(b));
  }
  return area;
}

// Signed area of a simple polygon intersected with a disk.
inline double polygon_disk_area(const std::vector<Vec2>& poly, const Vec2& center, double R) {
  if (R <= 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    s += origin_tri_disk_area(poly[i] - center, poly[(i + 1) % poly.size()] - center, R);
  return s;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * s;
}

// Area of a triangle in R^n intersected with the closed ball B_R(x).
inline double triangle_ball_area(const Point& a, const Point& b, const Point& c, const Point& x, double R) {
  if (triangle_area(a, b, c) == 0.0) return 0.0;
  TriFrame f = tri_frame(a, b, c);
  Point d = x - a;
  Vec2 c2{d.dot(f.e1), d.dot(f.e2)};
  double h2 = d.squaredNorm() - c2.squaredNorm();
  double rho2 = R * R - h2;
  if (rho2 <= 0) return 0.0;
  std::vector<Vec2> tri{Vec2(0, 0), f.to2(b), f.to2(c)};
  return std::abs(polygon_disk_area(tri, c2, std::sqrt(rho2)));
}

// Length of segment [a,b] inside the closed ball B_R(x).
inline double segment_ball_length(const Point& a, const Point& b, const Point& x, double R) {
  Point d = b - a;
  double A = d.squaredNorm();
  if (A == 0.0) return 0.0;
  Point p = a - x;
  double B = p.dot(d), C = p.squaredNorm() - R * R;
  double disc = B * B - A * C;
  if (disc <= 0) return 0.0;
  double sq = std::sqrt(disc);
  double t1 = std::max(0.0, (-B - sq) / A), t2 = std::min(1.0, (-B + sq) / A);
  return t2 > t1 ? (t2 - t1) * std::sqrt(A) : 0.0;
}

// Clip a polygon to the half-plane n.w <= c.
inline std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& n, double c) {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    double fp = n.dot(p) - c, fq = n.dot(q) - c;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) out.push_back(p + (fp / (fp - fq)) * (q - p));
  }
  return out;
}

// Closest point on triangle abc to p (any ambient dimension).
inline Point closest_point_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
  Point ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  Point bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  Point cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  // Interior: solve the 2x2 normal equations (valid in any dimension).
  double aa = ab.dot(ab), bb = ac.dot(ac), abac = ab.dot(ac);
  double det = aa * bb - abac * abac;
  double s = (bb * d1 - abac * d2) / det, t = (aa * d2 - abac * d1) / det;
  return a + s * ab + t * ac;
}

inline Point closest_point_segment(const Point& p, const Point& a, const Point& b) {
  Point d = b - a;
  double L = d.squaredNorm();
  if (L == 0) return a;
  double t = std::clamp((p - a).dot(d) / L, 0.0, 1.0);
  return a + t * d;
}

// Ear-clipping triangulation of a simple CCW polygon. Returns index triples.
inline std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly) {
  std::vector<std::array<int, 3>> tris;
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  auto inside_tri = [&](const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross2(b - a, p - a) >= 0 && cross2(c - b, p - b) >= 0 && cross2(a - c, p - c) >= 0;
  };
  int guard = 0;
  while (idx.size() > 3 && guard < 100000) {
    ++guard;
    int n = static_cast<int>(idx.size());
    int best = -1;
    double best_q = -1;
    for (int i = 0; i < n; ++i) {
      const Vec2& a = poly[idx[(i + n - 1) % n]];
      const Vec2& b = poly[idx[i]];
      const Vec2& c = poly[idx[(i + 1) % n]];
      double cr = cross2(b - a, c - b);
      if (cr <= 0) continue;
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) {
        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
        const Vec2& p = poly[idx[j]];
        if ((p - a).norm() == 0 || (p - b).norm() == 0 || (p - c).norm() == 0) continue;
        if (inside_tri(p, a, b, c)) ok = false;
      }
      if (!ok) continue;
      // prefer well-shaped ears
      double q = cr / ((b - a).squaredNorm() + (c - b).squaredNorm() + (a - c).squaredNorm());
      if (q > best_q) best_q = q, best = i;
    }
    if (best < 0) {
      // Numerically collinear remainder: drop the flattest vertex.
      double flat = 1e300;
      for (int i = 0; i < n; ++i) {
        const Vec2& a = poly[idx[(i + n - 1) % n]];
        const Vec2& b = poly[idx[i]];
        const Vec2& c = poly[idx[(i + 1) % n]];
        double cr = std::abs(cross2(b - a, c - b));
        if (cr < flat) flat = cr, best = i;
      }
      idx.erase(idx.begin() + best);
      continue;
    }
    tris.push_back({idx[(best + n - 1) % n], idx[best], idx[(best + 1) % n]});
    idx.erase(idx.begin() + best);
  }
  if (idx.size() == 3) {
    const Vec2 &a = poly[idx[0]], &b = poly[idx[1]], &c = poly[idx[2]];
    if (cross2(b - a, c - a) > 0) tris.push_back({idx[0], idx[1], idx[2]});
  }
  return tris;
}

}  // namespace epicone
