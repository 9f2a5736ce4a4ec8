#pragma once

#include "epicone/current.hpp"

namespace epicone {

struct BallClip {
  SimplicialCurrent inside;   // T restricted to the closed ball
  SimplicialCurrent outside;  // T restricted to the complement
  SimplicialCurrent slice;    // oriented so that d(inside) = slice + (dT restricted)
};

// Splits chains along the sphere |z - x| = r. Chains passed to clip() must
// index into the vertex table of the current given at construction (T itself
// or boundary(T)); new crossing and arc vertices are appended to a shared
// table so separate calls produce compatible chains.
class BallClipper {
 public:
  BallClipper(const SimplicialCurrent& T, const Point& x, double r, int facets = 256)
      : x_(x), r_(r), facets_(facets), verts_(T.vertices), base_(T.vertices.size()) {
    choose_radius(T);
  }

  double radius() const { return r_; }
  bool perturbed() const { return steps_ > 0; }
  int perturb_steps() const { return steps_; }
  int facets() const { return facets_; }
  const std::vector<Point>& vertices() const { return verts_; }

  BallClip clip(const SimplicialCurrent& C) {
    BallClip out;
    out.inside = SimplicialCurrent(C.dim, C.ambient);
    out.outside = SimplicialCurrent(C.dim, C.ambient);
    out.slice = SimplicialCurrent(std::max(0, C.dim - 1), C.ambient);
    if (C.dim == 2)
      for (int i = 0; i < C.size(); ++i) clip_triangle(C.simplices[i], C.mult[i], out);
    else if (C.dim == 1)
      for (int i = 0; i < C.size(); ++i) clip_segment(C.simplices[i], C.mult[i], out);
    else
      for (int i = 0; i < C.size(); ++i)
        (inside(C.simplices[i][0]) ? out.inside : out.outside).add(C.simplices[i], C.mult[i]);
    out.inside.vertices = out.outside.vertices = out.slice.vertices = verts_;
    out.inside = canonicalize(out.inside);
    out.outside = canonicalize(out.outside);
    out.slice = canonicalize(out.slice);
    return out;
  }

 private:
  Point x_;
  double r_;
  int facets_;
  int steps_ = 0;
  std::vector<Point> verts_;
  std::size_t base_;
  std::map<std::pair<int, int>, std::vector<std::pair<double, int>>> crossings_;

  bool inside(int v) const { return (verts_[v] - x_).norm() <= r_; }

  bool collides(const SimplicialCurrent& T) const {
    double win = 0.5e-9 * r_;
    for (std::size_t v = 0; v < base_; ++v)
      if (std::abs((verts_[v] - x_).norm() - r_) <= win) return true;
    auto seg_touch = [&](int a, int b) {
      Point c = closest_point_segment(x_, verts_[a], verts_[b]);
      return std::abs((c - x_).norm() - r_) <= win;
    };
    for (int i = 0; i < T.size(); ++i) {
      const auto& s = T.simplices[i];
      if (T.dim >= 1 && seg_touch(s[0], s[1])) return true;
      if (T.dim == 2) {
        if (seg_touch(s[1], s[2]) || seg_touch(s[2], s[0])) return true;
        Point c = closest_point_triangle(x_, verts_[s[0]], verts_[s[1]], verts_[s[2]]);
        if (std::abs((c - x_).norm() - r_) <= win) return true;
      }
    }
    return false;
  }

  void choose_radius(const SimplicialCurrent& T) {
    while (collides(T)) {
      if (++steps_ > 200) throw MathError("could not perturb radius off the mesh");
      r_ *= 1.0 + 1e-9;
    }
  }

  // Crossing vertices on edge (a,b), ordered from a to b.
  std::vector<int> edge_crossings(int a, int b) {
    int lo = std::min(a, b), hi = std::max(a, b);
    auto key = std::make_pair(lo, hi);
    auto it = crossings_.find(key);
    if (it == crossings_.end()) {
      std::vector<std::pair<double, int>> list;
      const Point p = verts_[lo], q = verts_[hi];
      Point d = q - p, w = p - x_;
      double A = d.squaredNorm(), B = w.dot(d), Cc = w.squaredNorm() - r_ * r_;
      double disc = B * B - A * Cc;
      if (disc > 0 && A > 0) {
        double sq = std::sqrt(disc);
        for (double t : {(-B - sq) / A, (-B + sq) / A})
          if (t > 0 && t < 1) {
            Point z = p + t * d;
            z = x_ + r_ * (z - x_).normalized();
            verts_.push_back(z);
            list.emplace_back(t, static_cast<int>(verts_.size()) - 1);
          }
      }
      it = crossings_.emplace(key, std::move(list)).first;
    }
    std::vector<int> ids;
    for (auto& pr : it->second) ids.push_back(pr.second);
    if (a > b) std::reverse(ids.begin(), ids.end());
    return ids;
  }

  void clip_segment(const std::array<int, 4>& s, std::int64_t m, BallClip& out) {
    std::vector<int> pts{s[0]};
    for (int c : edge_crossings(s[0], s[1])) pts.push_back(c);
    pts.push_back(s[1]);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      Point mid = 0.5 * (verts_[pts[i]] + verts_[pts[i + 1]]);
      bool in = (mid - x_).norm() <= r_;
      (in ? out.inside : out.outside).add(pts[i], pts[i + 1], m);
      if (in) {
        if (i + 2 < pts.size()) out.slice.add({pts[i + 1], -1, -1, -1}, m);
        if (i > 0) out.slice.add({pts[i], -1, -1, -1}, -m);
      }
    }
  }

  void clip_triangle(const std::array<int, 4>& s, std::int64_t m, BallClip& out) {
    const Point &A = verts_[s[0]], &B = verts_[s[1]], &C = verts_[s[2]];
    TriFrame f = tri_frame(A, B, C);
    Point d = x_ - A;
    Vec2 c2{d.dot(f.e1), d.dot(f.e2)};
    double rho2 = r_ * r_ - (d.squaredNorm() - c2.squaredNorm());
    double rho = rho2 > 0 ? std::sqrt(rho2) : 0.0;

    // boundary walk: points and whether the following piece is inside
    std::vector<int> bp;
    for (int e = 0; e < 3; ++e) {
      int p = s[e], q = s[(e + 1) % 3];
      bp.push_back(p);
      for (int c : edge_crossings(p, q)) bp.push_back(c);
    }
    int n = static_cast<int>(bp.size());
    std::vector<char> in(n);
    bool any_in = false, any_out = false;
    for (int i = 0; i < n; ++i) {
      Point mid = 0.5 * (verts_[bp[i]] + verts_[bp[(i + 1) % n]]);
      in[i] = (mid - x_).norm() <= r_;
      (in[i] ? any_in : any_out) = true;
    }
    auto pos2 = [&](int v) { return f.to2(verts_[v]); };
    if (!any_out) {
      out.inside.add(s, m);
      return;
    }
    if (!any_in) {
      bool disk_inside = rho > 0;
      Vec2 P[3] = {Vec2(0, 0), pos2(s[1]), pos2(s[2])};
      for (int e = 0; e < 3 && disk_inside; ++e) {
        Vec2 u = P[(e + 1) % 3] - P[e];
        if (cross2(u, c2 - P[e]) / u.norm() < rho) disk_inside = false;
      }
      if (disk_inside) throw MathError("ball lies inside a single simplex; refine the mesh or enlarge r");
      out.outside.add(s, m);
      return;
    }
    // arcs from exit (end of an inside piece) to next entry, counterclockwise
    auto angle = [&](int v) {
      Vec2 w = pos2(v) - c2;
      return std::atan2(w.y(), w.x());
    };
    auto make_arc = [&](int from, int to) {
      double a0 = angle(from), a1 = angle(to);
      double da = a1 - a0;
      while (da <= 0) da += 2 * pi;
      while (da > 2 * pi) da -= 2 * pi;
      int k = std::max(1, static_cast<int>(std::ceil(da * facets_ / (2 * pi))));
      std::vector<int> arc{from};
      for (int j = 1; j < k; ++j) {
        double t = a0 + da * j / k;
        verts_.push_back(f.to3(c2 + rho * Vec2(std::cos(t), std::sin(t))));
        arc.push_back(static_cast<int>(verts_.size()) - 1);
      }
      arc.push_back(to);
      return arc;
    };
    // inside loop: inside pieces joined by ccw arcs across outside runs
    std::vector<int> loop;
    std::vector<std::vector<int>> arcs;  // arcs[k] spans the k-th outside run
    std::vector<std::pair<int, int>> runs;  // outside runs as (start index, end index)
    int start = 0;
    while (in[(start + n - 1) % n] || !in[start]) start = (start + 1) % n;  // first inside piece after an outside one
    for (int k = 0; k < n;) {
      int i = (start + k) % n;
      if (in[i]) {
        loop.push_back(bp[i]);
        ++k;
        continue;
      }
      int j = k;
      while (j < n && !in[(start + j) % n]) ++j;
      int i_end = (start + j) % n;
      runs.emplace_back(i, i_end);
      auto arc = make_arc(bp[i], bp[i_end]);
      for (std::size_t a = 0; a + 1 < arc.size(); ++a) loop.push_back(arc[a]);
      for (std::size_t a = 0; a + 1 < arc.size(); ++a) out.slice.add(arc[a], arc[a + 1], m);
      arcs.push_back(std::move(arc));
      k = j;
    }
    emit_polygon(loop, f, m, out.inside);
    // each outside run closes with its arc reversed
    for (std::size_t r = 0; r < runs.size(); ++r) {
      std::vector<int> ext;
      int i = runs[r].first, e = runs[r].second;
      for (int t = i; t != e; t = (t + 1) % n) ext.push_back(bp[t]);
      const auto& arc = arcs[r];
      for (std::size_t a = arc.size() - 1; a > 0; --a) ext.push_back(arc[a]);
      emit_polygon(ext, f, m, out.outside);
    }
  }

  void emit_polygon(const std::vector<int>& loop, const TriFrame& f, std::int64_t m, SimplicialCurrent& dst) {
    std::vector<Vec2> poly;
    for (int v : loop) poly.push_back(f.to2(verts_[v]));
    for (const auto& t : ear_clip(poly)) dst.add(loop[t[0]], loop[t[1]], loop[t[2]], m);
  }
};

inline SimplicialCurrent restrict_to_ball(const SimplicialCurrent& T, const Point& x, double r, int facets = 256) {
  BallClipper c(T, x, r, facets);
  return c.clip(T).inside;
}

struct SliceResult {
  SimplicialCurrent slice;
  double radius = 0;   // radius actually used
  bool perturbed = false;
};

inline SliceResult slice_by_radius(const SimplicialCurrent& T, const Point& x, double r, int facets = 256) {
  if (T.dim < 1) throw UsageError("slice needs a current of dimension at least 1");
  BallClipper c(T, x, r, facets);
  SliceResult s;
  s.slice = c.clip(T).slice;
  s.radius = c.radius();
  s.perturbed = c.perturbed();
  return s;
}

}  // namespace epicone
