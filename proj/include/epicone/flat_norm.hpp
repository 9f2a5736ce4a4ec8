#pragma once

#include "epicone/clip.hpp"
#include "epicone/lp.hpp"

namespace epicone {

// k-simplices and (k+1)-simplices sharing a vertex table, with canonical
// (sorted) orientation for every simplex.
struct ChainComplex {
  int k = 1;
  int ambient = 4;
  std::vector<Point> vertices;
  std::vector<ChainKey> cells;  // k-simplices
  std::vector<ChainKey> faces;  // (k+1)-simplices
  std::map<ChainKey, int> cell_index;

  int cell(const ChainKey& key) {
    auto it = cell_index.find(key);
    if (it != cell_index.end()) return it->second;
    cells.push_back(key);
    return cell_index[key] = static_cast<int>(cells.size()) - 1;
  }
  int find_cell(const ChainKey& key) const {
    auto it = cell_index.find(key);
    return it == cell_index.end() ? -1 : it->second;
  }
  // Optional replacement for the Euclidean volume of a d-simplex, e.g. for
  // complexes whose simplices stand for geodesic simplices on a sphere.
  std::function<double(const ChainKey&, int)> metric;

  double volume(const ChainKey& s, int d) const {
    if (metric) return metric(s, d);
    if (d == 1) return segment_length(vertices[s[0]], vertices[s[1]]);
    if (d == 2) return triangle_area(vertices[s[0]], vertices[s[1]], vertices[s[2]]);
    return tetra_volume(vertices[s[0]], vertices[s[1]], vertices[s[2]], vertices[s[3]]);
  }
  // Registers a (k+1)-simplex given by vertex ids; repeated vertices are ignored.
  void add_face(std::array<int, 4> v) {
    ChainKey key{-1, -1, -1, -1};
    for (int a = 0; a <= k + 1; ++a) key[a] = v[a];
    std::sort(key.begin(), key.begin() + k + 2);
    for (int a = 0; a <= k; ++a)
      if (key[a] == key[a + 1]) return;
    faces.push_back(key);
    for (int drop = 0; drop <= k + 1; ++drop) {
      ChainKey c{-1, -1, -1, -1};
      for (int a = 0, b = 0; a <= k + 1; ++a)
        if (a != drop) c[b++] = key[a];
      cell(c);
    }
  }
  void add_cell(std::array<int, 4> v) {
    ChainKey key{-1, -1, -1, -1};
    for (int a = 0; a <= k; ++a) key[a] = v[a];
    std::sort(key.begin(), key.begin() + k + 1);
    cell(key);
  }
};

struct FlatResult {
  double value = 0;
  LPStatus status = LPStatus::Optimal;
  bool integral = true;
  int iterations = 0;
  int branch_nodes = 0;
  SimplicialCurrent R, Q;  // witness with T - S = R + dQ
  int cells = 0, faces = 0;
};

// Coefficients of a chain (ids into K.vertices) on K's cells.
inline Eigen::VectorXd chain_on_complex(const ChainComplex& K, const SimplicialCurrent& T) {
  if (T.dim != K.k) throw UsageError("chain dimension does not match complex");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(K.cells.size());
  for (const auto& [key, m] : chain_map(T)) {
    int id = K.find_cell(key);
    if (id < 0) throw MathError("chain is not supported on the complex");
    c(id) += static_cast<double>(m);
  }
  return c;
}

// Minimal M(R) + M(Q) with T - S = R + dQ over integer chains of K, where
// T and S are given as coefficient vectors on K's cells.
inline FlatResult flat_norm_on_complex(const ChainComplex& K, const Eigen::VectorXd& diff) {
  int m = static_cast<int>(K.cells.size());
  int nf = static_cast<int>(K.faces.size());
  LinearProgram lp;
  lp.rows = m;
  lp.rhs = diff;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    double w = K.volume(K.cells[i], K.k);
    int p = lp.add_column({{i}, {1.0}}, w);
    int q = lp.add_column({{i}, {-1.0}}, w);
    basis[i] = diff(i) >= 0 ? p : q;
  }
  for (int f = 0; f < nf; ++f) {
    const ChainKey& key = K.faces[f];
    SparseColumn col;
    int sign = 1;
    for (int drop = 0; drop <= K.k + 1; ++drop, sign = -sign) {
      ChainKey c{-1, -1, -1, -1};
      for (int a = 0, b = 0; a <= K.k + 1; ++a)
        if (a != drop) c[b++] = key[a];
      col.index.push_back(K.find_cell(c));
      col.value.push_back(sign);
    }
    double w = K.volume(key, K.k + 1);
    SparseColumn neg = col;
    for (auto& v : neg.value) v = -v;
    lp.add_column(col, w);
    lp.add_column(neg, w);
  }
  LPResult r = solve_lp(lp, &basis);
  FlatResult out;
  out.cells = m;
  out.faces = nf;
  if (r.status == LPStatus::Optimal && !is_integral(r.x)) r = solve_ip(lp, &basis);
  out.status = r.status;
  if (r.status == LPStatus::Infeasible) throw MathError("flat-norm LP infeasible (boundary mismatch)");
  if (r.status != LPStatus::Optimal) throw MathError(std::string("flat-norm LP failed: ") + to_string(r.status));
  out.integral = is_integral(r.x);
  out.iterations = r.iterations;
  out.branch_nodes = r.branch_nodes;
  out.R = SimplicialCurrent(K.k, K.ambient);
  out.Q = SimplicialCurrent(K.k + 1, K.ambient);
  out.R.vertices = out.Q.vertices = K.vertices;
  Summer val;
  for (int i = 0; i < m; ++i) {
    double c = r.x(2 * i) - r.x(2 * i + 1);
    auto ci = static_cast<std::int64_t>(std::llround(c));
    if (ci != 0) out.R.add(K.cells[i], ci);
    val.add(std::abs(c) * K.volume(K.cells[i], K.k));
  }
  for (int f = 0; f < nf; ++f) {
    double c = r.x(2 * m + 2 * f) - r.x(2 * m + 2 * f + 1);
    auto ci = static_cast<std::int64_t>(std::llround(c));
    if (ci != 0) out.Q.add(K.faces[f], ci);
    val.add(std::abs(c) * K.volume(K.faces[f], K.k + 1));
  }
  out.value = val.value();
  return out;
}

inline FlatResult flat_distance_on_complex(const ChainComplex& K, const SimplicialCurrent& T, const SimplicialCurrent& S) {
  return flat_norm_on_complex(K, chain_on_complex(K, T) - chain_on_complex(K, S));
}

// Kuhn-triangulated nx x ny grid of squares of side h with lower-left corner
// `origin` in span(e1, e2).
inline ChainComplex grid_complex(int nx, int ny, double h, Vec2 origin = Vec2(0, 0), int ambient = 4) {
  ChainComplex K;
  K.k = 1;
  K.ambient = ambient;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      Point p = Point::Zero(ambient);
      p(0) = origin.x() + i * h;
      p(1) = origin.y() + j * h;
      K.vertices.push_back(p);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      K.add_face({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      K.add_face({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  return K;
}

// Map a current into K by matching vertex coordinates.
inline SimplicialCurrent reindex_onto(const ChainComplex& K, const SimplicialCurrent& T, double tol = 1e-9) {
  SimplicialCurrent R(T.dim, T.ambient);
  R.vertices = K.vertices;
  std::vector<int> remap(T.vertices.size(), -1);
  for (std::size_t i = 0; i < T.vertices.size(); ++i) {
    double best = tol;
    for (std::size_t j = 0; j < K.vertices.size(); ++j) {
      double d = (K.vertices[j] - T.vertices[i]).norm();
      if (d <= best) best = d, remap[i] = static_cast<int>(j);
    }
  }
  for (int i = 0; i < T.size(); ++i) {
    auto s = T.simplices[i];
    for (int a = 0; a <= T.dim; ++a) {
      if (remap[s[a]] < 0) throw MathError("current vertex not found in complex");
      s[a] = remap[s[a]];
    }
    R.add(s, T.mult[i]);
  }
  return R;
}

namespace detail {

// Affine 2-plane through the vertices of T and S, if they are coplanar.
inline bool common_plane(const std::vector<Point>& pts, Point& origin, Point& u, Point& v, double tol) {
  if (pts.empty()) return false;
  origin = pts.front();
  Mat D(pts.front().size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) D.col(i) = pts[i] - origin;
  Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeThinU);
  auto sv = svd.singularValues();
  double scale = std::max(1.0, sv(0));
  if (sv.size() > 2 && sv(2) > tol * scale) return false;
  u = svd.matrixU().col(0);
  v = sv.size() > 1 ? Point(svd.matrixU().col(1)) : Point(unit(static_cast<int>(origin.size()), 1));
  if (sv.size() > 1 && sv(1) <= tol * scale) {
    // collinear input: pick any orthonormal completion
    Point w = unit(static_cast<int>(origin.size()), 0);
    if (std::abs(w.dot(u)) > 0.9) w = unit(static_cast<int>(origin.size()), 1);
    v = (w - w.dot(u) * u).normalized();
  }
  return true;
}

}  // namespace detail

// Conforming triangulation of a box containing the planar 1-chains T and S:
// segments are split at mutual intersections, the plane is cut into vertical
// slabs at every vertex abscissa, and each trapezoid between consecutive
// pieces is zipped into triangles.
struct PlanarOverlay {
  ChainComplex complex;
  SimplicialCurrent T, S;  // reindexed onto complex.vertices
};

inline PlanarOverlay planar_overlay(const SimplicialCurrent& T, const SimplicialCurrent& S, double tol = 1e-10) {
  if (T.dim != 1 || S.dim != 1) throw UsageError("planar overlay expects 1-currents");
  std::vector<Point> all = T.vertices;
  all.insert(all.end(), S.vertices.begin(), S.vertices.end());
  Point O, U, V;
  if (!detail::common_plane(all, O, U, V, 1e-9)) throw MathError("currents not unifiable: not coplanar");
  auto to2 = [&](const Point& p) { return Vec2((p - O).dot(U), (p - O).dot(V)); };
  struct Seg {
    Vec2 a, b;
  };
  std::vector<Seg> segs;
  for (const auto* C : {&T, &S})
    for (int i = 0; i < C->size(); ++i)
      segs.push_back({to2(C->vertices[C->simplices[i][0]]), to2(C->vertices[C->simplices[i][1]])});
  Vec2 lo(1e300, 1e300), hi(-1e300, -1e300);
  for (const auto& s : segs)
    for (const Vec2& p : {s.a, s.b}) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
  if (segs.empty()) lo = hi = Vec2(0, 0);
  double ext = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-6});
  double eps = tol * ext;
  lo -= Vec2(0.1 * ext, 0.1 * ext);
  hi += Vec2(0.1 * ext, 0.1 * ext);

  // split segments at intersections
  std::vector<std::vector<double>> cuts(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    cuts[i] = {0.0, 1.0};
    Vec2 d1 = segs[i].b - segs[i].a;
    double L1 = d1.norm();
    for (std::size_t j = 0; j < segs.size(); ++j) {
      if (i == j) continue;
      Vec2 d2 = segs[j].b - segs[j].a;
      for (const Vec2& p : {segs[j].a, segs[j].b}) {
        double t = (p - segs[i].a).dot(d1) / (L1 * L1);
        if (t > 0 && t < 1 && std::abs(cross2(d1, p - segs[i].a)) / L1 <= eps) cuts[i].push_back(t);
      }
      double den = cross2(d1, d2);
      if (std::abs(den) > eps * L1 * d2.norm()) {
        Vec2 w = segs[j].a - segs[i].a;
        double t = cross2(w, d2) / den, s = cross2(w, d1) / den;
        if (t > 0 && t < 1 && s > 0 && s < 1) cuts[i].push_back(t);
      }
    }
    std::sort(cuts[i].begin(), cuts[i].end());
  }
  // global points with tolerance merge
  std::vector<Vec2> pts;
  auto point_id = [&](const Vec2& p) {
    for (std::size_t k = 0; k < pts.size(); ++k)
      if ((pts[k] - p).norm() <= eps) return static_cast<int>(k);
    pts.push_back(p);
    return static_cast<int>(pts.size()) - 1;
  };
  std::vector<std::pair<int, int>> pieces;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    int prev = -1;
    for (double t : cuts[i]) {
      int id = point_id(segs[i].a + t * (segs[i].b - segs[i].a));
      if (prev >= 0 && prev != id) pieces.emplace_back(std::min(prev, id), std::max(prev, id));
      prev = id;
    }
  }
  std::sort(pieces.begin(), pieces.end());
  pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
  for (const Vec2& c : {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())}) point_id(c);

  std::vector<double> xs;
  for (const auto& p : pts) xs.push_back(p.x());
  std::sort(xs.begin(), xs.end());
  std::vector<double> lines;
  for (double x : xs)
    if (lines.empty() || x - lines.back() > eps) lines.push_back(x);
  auto line_of = [&](double x) {
    auto it = std::lower_bound(lines.begin(), lines.end(), x - eps);
    return static_cast<int>(it - lines.begin());
  };
  for (auto& p : pts) p.x() = lines[line_of(p.x())];

  // vertical line point sets: y -> global id
  std::vector<std::vector<std::pair<double, int>>> on_line(lines.size());
  auto line_point = [&](int li, double y) {
    for (auto& [yy, id] : on_line[li])
      if (std::abs(yy - y) <= eps) return id;
    pts.emplace_back(lines[li], y);
    int id = static_cast<int>(pts.size()) - 1;
    on_line[li].emplace_back(y, id);
    return id;
  };
  for (std::size_t k = 0; k < pts.size(); ++k) on_line[line_of(pts[k].x())].emplace_back(pts[k].y(), static_cast<int>(k));
  auto y_at = [&](const std::pair<int, int>& pc, double x) {
    Vec2 p = pts[pc.first], q = pts[pc.second];
    if (p.x() > q.x()) std::swap(p, q);
    return p.y() + (x - p.x()) * (q.y() - p.y()) / (q.x() - p.x());
  };
  ChainComplex K;
  K.k = 1;
  K.ambient = T.ambient;
  std::vector<std::array<int, 3>> tris;
  for (std::size_t s = 0; s + 1 < lines.size(); ++s) {
    double xa = lines[s], xb = lines[s + 1];
    std::vector<std::pair<double, std::pair<int, int>>> span;  // (mid y, (left id, right id))
    for (const auto& pc : pieces) {
      double x0 = std::min(pts[pc.first].x(), pts[pc.second].x());
      double x1 = std::max(pts[pc.first].x(), pts[pc.second].x());
      if (x1 - x0 <= eps || x0 > xa + eps || x1 < xb - eps) continue;
      double ya = y_at(pc, xa), yb = y_at(pc, xb);
      span.push_back({0.5 * (ya + yb), {line_point(static_cast<int>(s), ya), line_point(static_cast<int>(s + 1), yb)}});
    }
    span.push_back({lo.y(), {line_point(static_cast<int>(s), lo.y()), line_point(static_cast<int>(s + 1), lo.y())}});
    span.push_back({hi.y(), {line_point(static_cast<int>(s), hi.y()), line_point(static_cast<int>(s + 1), hi.y())}});
    std::sort(span.begin(), span.end());
    span.erase(std::unique(span.begin(), span.end(),
                           [](const auto& a, const auto& b) { return a.second == b.second; }),
               span.end());
    for (std::size_t i = 0; i + 1 < span.size(); ++i) {
      auto side = [&](int li, int lo_id, int hi_id) {
        double y0 = pts[lo_id].y(), y1 = pts[hi_id].y();
        std::vector<std::pair<double, int>> c;
        for (auto& [y, id] : on_line[li])
          if (y >= y0 - eps && y <= y1 + eps) c.emplace_back(y, id);
        std::sort(c.begin(), c.end());
        std::vector<int> ids;
        for (auto& pr : c)
          if (ids.empty() || ids.back() != pr.second) ids.push_back(pr.second);
        return ids;
      };
      auto L = side(static_cast<int>(s), span[i].second.first, span[i + 1].second.first);
      auto R = side(static_cast<int>(s + 1), span[i].second.second, span[i + 1].second.second);
      std::size_t li = 0, ri = 0;
      while (li + 1 < L.size() || ri + 1 < R.size()) {
        bool adv_right = li + 1 >= L.size() ||
                         (ri + 1 < R.size() && pts[R[ri + 1]].y() - pts[R[0]].y() <= pts[L[li + 1]].y() - pts[L[0]].y());
        if (adv_right) {
          tris.push_back({L[li], R[ri], R[ri + 1]});
          ++ri;
        } else {
          tris.push_back({L[li], R[ri], L[li + 1]});
          ++li;
        }
      }
    }
  }
  for (const auto& p : pts) K.vertices.push_back(O + p.x() * U + p.y() * V);
  for (const auto& t : tris) K.add_face({t[0], t[1], t[2], -1});

  // express T and S on the complex: walk each segment through the vertices on it
  auto embed = [&](const SimplicialCurrent& C) {
    SimplicialCurrent out(1, C.ambient);
    out.vertices = K.vertices;
    for (int i = 0; i < C.size(); ++i) {
      Vec2 a = to2(C.vertices[C.simplices[i][0]]), b = to2(C.vertices[C.simplices[i][1]]);
      Vec2 d = b - a;
      double L = d.norm();
      std::vector<std::pair<double, int>> on;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        Vec2 w = pts[k] - a;
        double t = w.dot(d) / (L * L);
        if (t >= -eps / L && t <= 1 + eps / L && std::abs(cross2(d, w)) / L <= 4 * eps) on.emplace_back(t, static_cast<int>(k));
      }
      std::sort(on.begin(), on.end());
      for (std::size_t k = 0; k + 1 < on.size(); ++k) {
        if (on[k].second == on[k + 1].second) continue;
        ChainKey key{std::min(on[k].second, on[k + 1].second), std::max(on[k].second, on[k + 1].second), -1, -1};
        if (K.find_cell(key) < 0) throw MathError("overlay lost a segment piece");
        out.add(on[k].second, on[k + 1].second, C.mult[i]);
      }
    }
    return canonicalize(out);
  };
  PlanarOverlay ov;
  ov.T = embed(T);
  ov.S = embed(S);
  ov.complex = std::move(K);
  return ov;
}

// Prism complex of the straight-line homotopy between T and g(T): every
// k-simplex [v0..vk] (vertex ids sorted) spans the staircase simplices
// [p0..pj, qj..qk]. Returns the complex with T and g(T) reindexed onto it.
struct HomotopyComplex {
  ChainComplex complex;
  SimplicialCurrent T, gT;
};

inline HomotopyComplex homotopy_complex(const SimplicialCurrent& T, const std::vector<Point>& image, double tol = 1e-12) {
  int nv = static_cast<int>(T.vertices.size());
  std::vector<Point> verts = T.vertices;
  std::vector<int> img(nv);
  for (int i = 0; i < nv; ++i) {
    if ((image[i] - T.vertices[i]).norm() <= tol) {
      img[i] = i;
    } else {
      verts.push_back(image[i]);
      img[i] = static_cast<int>(verts.size()) - 1;
    }
  }
  HomotopyComplex H;
  ChainComplex& K = H.complex;
  K.k = T.dim;
  K.ambient = T.ambient;
  K.vertices = verts;
  for (int i = 0; i < T.size(); ++i) {
    auto s = T.simplices[i];
    std::sort(s.begin(), s.begin() + T.dim + 1);
    for (int j = 0; j <= T.dim; ++j) {
      std::array<int, 4> f{-1, -1, -1, -1};
      int b = 0;
      for (int a = 0; a <= j; ++a) f[b++] = s[a];
      for (int a = j; a <= T.dim; ++a) f[b++] = img[s[a]];
      K.add_face(f);
    }
    K.add_cell(s);
    for (int a = 0; a <= T.dim; ++a) s[a] = img[s[a]];
    K.add_cell(s);
  }
  H.T = T;
  H.T.vertices = verts;
  H.gT = T;
  H.gT.vertices = verts;
  for (auto& s : H.gT.simplices)
    for (int a = 0; a <= T.dim; ++a) s[a] = img[s[a]];
  // zero-volume faces would allow free moves between unrelated cells
  std::vector<ChainKey> keep;
  for (const auto& f : K.faces)
    if (K.volume(f, K.k + 1) > 0) keep.push_back(f);
  K.faces = keep;
  return H;
}

inline HomotopyComplex homotopy_complex(const SimplicialCurrent& T, const PointMap& g, double tol = 1e-12) {
  std::vector<Point> image;
  for (const auto& v : T.vertices) image.push_back(g(v));
  return homotopy_complex(T, image, tol);
}

// Mass of the straight-line homotopy witness: M(h(I x T)) + M(h(I x dT)).
// An upper bound for the flat distance between T and g(T).
inline double homotopy_mass_bound(const SimplicialCurrent& T, const std::vector<Point>& q) {
  if (q.size() != T.vertices.size()) throw UsageError("homotopy image needs one point per vertex");
  auto prism = [&](std::array<int, 4> s, int d) {
    std::sort(s.begin(), s.begin() + d + 1);
    double v = 0;
    for (int j = 0; j <= d; ++j) {
      std::vector<Point> f;
      for (int a = 0; a <= j; ++a) f.push_back(T.vertices[s[a]]);
      for (int a = j; a <= d; ++a) f.push_back(q[s[a]]);
      if (d == 0) v += (f[1] - f[0]).norm();
      else if (d == 1) v += triangle_area(f[0], f[1], f[2]);
      else v += tetra_volume(f[0], f[1], f[2], f[3]);
    }
    return v;
  };
  Summer s;
  for (int i = 0; i < T.size(); ++i) s.add(std::abs(static_cast<double>(T.mult[i])) * prism(T.simplices[i], T.dim));
  if (T.dim >= 1) {
    auto dT = boundary(T);
    for (int i = 0; i < dT.size(); ++i) s.add(std::abs(static_cast<double>(dT.mult[i])) * prism(dT.simplices[i], dT.dim));
  }
  return s.value();
}

inline double homotopy_mass_bound(const SimplicialCurrent& T, const PointMap& g) {
  std::vector<Point> q(T.vertices.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = g(T.vertices[i]);
  return homotopy_mass_bound(T, q);
}

// Flat distance with automatic refinement onto a common complex: identical
// chains give 0; coplanar 1-currents use the planar overlay; currents with the
// same simplices (vertex correspondence by index) use the homotopy complex.
inline FlatResult flat_distance(const SimplicialCurrent& T, const SimplicialCurrent& S) {
  if (T.dim != S.dim) throw UsageError("flat distance needs currents of equal dimension");
  if (same_chain(T, S)) {
    FlatResult r;
    r.R = SimplicialCurrent(T.dim, T.ambient);
    r.Q = SimplicialCurrent(T.dim + 1, T.ambient);
    return r;
  }
  if (T.dim == 1) {
    std::vector<Point> all = T.vertices;
    all.insert(all.end(), S.vertices.begin(), S.vertices.end());
    Point O, U, V;
    if (detail::common_plane(all, O, U, V, 1e-9)) {
      auto ov = planar_overlay(T, S);
      return flat_distance_on_complex(ov.complex, ov.T, ov.S);
    }
  }
  if (T.vertices.size() == S.vertices.size() && T.simplices == S.simplices && T.mult == S.mult) {
    auto H = homotopy_complex(T, S.vertices);
    return flat_distance_on_complex(H.complex, H.T, H.gT);
  }
  throw MathError("currents not unifiable onto a common complex");
}

// Restrict both currents to a ball first.
inline FlatResult flat_distance(const SimplicialCurrent& T, const SimplicialCurrent& S, const Point& x, double R) {
  return flat_distance(compact(restrict_to_ball(T, x, R)), compact(restrict_to_ball(S, x, R)));
}

}  // namespace epicone
