#pragma once

#include "epicone/geometry.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

namespace epicone {

inline double tetra_volume(const Point& a, const Point& b, const Point& c, const Point& d) {
  Mat E(a.size(), 3);
  E << b - a, c - a, d - a;
  double g = (E.transpose() * E).determinant();
  return std::sqrt(std::max(0.0, g)) / 6.0;
}

// Oriented simplicial chain with integer multiplicities. Dimensions 0 to 3
// (3 only appears in flat-norm witnesses); a k-simplex uses the first k+1
// entries of its index tuple.
struct SimplicialCurrent {
  int dim = 2;
  int ambient = 4;
  std::vector<Point> vertices;
  std::vector<std::array<int, 4>> simplices;
  std::vector<std::int64_t> mult;

  SimplicialCurrent() = default;
  SimplicialCurrent(int d, int n) : dim(d), ambient(n) {}

  int size() const { return static_cast<int>(simplices.size()); }
  bool empty() const { return simplices.empty(); }

  int add_vertex(const Point& p) {
    vertices.push_back(p);
    return static_cast<int>(vertices.size()) - 1;
  }
  void add(std::array<int, 4> s, std::int64_t m) {
    if (m == 0) return;
    simplices.push_back(s);
    mult.push_back(m);
  }
  void add(int a, int b, std::int64_t m) { add({a, b, -1, -1}, m); }
  void add(int a, int b, int c, std::int64_t m) { add({a, b, c, -1}, m); }
  void add(int a, int b, int c, int d, std::int64_t m) { add({a, b, c, d}, m); }

  // k-volume of simplex i
  double volume(int i) const {
    const auto& s = simplices[i];
    if (dim == 0) return 1.0;
    if (dim == 1) return segment_length(vertices[s[0]], vertices[s[1]]);
    if (dim == 2) return triangle_area(vertices[s[0]], vertices[s[1]], vertices[s[2]]);
    return tetra_volume(vertices[s[0]], vertices[s[1]], vertices[s[2]], vertices[s[3]]);
  }
};

inline double simplex_scale(const SimplicialCurrent& T, int i) {
  const auto& s = T.simplices[i];
  double L = 0;
  for (int a = 0; a <= T.dim; ++a)
    for (int b = a + 1; b <= T.dim; ++b) L = std::max(L, (T.vertices[s[a]] - T.vertices[s[b]]).norm());
  return L;
}

inline bool is_degenerate(const SimplicialCurrent& T, int i, double tol) {
  if (T.dim == 0) return false;
  double L = simplex_scale(T, i);
  if (L == 0) return true;
  return T.volume(i) <= tol * std::pow(L, T.dim);
}

// Throws UsageError when a simplex is degenerate or a multiplicity vanishes.
inline void validate(const SimplicialCurrent& T, double tol = 1e-12) {
  if (T.dim < 0 || T.dim > 3) throw UsageError("current dimension must be between 0 and 3");
  if (T.mult.size() != T.simplices.size()) throw UsageError("one multiplicity per simplex required");
  for (const auto& v : T.vertices)
    if (v.size() != T.ambient) throw UsageError("vertex dimension does not match ambient dimension");
  for (int i = 0; i < T.size(); ++i) {
    if (T.mult[i] == 0) throw UsageError("zero multiplicity on simplex " + std::to_string(i));
    for (int a = 0; a <= T.dim; ++a)
      if (T.simplices[i][a] < 0 || T.simplices[i][a] >= static_cast<int>(T.vertices.size()))
        throw UsageError("vertex index out of range in simplex " + std::to_string(i));
    if (is_degenerate(T, i, tol)) throw UsageError("degenerate simplex " + std::to_string(i));
  }
}

// Canonical chain: sorted vertex ids -> signed multiplicity. Ids refer to the
// current's own vertex table.
using ChainKey = std::array<int, 4>;
using ChainMap = std::map<ChainKey, std::int64_t>;

inline std::pair<ChainKey, int> canonical_key(const std::array<int, 4>& s, int dim) {
  ChainKey k{-1, -1, -1, -1};
  for (int a = 0; a <= dim; ++a) k[a] = s[a];
  int sign = 1;
  for (int a = 0; a <= dim; ++a)
    for (int b = 0; b < dim - a; ++b)
      if (k[b] > k[b + 1]) std::swap(k[b], k[b + 1]), sign = -sign;
  return {k, sign};
}

inline ChainMap chain_map(const SimplicialCurrent& T) {
  ChainMap m;
  for (int i = 0; i < T.size(); ++i) {
    auto [k, sgn] = canonical_key(T.simplices[i], T.dim);
    m[k] += sgn * T.mult[i];
  }
  for (auto it = m.begin(); it != m.end();)
    it = it->second == 0 ? m.erase(it) : std::next(it);
  return m;
}

// Rebuild from a canonical chain over the same vertex table.
inline SimplicialCurrent from_chain_map(const ChainMap& m, int dim, int ambient, const std::vector<Point>& verts) {
  SimplicialCurrent T(dim, ambient);
  T.vertices = verts;
  for (const auto& [k, v] : m) T.add(k, v);
  return T;
}

// Merge repeated simplices and drop zero multiplicities.
inline SimplicialCurrent canonicalize(const SimplicialCurrent& T) {
  return from_chain_map(chain_map(T), T.dim, T.ambient, T.vertices);
}

inline SimplicialCurrent boundary(const SimplicialCurrent& T) {
  if (T.dim < 1) throw UsageError("boundary of a 0-current is undefined");
  SimplicialCurrent B(T.dim - 1, T.ambient);
  B.vertices = T.vertices;
  for (int i = 0; i < T.size(); ++i) {
    const auto& s = T.simplices[i];
    std::int64_t m = T.mult[i];
    if (T.dim == 1) {
      B.add({s[1], -1, -1, -1}, m);
      B.add({s[0], -1, -1, -1}, -m);
    } else if (T.dim == 3) {
      B.add(s[1], s[2], s[3], m);
      B.add(s[0], s[2], s[3], -m);
      B.add(s[0], s[1], s[3], m);
      B.add(s[0], s[1], s[2], -m);
    } else {
      B.add(s[1], s[2], m);
      B.add(s[2], s[0], m);
      B.add(s[0], s[1], m);
    }
  }
  return canonicalize(B);
}

inline double mass(const SimplicialCurrent& T) {
  Summer s;
  for (int i = 0; i < T.size(); ++i) s.add(std::abs(static_cast<double>(T.mult[i])) * T.volume(i));
  return s.value();
}

// Exact mass inside the closed ball B_R(x).
inline double mass(const SimplicialCurrent& T, const Point& x, double R) {
  Summer s;
  for (int i = 0; i < T.size(); ++i) {
    const auto& q = T.simplices[i];
    double w = std::abs(static_cast<double>(T.mult[i]));
    if (T.dim == 2)
      s.add(w * triangle_ball_area(T.vertices[q[0]], T.vertices[q[1]], T.vertices[q[2]], x, R));
    else if (T.dim == 1)
      s.add(w * segment_ball_length(T.vertices[q[0]], T.vertices[q[1]], x, R));
    else if ((T.vertices[q[0]] - x).norm() <= R)
      s.add(w);
  }
  return s.value();
}

inline SimplicialCurrent negate(SimplicialCurrent T) {
  for (auto& m : T.mult) m = -m;
  return T;
}

inline SimplicialCurrent scale_mult(SimplicialCurrent T, std::int64_t k) {
  if (k == 0) return SimplicialCurrent(T.dim, T.ambient);
  for (auto& m : T.mult) m *= k;
  return T;
}

// Sum of two chains; the vertex tables are concatenated.
inline SimplicialCurrent add(const SimplicialCurrent& A, const SimplicialCurrent& B) {
  if (A.dim != B.dim || A.ambient != B.ambient) throw UsageError("cannot add currents of different dimension");
  SimplicialCurrent C = A;
  int off = static_cast<int>(A.vertices.size());
  C.vertices.insert(C.vertices.end(), B.vertices.begin(), B.vertices.end());
  for (int i = 0; i < B.size(); ++i) {
    auto s = B.simplices[i];
    for (int a = 0; a <= B.dim; ++a) s[a] += off;
    C.add(s, B.mult[i]);
  }
  return C;
}

// Identify vertices closer than tol (grid hashing) and canonicalize.
inline SimplicialCurrent weld(const SimplicialCurrent& T, double tol = 1e-10) {
  struct H {
    std::size_t operator()(const std::vector<long long>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_map<std::vector<long long>, std::vector<int>, H> grid;
  std::vector<int> remap(T.vertices.size());
  std::vector<Point> out;
  int d = T.ambient;
  for (std::size_t i = 0; i < T.vertices.size(); ++i) {
    const Point& p = T.vertices[i];
    std::vector<long long> key(d);
    bool exact = tol <= 0;
    for (int a = 0; a < d; ++a) {
      if (exact) {
        double v = p(a) == 0 ? 0.0 : p(a);
        std::memcpy(&key[a], &v, sizeof v);
      } else {
        key[a] = static_cast<long long>(std::floor(p(a) / tol));
      }
    }
    int found = -1;
    std::vector<long long> nb(d);
    int ncell = 1;
    for (int a = 0; a < d && !exact; ++a) ncell *= 3;
    for (int c = 0; c < ncell && found < 0; ++c) {
      int cc = c;
      for (int a = 0; a < d; ++a) nb[a] = exact ? key[a] : key[a] + (cc % 3) - 1, cc /= 3;
      auto it = grid.find(nb);
      if (it == grid.end()) continue;
      for (int j : it->second)
        if ((out[j] - p).norm() <= tol) {
          found = j;
          break;
        }
    }
    if (found < 0) {
      found = static_cast<int>(out.size());
      out.push_back(p);
      grid[key].push_back(found);
    }
    remap[i] = found;
  }
  SimplicialCurrent W(T.dim, T.ambient);
  W.vertices = out;
  for (int i = 0; i < T.size(); ++i) {
    auto s = T.simplices[i];
    for (int a = 0; a <= T.dim; ++a) s[a] = remap[s[a]];
    bool repeated = false;
    for (int a = 0; a <= T.dim; ++a)
      for (int b = a + 1; b <= T.dim; ++b) repeated |= s[a] == s[b];
    if (!repeated) W.add(s, T.mult[i]);
  }
  return canonicalize(W);
}

// Drop vertices no simplex uses.
inline SimplicialCurrent compact(const SimplicialCurrent& T) {
  std::vector<int> remap(T.vertices.size(), -1);
  SimplicialCurrent C(T.dim, T.ambient);
  for (int i = 0; i < T.size(); ++i) {
    auto s = T.simplices[i];
    for (int a = 0; a <= T.dim; ++a) {
      if (remap[s[a]] < 0) remap[s[a]] = C.add_vertex(T.vertices[s[a]]);
      s[a] = remap[s[a]];
    }
    C.add(s, T.mult[i]);
  }
  return C;
}

// True when A - B is the zero chain after welding coincident vertices.
inline bool same_chain(const SimplicialCurrent& A, const SimplicialCurrent& B, double tol = 1e-10) {
  if (A.dim != B.dim) return false;
  return weld(add(A, negate(B)), tol).empty();
}

using PointMap = std::function<Point(const Point&)>;

// Push-forward by a vertex map. Simplices whose image is degenerate are
// dropped and counted in *dropped.
inline SimplicialCurrent push_forward(const PointMap& phi, const SimplicialCurrent& T, int* dropped = nullptr,
                                      double tol = 1e-12) {
  SimplicialCurrent P(T.dim, T.ambient);
  P.vertices.reserve(T.vertices.size());
  for (const auto& v : T.vertices) P.vertices.push_back(phi(v));
  if (!P.vertices.empty()) P.ambient = static_cast<int>(P.vertices.front().size());
  int drop = 0;
  for (int i = 0; i < T.size(); ++i) {
    P.add(T.simplices[i], T.mult[i]);
    if (is_degenerate(P, P.size() - 1, tol)) {
      P.simplices.pop_back();
      P.mult.pop_back();
      ++drop;
    }
  }
  if (dropped) *dropped = drop;
  return P;
}

// The dilation z -> (z - x)/r.
inline PointMap dilation(const Point& x, double r) {
  return [x, r](const Point& z) -> Point { return (z - x) / r; };
}

// Cone over a 1-current from apex: [a,b] becomes [apex,a,b].
inline SimplicialCurrent cone_over(const SimplicialCurrent& Z, const Point& apex, int* dropped = nullptr,
                                   double tol = 1e-12) {
  if (Z.dim != 1) throw UsageError("cone_over expects a 1-current");
  SimplicialCurrent C(2, Z.ambient);
  C.vertices = Z.vertices;
  int o = C.add_vertex(apex);
  int drop = 0;
  for (int i = 0; i < Z.size(); ++i) {
    C.add(o, Z.simplices[i][0], Z.simplices[i][1], Z.mult[i]);
    if (is_degenerate(C, C.size() - 1, tol)) {
      C.simplices.pop_back();
      C.mult.pop_back();
      ++drop;
    }
  }
  if (dropped) *dropped = drop;
  return C;
}

// ---- text format -------------------------------------------------------

inline void write_current(std::ostream& os, const SimplicialCurrent& T) {
  os << T.dim << ' ' << T.ambient << ' ' << T.vertices.size() << ' ' << T.size() << '\n';
  os << std::setprecision(17);
  for (const auto& v : T.vertices) {
    for (int a = 0; a < v.size(); ++a) os << (a ? " " : "") << v(a);
    os << '\n';
  }
  for (int i = 0; i < T.size(); ++i) {
    for (int a = 0; a <= T.dim; ++a) os << T.simplices[i][a] << ' ';
    os << T.mult[i] << '\n';
  }
}

inline void save_current(const std::string& path, const SimplicialCurrent& T) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  write_current(f, T);
}

inline SimplicialCurrent read_current(std::istream& is) {
  int dim, amb;
  long nv, ns;
  if (!(is >> dim >> amb >> nv >> ns)) throw UsageError("malformed current header");
  if (dim < 0 || dim > 3 || amb < 1 || nv < 0 || ns < 0) throw UsageError("invalid current header");
  SimplicialCurrent T(dim, amb);
  for (long i = 0; i < nv; ++i) {
    Point p(amb);
    for (int a = 0; a < amb; ++a)
      if (!(is >> p(a))) throw UsageError("malformed vertex line " + std::to_string(i));
    T.vertices.push_back(p);
  }
  for (long i = 0; i < ns; ++i) {
    std::array<int, 4> s{-1, -1, -1, -1};
    for (int a = 0; a <= dim; ++a)
      if (!(is >> s[a])) throw UsageError("malformed simplex line " + std::to_string(i));
    std::int64_t m;
    if (!(is >> m)) throw UsageError("malformed multiplicity on simplex " + std::to_string(i));
    T.simplices.push_back(s);
    T.mult.push_back(m);
  }
  validate(T);
  return T;
}

inline SimplicialCurrent load_current(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  return read_current(f);
}

// ---- small builders used throughout --------------------------------------

// Closed regular k-gon of radius R in the plane spanned by u, v (traversed
// `turns` times counterclockwise).
inline SimplicialCurrent polygon_loop(const Point& u, const Point& v, double R, int k, std::int64_t m = 1) {
  SimplicialCurrent Z(1, static_cast<int>(u.size()));
  for (int j = 0; j < k; ++j) {
    double t = 2 * pi * j / k;
    Z.add_vertex(R * (std::cos(t) * u + std::sin(t) * v));
  }
  for (int j = 0; j < k; ++j) Z.add(j, (j + 1) % k, m);
  return Z;
}

// Polyline through given points.
inline SimplicialCurrent polyline(const std::vector<Point>& pts, bool closed, std::int64_t m = 1) {
  SimplicialCurrent Z(1, pts.empty() ? 4 : static_cast<int>(pts.front().size()));
  for (const auto& p : pts) Z.add_vertex(p);
  int n = static_cast<int>(pts.size());
  for (int j = 0; j + 1 < n; ++j) Z.add(j, j + 1, m);
  if (closed && n > 2) Z.add(n - 1, 0, m);
  return Z;
}

}  // namespace epicone
