#pragma once

#include "epicone/boundary_chart.hpp"
#include "epicone/clip.hpp"
#include "epicone/cone.hpp"
#include "epicone/meshes.hpp"

#include <Eigen/SparseCholesky>
#include <map>
#include <random>
#include <string>

namespace epicone {

struct ScenarioParams {
  int resolution = 32;   // angular cells per half turn
  double scale = 1e-3;   // innermost resolved radius of graded meshes
  double R = 1.0;        // patch radius (hemisphere radius)
  int Q = 2;             // multi-cone sheets
  double c = 0.2;        // curved boundary amplitude
  double alpha = 0.5;    // curved boundary Hölder exponent
  double amplitude = 0.05;
  double beta = 0.5;     // perturbed-cone decay exponent
  int k = 2;             // perturbed-cone angular mode
  double eps = 0.3;      // Kähler graph w = eps z^2
};

struct AlmostMinimality {
  bool analytic = false;  // false: constants must be measured
  double C0 = 0, r0 = 0, alpha0 = 0;
};

struct Scenario {
  std::string name;
  SimplicialCurrent T;
  Point x;                   // marked boundary point
  ConeSpec cone;             // expected tangent cone at x, centred at the origin
  SimplicialCurrent gamma;   // declared boundary curve, on T's vertex table
  BoundaryGraph graph;       // Gamma near x as a graph over its tangent line
  double holder = 1.0;       // Hölder exponent of Gamma's derivative
  double C3 = 0, alpha3 = 1; // monotonicity constants used for this current
  AlmostMinimality constants;
  int plateau_iterations = 0;
};

inline std::vector<std::string> scenario_names() {
  return {"halfplane", "multi-cone", "curved-boundary-graph", "hemisphere", "perturbed-cone", "kahler-line"};
}

namespace detail {

// 0, then rings geometrically spaced from rmin to R with aspect ratio about 1
// against n angular cells per half turn.
inline std::vector<double> geometric_radii(double R, double rmin, int n) {
  int rings = std::max(2, static_cast<int>(std::ceil(std::log(R / rmin) / (pi / n))) + 1);
  std::vector<double> r{0.0};
  for (int i = 0; i < rings; ++i) r.push_back(rmin * std::pow(R / rmin, static_cast<double>(i) / (rings - 1)));
  return r;
}

// Half-disk polar mesh data: vertex id of ring i (1-based) at angle index j.
struct HalfDiskMesh {
  SimplicialCurrent T;
  std::vector<double> radii;
  int n = 0;
  int id(std::size_t i, int j) const { return i == 0 ? 0 : 1 + static_cast<int>(i - 1) * (n + 1) + j; }
  std::size_t rings() const { return radii.size() - 1; }
};

inline HalfDiskMesh half_disk(const std::vector<double>& radii, int n, const PolarMap& F) {
  HalfDiskMesh M;
  M.radii = radii;
  M.n = n;
  M.T = polar_mesh(radii, n, 0, pi, F);
  return M;
}

// The diameter of the half-disk, from -R through 0 to R.
inline SimplicialCurrent diameter_chain(const HalfDiskMesh& M) {
  SimplicialCurrent G(1, M.T.ambient);
  G.vertices = M.T.vertices;
  for (std::size_t i = M.rings(); i >= 1; --i) G.add(M.id(i, M.n), M.id(i - 1, M.n), 1);
  for (std::size_t i = 0; i < M.rings(); ++i) G.add(M.id(i, 0), M.id(i + 1, 0), 1);
  return G;
}

// Minimises the area of the graph of u over the planar mesh, with u fixed on
// the vertices flagged in `fixed`. Lagged diffusivity: each step solves the
// Laplace problem weighted by 1/sqrt(1 + |grad u|^2) of the previous iterate.
inline int plateau_solve(const std::vector<Vec2>& P, const std::vector<std::array<int, 3>>& tris,
                         const std::vector<bool>& fixed, std::vector<double>& u, double tol = 1e-13,
                         int max_iter = 200) {
  int nv = static_cast<int>(P.size());
  std::vector<int> free_id(nv, -1);
  int nf = 0;
  for (int v = 0; v < nv; ++v)
    if (!fixed[v]) free_id[v] = nf++;
  if (nf == 0) return 0;
  struct Local {
    Eigen::Matrix<double, 2, 3> G;
    double area;
  };
  std::vector<Local> loc(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const Vec2 &a = P[tris[t][0]], &b = P[tris[t][1]], &c = P[tris[t][2]];
    Eigen::Matrix2d E;
    E << b - a, c - a;
    double det = E.determinant();
    loc[t].area = 0.5 * std::abs(det);
    Eigen::Matrix2d Einv = E.inverse();  // rows map (du_b, du_c) to grad
    Eigen::Matrix<double, 2, 3> D;
    D << -1, 1, 0, -1, 0, 1;
    loc[t].G = Einv.transpose() * D;
  }
  int it = 0;
  for (; it < max_iter; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      Eigen::Vector3d ut(u[tris[t][0]], u[tris[t][1]], u[tris[t][2]]);
      Eigen::Vector2d g = loc[t].G * ut;
      double w = loc[t].area / std::sqrt(1.0 + g.squaredNorm());
      Eigen::Matrix3d K = w * loc[t].G.transpose() * loc[t].G;
      for (int a = 0; a < 3; ++a) {
        int ia = free_id[tris[t][a]];
        if (ia < 0) continue;
        for (int b = 0; b < 3; ++b) {
          int ib = free_id[tris[t][b]];
          if (ib >= 0)
            trip.emplace_back(ia, ib, K(a, b));
          else
            rhs(ia) -= K(a, b) * u[tris[t][b]];
        }
      }
    }
    Eigen::SparseMatrix<double> A(nf, nf);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw MathError("Plateau step: factorisation failed");
    Eigen::VectorXd sol = solver.solve(rhs);
    double change = 0;
    for (int v = 0; v < nv; ++v)
      if (free_id[v] >= 0) {
        change = std::max(change, std::abs(sol(free_id[v]) - u[v]));
        u[v] = sol(free_id[v]);
      }
    if (change < tol) return it + 1;
  }
  throw MathError("Plateau iteration did not converge");
}

inline Point lift4(int ambient, double x1, double x2, double u3, double u4) {
  Point p = Point::Zero(ambient);
  p(0) = x1;
  p(1) = x2;
  p(2) = u3;
  if (ambient > 3) p(3) = u4;
  return p;
}

}  // namespace detail

// Catalog: halfplane, multi-cone, curved-boundary-graph, hemisphere,
// perturbed-cone, kahler-line.
inline Scenario build_scenario(const std::string& name, const ScenarioParams& p = {}) {
  if (p.resolution < 4) throw UsageError("scenario resolution must be at least 4");
  if (p.scale <= 0 || p.scale >= p.R) throw UsageError("scenario scale must lie in (0, R)");
  const int amb = 4;
  Scenario S;
  S.name = name;
  S.x = Point::Zero(amb);
  S.cone = halfplane_cone(amb);
  S.graph = flat_graph(amb);
  auto graded = detail::geometric_radii(p.R, p.scale, p.resolution);

  auto graph_scenario = [&](const std::function<Point(double, double)>& F) {
    auto M = detail::half_disk(graded, p.resolution,
                               [&](double rho, double phi) { return F(rho * std::cos(phi), rho * std::sin(phi)); });
    S.T = M.T;
    S.gamma = detail::diameter_chain(M);
    return M;
  };

  if (name == "halfplane") {
    graph_scenario([&](double a, double b) { return detail::lift4(amb, a, b, 0, 0); });
    S.constants = {true, 0.0, p.R, 1.0};
  } else if (name == "multi-cone") {
    if (p.Q < 0) throw UsageError("Q must be nonnegative");
    graph_scenario([&](double a, double b) { return detail::lift4(amb, a, b, 0, 0); });
    if (p.Q > 0) S.T = add(S.T, polar_mesh(graded, 2 * p.resolution, 0, 2 * pi, planar_map(amb), p.Q));
    S.cone = halfplane_cone(amb, p.Q);
    S.constants = {true, 0.0, p.R, 1.0};
  } else if (name == "curved-boundary-graph") {
    if (p.alpha <= 0 || p.alpha > 1) throw UsageError("curved boundary exponent must lie in (0, 1]");
    double e = 1 + p.alpha;
    double sn = std::sin(e * pi), cs = std::cos(e * pi);
    double b = std::abs(sn) < 1e-12 ? 0.0 : (1 - cs) / sn;
    // harmonic extension of c|x1|^{1+alpha} from the diameter; the rim keeps it
    auto model = [=](double x1, double x2) {
      double rho = std::hypot(x1, x2), phi = std::atan2(x2, x1);
      if (rho == 0) return 0.0;
      if (std::abs(x2) <= 1e-15 * rho) return p.c * std::pow(std::abs(x1), e);
      return p.c * std::pow(rho, e) * (std::cos(e * phi) + b * std::sin(e * phi));
    };
    auto M = graph_scenario([&](double a, double c2) { return detail::lift4(amb, a, c2, model(a, c2), 0); });
    int nv = static_cast<int>(M.T.vertices.size());
    std::vector<Vec2> P(nv);
    std::vector<double> u(nv);
    std::vector<bool> fixed(nv, false);
    for (int v = 0; v < nv; ++v) {
      P[v] = Vec2(M.T.vertices[v](0), M.T.vertices[v](1));
      u[v] = M.T.vertices[v](2);
    }
    for (std::size_t i = 0; i <= M.rings(); ++i) {
      fixed[M.id(i, 0)] = fixed[M.id(i, M.n)] = true;
    }
    for (int j = 0; j <= M.n; ++j) fixed[M.id(M.rings(), j)] = true;
    std::vector<std::array<int, 3>> tris;
    for (const auto& s : M.T.simplices) tris.push_back({s[0], s[1], s[2]});
    S.plateau_iterations = detail::plateau_solve(P, tris, fixed, u);
    for (int v = 0; v < nv; ++v) S.T.vertices[v](2) = u[v];
    S.gamma.vertices = S.T.vertices;
    S.graph = power_graph(p.c, e, amb, 1);
    S.holder = p.alpha;
    S.alpha3 = p.alpha;
  } else if (name == "hemisphere") {
    int nr = std::max(2, p.resolution / 4);
    double R = p.R;
    S.T = polar_mesh(graded_radii(1.0, nr), p.resolution, 0, 2 * pi, [&](double rho, double phi) {
      double psi = 0.5 * pi * rho;
      Point z = Point::Zero(amb);
      z(0) = R * std::sin(psi) * std::cos(phi);
      z(1) = R * std::sin(psi) * std::sin(phi);
      z(2) = R * std::cos(psi);
      return z;
    });
    S.gamma = SimplicialCurrent(1, amb);
    S.gamma.vertices = S.T.vertices;
    int first = 1 + (nr - 1) * p.resolution;
    for (int j = 0; j < p.resolution; ++j) S.gamma.add(first + j, first + (j + 1) % p.resolution, 1);
    S.x = S.T.vertices[first];
    S.cone.half = {unit(amb, 1), unit(amb, 2)};
    // the unweighted ratio is exactly pi/2 here, so the weight has to pay
    // for the perpendicular integral, which is about area / (8 R^2)
    S.C3 = 1.0 / R;
    // Gamma near x: the great circle as a graph over e2 bending towards -e1
    S.graph.gamma = [R, amb](double y) {
      Point z = Point::Zero(amb - 1);
      double yy = std::clamp(y / R, -1.0, 1.0);
      z(0) = R * (std::sqrt(1 - yy * yy) - 1);
      return z;
    };
    S.graph.dgamma = [R, amb](double y) {
      Point z = Point::Zero(amb - 1);
      double yy = std::clamp(y / R, -0.999999, 0.999999);
      z(0) = -yy / std::sqrt(1 - yy * yy);
      return z;
    };
    S.holder = 1.0;
  } else if (name == "perturbed-cone") {
    if (p.k < 1) throw UsageError("perturbed-cone mode must be positive");
    graph_scenario([&](double a, double b) {
      double rho = std::hypot(a, b), phi = std::atan2(b, a);
      double w = rho == 0 ? 0.0 : p.amplitude * std::pow(rho, 1 + p.beta) * std::sin(p.k * phi);
      return detail::lift4(amb, a, b, w, 0);
    });
  } else if (name == "kahler-line") {
    graph_scenario([&](double a, double b) {
      return detail::lift4(amb, a, b, p.eps * (a * a - b * b), 2 * p.eps * a * b);
    });
    S.graph = power_graph(p.eps, 2.0, amb, 1);
    S.holder = 1.0;
    S.constants = {true, 0.0, p.R, 1.0};
  } else {
    throw UsageError("unknown scenario: " + name);
  }
  return S;
}

// boundary(T) and the declared Gamma agree on the segments meeting the open
// ball B_radius(x).
inline bool boundary_matches(const Scenario& S, double radius) {
  auto local = [&](const SimplicialCurrent& C) {
    SimplicialCurrent out(1, C.ambient);
    out.vertices = C.vertices;
    for (int i = 0; i < C.size(); ++i) {
      const auto& s = C.simplices[i];
      if ((C.vertices[s[0]] - S.x).norm() < radius || (C.vertices[s[1]] - S.x).norm() < radius) out.add(s, C.mult[i]);
    }
    return out;
  };
  auto dT = boundary(S.T);
  return same_chain(local(dT), local(S.gamma), 0.0);
}

// ---- first variation ---------------------------------------------------

enum class VariationMode { MeanCurvature, Semicalibrated, Spherical };

struct VariationOptions {
  double eps = 1e-6;
  double tangency_tol = 1e-8;
  // (a): mean curvature vector of T in the ambient space (default: minimal)
  std::function<Point(const Point&)> H;
  // (b): d omega evaluated on (X, v1, v2) at a point (default: closed form)
  std::function<double(const Point&, const Point&, const Point&, const Point&)> domega;
  // (c): sphere centre and radius
  Point center;
  double R = 1.0;
};

struct FirstVariation {
  double geometric = 0;  // central difference of the mass
  double formula = 0;
  double tangency_defect = 0;
};

namespace detail {

// Degree-5 seven-point rule on a triangle: barycentric points and weights.
inline const std::vector<std::pair<std::array<double, 3>, double>>& triangle_rule() {
  static const std::vector<std::pair<std::array<double, 3>, double>> rule = [] {
    std::vector<std::pair<std::array<double, 3>, double>> r;
    r.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.225});
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    for (auto [a, b, w] : {std::tuple{a1, b1, w1}, std::tuple{a2, b2, w2}}) {
      r.push_back({{a, b, b}, w});
      r.push_back({{b, a, b}, w});
      r.push_back({{b, b, a}, w});
    }
    return r;
  }();
  return rule;
}

}  // namespace detail

inline FirstVariation first_variation(const SimplicialCurrent& T, const std::function<Point(const Point&)>& X,
                                      VariationMode mode, const VariationOptions& opt = {}) {
  if (T.dim != 2) throw UsageError("first variation is implemented for 2-currents");
  FirstVariation fv;
  // tangency on boundary vertices
  auto dT = boundary(T);
  std::map<int, Point> tangent;
  for (int i = 0; i < dT.size(); ++i) {
    int a = dT.simplices[i][0], b = dT.simplices[i][1];
    Point d = (T.vertices[b] - T.vertices[a]).normalized() * static_cast<double>(dT.mult[i] > 0 ? 1 : -1);
    for (int v : {a, b}) {
      auto it = tangent.find(v);
      if (it == tangent.end())
        tangent[v] = d;
      else
        it->second += d;
    }
  }
  for (auto& [v, t] : tangent) {
    Point Xv = X(T.vertices[v]);
    double n = t.norm();
    Point perp = n > 0 ? Point(Xv - Xv.dot(t / n) * (t / n)) : Xv;
    fv.tangency_defect = std::max(fv.tangency_defect, perp.norm());
  }
  if (fv.tangency_defect > opt.tangency_tol)
    throw UsageError("vector field is not tangent to the boundary (defect " + std::to_string(fv.tangency_defect) + ")");

  auto moved = [&](double s) {
    SimplicialCurrent P = T;
    for (auto& v : P.vertices) v = v + s * X(v);
    return mass(P);
  };
  fv.geometric = (moved(opt.eps) - moved(-opt.eps)) / (2 * opt.eps);

  Summer s;
  for (int i = 0; i < T.size(); ++i) {
    const auto& q = T.simplices[i];
    const Point &a = T.vertices[q[0]], &b = T.vertices[q[1]], &c = T.vertices[q[2]];
    double area = triangle_area(a, b, c);
    if (area == 0) continue;
    double w = static_cast<double>(T.mult[i]);
    TriFrame f = tri_frame(a, b, c);
    for (const auto& [bc, wt] : detail::triangle_rule()) {
      Point z = bc[0] * a + bc[1] * b + bc[2] * c;
      Point Xz = X(z);
      double val = 0;
      if (mode == VariationMode::MeanCurvature) {
        if (opt.H) val = -std::abs(w) * Xz.dot(opt.H(z));
      } else if (mode == VariationMode::Semicalibrated) {
        if (opt.domega) val = w * opt.domega(z, Xz, f.e1, f.e2);
      } else {
        Point ctr = opt.center.size() ? opt.center : Point(Point::Zero(T.ambient));
        val = std::abs(w) * Xz.dot(T.dim * (z - ctr) / (opt.R * opt.R));
      }
      s.add(wt * area * val);
    }
  }
  fv.formula = s.value();
  return fv;
}

// ---- almost-minimality check -------------------------------------------

enum class CompetitorStrategy { ConeFill, RandomPatch };

struct AlmostMinOptions {
  CompetitorStrategy strategy = CompetitorStrategy::ConeFill;
  int facets = 256;
  std::uint64_t seed = 1;
  double patch_amplitude = 0.01;  // relative to r
};

struct AlmostMinReport {
  std::vector<double> radii, mass_T, mass_H, margin;
  double worst_margin = 0;
  double C0_needed = 0;  // smallest C0 passing every radius at the given alpha0
};

// Checks ||T||(B_r) <= (1 + C0 r^alpha0) M(H) for competitors H with
// dH = d(T restricted to B_r). ||T||(B_r) is the mass of the restricted chain,
// whose spherical cut uses the same facets as H.
inline AlmostMinReport verify_almost_minimality(const SimplicialCurrent& T, const Point& x,
                                                const std::vector<double>& radii, double C0, double alpha0,
                                                const AlmostMinOptions& opt = {}) {
  if (T.dim != 2) throw UsageError("almost-minimality check is implemented for 2-currents");
  AlmostMinReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> N01;
  for (double r : radii) {
    auto TB = restrict_to_ball(T, x, r, opt.facets);
    auto dTB = boundary(TB);
    SimplicialCurrent H(2, T.ambient);
    H.vertices = TB.vertices;
    if (opt.strategy == CompetitorStrategy::ConeFill) {
      int apex = -1;
      for (std::size_t v = 0; v < H.vertices.size(); ++v)
        if ((H.vertices[v] - x).norm() <= 1e-12 * std::max(1.0, r)) apex = static_cast<int>(v);
      if (apex < 0) apex = H.add_vertex(x);
      for (int i = 0; i < dTB.size(); ++i) H.add(apex, dTB.simplices[i][0], dTB.simplices[i][1], dTB.mult[i]);
    } else {
      H = TB;
      std::vector<bool> on_bd(H.vertices.size(), false);
      for (const auto& s : dTB.simplices) on_bd[s[0]] = on_bd[s[1]] = true;
      for (std::size_t v = 0; v < H.vertices.size(); ++v)
        if (!on_bd[v])
          for (int a = 0; a < H.ambient; ++a) H.vertices[v](a) += opt.patch_amplitude * r * N01(rng);
    }
    auto dH = boundary(H);
    dH.vertices = dTB.vertices = H.vertices;
    if (!same_chain(dH, dTB, 0.0)) throw MathError("competitor boundary does not match the restricted current");
    double mT = mass(TB), mH = mass(H);
    double margin = (1 + C0 * std::pow(r, alpha0)) * mH - mT;
    rep.radii.push_back(r);
    rep.mass_T.push_back(mT);
    rep.mass_H.push_back(mH);
    rep.margin.push_back(margin);
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (mH > 0) rep.C0_needed = std::max(rep.C0_needed, (mT / mH - 1) / std::pow(r, alpha0));
  }
  return rep;
}

}  // namespace epicone
