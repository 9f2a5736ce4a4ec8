#pragma once

#include "epicone/cone.hpp"
#include "epicone/curve.hpp"
#include "epicone/excess.hpp"
#include "epicone/flat_norm.hpp"

namespace epicone {

// Sine expansion y(t) = sum a_k sin(k t / den) on [0, Lambda] (boundary case,
// den = 2 theta0 + 1, Lambda = den pi), or the full expansion
// b_0 + sum a_k sin(k t / den) + b_k cos(k t / den) on [0, 2 pi den] for a
// closed curve winding den times (interior case).
struct FourierProfile {
  int theta0 = 0;
  bool interior = false;
  int den = 1;
  double Lambda = pi;
  double t0 = 0;            // the profile is a function of t - t0
  std::vector<Point> a, b;  // a[k], b[k] for k = 0..K; a[0] unused
  int K = 0;
  int dim = 0;
  double reconstruction_error = 0;
  double parseval_residual = 0;

  double nu(int k) const { return double(k) / den; }
  int linear_mode() const { return den; }

  Point eval(double t) const {
    Point s = Point::Zero(dim);
    double u = t - t0;
    for (int k = 0; k <= K; ++k) {
      if (k > 0) s += a[k] * std::sin(nu(k) * u);
      if (interior) s += b[k] * std::cos(nu(k) * u);
    }
    return s;
  }
};

namespace detail {

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  Summer s;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) s.add(0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]));
  return s.value();
}

}  // namespace detail

inline FourierProfile fourier_analyze(const std::vector<double>& t, const std::vector<Point>& y, int theta0, int K = 32,
                                      bool interior = false, int winding = 1) {
  if (t.size() != y.size() || t.size() < 3) throw UsageError("profile needs matching samples");
  if (K < 1) throw UsageError("truncation order must be positive");
  FourierProfile p;
  p.theta0 = theta0;
  p.interior = interior;
  p.den = interior ? winding : 2 * theta0 + 1;
  if (p.den < 1) throw UsageError("winding must be positive");
  p.Lambda = interior ? 2 * pi * p.den : p.den * pi;
  p.t0 = t.front();
  p.K = K;
  p.dim = static_cast<int>(y[0].size());
  if (std::abs(t.back() - t.front() - p.Lambda) > 1e-9) throw UsageError("profile samples must span the full sector");
  if (!interior && (y.front().norm() > 1e-8 || y.back().norm() > 1e-8))
    throw UsageError("profile must vanish at both ends of the sector");
  if (interior && (y.front() - y.back()).norm() > 1e-8) throw UsageError("closed profile must be periodic");
  p.a.assign(K + 1, Point::Zero(p.dim));
  p.b.assign(K + 1, Point::Zero(p.dim));
  std::vector<double> f(t.size());
  for (int k = 0; k <= K; ++k)
    for (int c = 0; c < p.dim; ++c) {
      for (std::size_t i = 0; i < t.size(); ++i) f[i] = y[i](c) * std::sin(p.nu(k) * (t[i] - p.t0));
      if (k > 0) p.a[k](c) = 2 / p.Lambda * detail::trapezoid(t, f);
      if (interior) {
        for (std::size_t i = 0; i < t.size(); ++i) f[i] = y[i](c) * std::cos(p.nu(k) * (t[i] - p.t0));
        p.b[k](c) = (k == 0 ? 1 : 2) / p.Lambda * detail::trapezoid(t, f);
      }
    }
  std::vector<double> sq(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    p.reconstruction_error = std::max(p.reconstruction_error, (y[i] - p.eval(t[i])).norm());
    sq[i] = y[i].squaredNorm();
  }
  double l2 = detail::trapezoid(t, sq), coef = 0;
  for (int k = 0; k <= K; ++k) {
    coef += p.a[k].squaredNorm() * p.Lambda / 2;
    if (interior) coef += p.b[k].squaredNorm() * p.Lambda * (k == 0 ? 1.0 : 0.5);
  }
  p.parseval_residual = l2 - coef;
  return p;
}

// Polar gradient (d_r g, r^{-1} d_t g) of an extension over the sector.
struct PolarGrad {
  Point dr, dt;
  double squared() const { return dr.squaredNorm() + dt.squaredNorm(); }
};

// f(r,t) = r y(t) (homogeneous = false) or h(r,t) = sum r^{nu_k} (modes)
// (homogeneous = true), mode by mode from the profile.
class Extension {
 public:
  Extension(const FourierProfile& p, bool homogeneous) : p_(p), hom_(homogeneous) {}

  Point value(double r, double t) const {
    Point s = Point::Zero(p_.dim);
    double u = t - p_.t0;
    for (int k = 0; k <= p_.K; ++k) {
      double w = weight(k, r);
      if (k > 0) s += w * p_.a[k] * std::sin(p_.nu(k) * u);
      if (p_.interior) s += w * p_.b[k] * std::cos(p_.nu(k) * u);
    }
    return s;
  }

  PolarGrad grad(double r, double t) const {
    PolarGrad g{Point::Zero(p_.dim), Point::Zero(p_.dim)};
    double u = t - p_.t0;
    for (int k = 0; k <= p_.K; ++k) {
      double nu = p_.nu(k), e = exponent(k);
      // d_r r^e = e r^{e-1}; r^{-1} d_t (r^e sin) = r^{e-1} nu cos
      double re1 = e == 1 ? 1.0 : (r > 0 ? std::pow(r, e - 1) : (e > 1 ? 0.0 : std::numeric_limits<double>::infinity()));
      double sn = std::sin(nu * u), cs = std::cos(nu * u);
      if (k > 0) {
        if (e != 0) g.dr += e * re1 * sn * p_.a[k];
        g.dt += re1 * nu * cs * p_.a[k];
      }
      if (p_.interior) {
        if (e != 0) g.dr += e * re1 * cs * p_.b[k];
        if (k > 0) g.dt -= re1 * nu * sn * p_.b[k];
      }
    }
    return g;
  }

  const FourierProfile& profile() const { return p_; }

 private:
  double exponent(int k) const { return hom_ ? p_.nu(k) : 1.0; }
  double weight(int k, double r) const {
    double e = exponent(k);
    return e == 0 ? 1.0 : std::pow(r, e);
  }
  FourierProfile p_;
  bool hom_;
};

inline Extension extend_cone(const FourierProfile& p) { return Extension(p, false); }
inline Extension extend_homogeneous(const FourierProfile& p) { return Extension(p, true); }

// Integral of |Dg|^2 over the sector ]0,1[ x ]0,Lambda[ with area element
// r dr dt. The radius is substituted r = s^den so that every homogeneous mode
// becomes a polynomial in s.
inline double dirichlet_energy(const std::function<PolarGrad(double, double)>& grad, double Lambda, int den,
                               double t0 = 0, int nr = 128, int nt = 256) {
  GaussLegendre gr(nr), gt(nt);
  Summer s;
  for (int i = 0; i < nr; ++i) {
    double sv = 0.5 * (gr.x[i] + 1), ws = 0.5 * gr.w[i];
    double r = std::pow(sv, den), drds = den * std::pow(sv, den - 1);
    for (int j = 0; j < nt; ++j) {
      double t = t0 + 0.5 * Lambda * (gt.x[j] + 1), wt = 0.5 * Lambda * gt.w[j];
      double v = grad(r, t).squared() * r * drds;
      if (!std::isfinite(v)) throw MathError("non-finite Dirichlet energy integrand");
      s.add(ws * wt * v);
    }
  }
  return s.value();
}

inline double dirichlet_energy(const Extension& e, int nr = 128, int nt = 256) {
  const auto& p = e.profile();
  return dirichlet_energy([&](double r, double t) { return e.grad(r, t); }, p.Lambda, p.den, p.t0, nr, nt);
}

// Closed forms for one sine mode of amplitude |a| (boundary or interior).
inline double mode_energy_cone(double a2, double nu, double Lambda) { return a2 * Lambda * (1 + nu * nu) / 4; }
inline double mode_energy_homogeneous(double a2, double nu, double Lambda) { return nu * a2 * Lambda / 2; }

struct GapConstant {
  double c0 = 0;
  int mode = 0;                    // attaining k
  std::vector<double> by_order;    // c0 at truncation K' = first..K
  int first_order = 0;
};

// c0 = min over admissible modes k <= K, k != den, of (1 - nu)^2 / (1 + nu^2).
inline GapConstant gap_constant(int theta0, int K, bool interior = false, int winding = 1) {
  int den = interior ? winding : 2 * theta0 + 1;
  int kmin = interior ? 0 : 1;
  GapConstant g;
  g.c0 = std::numeric_limits<double>::infinity();
  g.first_order = den + 1;
  bool any = false;
  for (int k = kmin; k <= K; ++k) {
    if (k == den) continue;
    any = true;
    double nu = double(k) / den, c = (1 - nu) * (1 - nu) / (1 + nu * nu);
    if (c < g.c0) g.c0 = c, g.mode = k;
    if (k >= g.first_order) g.by_order.push_back(g.c0);
  }
  if (!any || K < den + 1) throw UsageError("gap constant needs a mode other than the linear one (K > 2 theta0 + 1)");
  return g;
}

struct EpiReport {
  double E_f = 0, E_h = 0, gap = 0;
  double c0 = 0;
  int c0_mode = 0;
  Point l0;  // coefficient of the linear mode
  double mass_H = 0, mass_S_B1 = 0, mass_cone_Z = 0, mass_S2 = 0;
  double lhs = 0, rhs = 0, margin = 0;
  double margin_error = 0;  // Richardson estimate of the competitor's mesh error
  double eps = 0, eps1 = 0, rho = 0;
  double sup_y = 0, lip_y = 0;
  double reconstruction_error = 0, parseval_residual = 0;
  bool boundary_exact = false;
  int theta0 = 0;
  bool interior = false;
  std::string kind = "boundary";
  // hypothesis gauges (filled by epiperimetric_check)
  double flat_gauge = 0, mass_gauge = 0, hausdorff_gauge = 0;
  bool hypotheses_ok = true;
  std::vector<EpiReport> components;
};

struct CompetitorOptions {
  double eps = -1;    // smallness; default max(sup|y|, Lip(y) / lip_factor)
  double C = 1;       // rho = 1 - C eps
  double lip_factor = 10;
  double min_eps = 1e-3;  // floor for the default eps, keeps the ring nondegenerate
  double eps1 = -1;   // default c0 / 2
  int K = 32;
  int radial = 32;
  int levels = 2;     // Richardson levels (1 disables the estimate)
  int quad_r = 128, quad_t = 256;
};

struct Competitor {
  SimplicialCurrent H;
  EpiReport report;
};

namespace detail {

// Point over the sector at cylinder radius r, angle t, height y.
inline Point sector_point(double r, double t, const Point& y, int ambient, double Lambda, bool interior) {
  Point p = Point::Zero(ambient);
  if (!interior && t == Lambda) {
    p(0) = -r;  // exactly on the boundary line
  } else if (!interior && t == 0) {
    p(0) = r;
  } else {
    p(0) = r * std::cos(t);
    p(1) = r * std::sin(t);
  }
  p.tail(ambient - 2) = r * y;
  return p;
}

inline Point lerp_y(const LiftedCurve& z, double t) {
  auto it = std::upper_bound(z.theta.begin(), z.theta.end(), t);
  int i = std::clamp(static_cast<int>(it - z.theta.begin()) - 1, 0, z.cells() - 1);
  double u = (t - z.theta[i]) / (z.theta[i + 1] - z.theta[i]);
  return (1 - u) * z.y[i] + u * z.y[i + 1];
}

}  // namespace detail

// Competitor H = rho (S1 + S2) + (cone over Z) between C_rho and B_1. z3 is the
// graph (theta_i, y_i) over the sector; z1 (optional, same sample count) is
// the curve before the Lipschitz approximation. Both live on the unit
// cylinder over span(e1, e2).
inline Competitor build_competitor(const LiftedCurve& z3, int theta0, const CompetitorOptions& opt = {},
                                   const LiftedCurve* z1 = nullptr, bool interior = false) {
  int k = z3.cells();
  int m = z3.codim();
  int ambient = m + 2;
  int den = interior ? z3.Q : 2 * theta0 + 1;
  if (den < 1) throw UsageError("competitor needs positive winding");
  double Lambda = interior ? 2 * pi * den : den * pi;
  double T0 = z3.theta.front();
  if (!interior && T0 != 0) throw UsageError("boundary profile must start at angle 0");
  if (std::abs(z3.theta.back() - T0 - Lambda) > 1e-9) throw UsageError("profile does not span the sector");
  for (int i = 0; i < k; ++i)
    if (!(z3.theta[i + 1] > z3.theta[i])) throw UsageError("profile must be a graph over the angle");
  if (z1 && z1->cells() != k) throw UsageError("curves before and after approximation must share samples");
  const LiftedCurve& zz = z1 ? *z1 : z3;
  auto same_node = [&](int i) { return !z1 || (z1->theta[i] == z3.theta[i] && z1->y[i] == z3.y[i]); };

  EpiReport rep;
  rep.theta0 = theta0;
  rep.interior = interior;
  rep.kind = interior ? "interior" : "boundary";
  for (int i = 0; i <= k; ++i) rep.sup_y = std::max(rep.sup_y, z3.y[i].norm());
  for (int i = 0; i < k; ++i)
    rep.lip_y = std::max(rep.lip_y, (z3.y[i + 1] - z3.y[i]).norm() / (z3.theta[i + 1] - z3.theta[i]));
  rep.eps = opt.eps >= 0 ? opt.eps : std::max({rep.sup_y, rep.lip_y / opt.lip_factor, opt.min_eps});
  if (rep.sup_y > rep.eps + 1e-15) throw MathError("sup |y3| exceeds eps");
  if (rep.lip_y > opt.lip_factor * rep.eps + 1e-15) throw MathError("Lip(y3) exceeds C eps");
  rep.rho = 1 - opt.C * rep.eps;
  if (!(rep.rho > 0)) throw MathError("shrink factor rho is not positive");
  for (int i = 0; i <= k; ++i)
    if (rep.rho * std::sqrt(1 + zz.y[i].squaredNorm()) >= 1) throw MathError("rho Z leaves the unit ball");

  // Fourier analysis and energies
  auto prof = fourier_analyze(z3.theta, z3.y, theta0, opt.K, interior, den);
  rep.reconstruction_error = prof.reconstruction_error;
  rep.parseval_residual = prof.parseval_residual;
  Extension f = extend_cone(prof), h = extend_homogeneous(prof);
  rep.E_f = dirichlet_energy(f, opt.quad_r, opt.quad_t);
  rep.E_h = dirichlet_energy(h, opt.quad_r, opt.quad_t);
  rep.gap = rep.E_f - rep.E_h;
  auto gc = gap_constant(theta0, std::max(opt.K, den + 1), interior, den);
  rep.c0 = gc.c0;
  rep.c0_mode = gc.mode;
  rep.l0 = prof.a[std::min(den, opt.K)];
  rep.eps1 = opt.eps1 >= 0 ? opt.eps1 : rep.c0 / 2;

  // inner profile: truncated homogeneous extension plus the conical residual
  auto g = [&](double r, double t) -> Point {
    if (r == 0) return h.value(0, t);
    return h.value(r, t) + r * (detail::lerp_y(z3, t) - prof.eval(t));
  };

  std::vector<double> masses;
  SimplicialCurrent H(2, ambient);
  Competitor out;
  int levels = std::max(1, opt.levels);
  for (int lev = 0; lev < levels; ++lev) {
    int sub = 1 << lev;  // angular subdivision of each profile cell
    int nr = opt.radial * sub;
    SimplicialCurrent T(2, ambient);
    double rho = rep.rho;
    // sphere curve Z and the ring's inner vertices rho X_i
    std::vector<int> zid(k + 1), xid(k + 1);
    for (int i = 0; i <= k; ++i) {
      if (interior && i == k) {
        zid[i] = zid[0], xid[i] = xid[0];
        continue;
      }
      double th = interior ? zz.theta[i] : (i == 0 ? 0.0 : i == k ? Lambda : zz.theta[i]);
      Point X = detail::sector_point(1.0, th, zz.y[i], ambient, Lambda, interior);
      Point Z = X / X.norm();
      if (!interior && i == 0) Z = unit(ambient, 0);
      if (!interior && i == k) Z = -unit(ambient, 0);
      zid[i] = T.add_vertex(Z);
      xid[i] = T.add_vertex(rho * X);
    }
    // S1 vertices: radial index j = 0 (apex) .. nr (r = 1), angular index
    // q = 0 .. k * sub
    int na = k * sub;
    double q = std::min(den, 3);
    std::vector<double> radii(nr + 1);
    for (int j = 0; j <= nr; ++j) radii[j] = std::pow(double(j) / nr, q);
    Point apex_point = Point::Zero(ambient);
    apex_point.tail(m) = rho * g(0, T0);
    int apex = T.add_vertex(apex_point);
    std::vector<std::vector<int>> V(nr + 1, std::vector<int>(na + 1, apex));
    std::vector<int> s1outer(na + 1);
    for (int qi = 0; qi <= na; ++qi) {
      int i = qi / sub, l = qi % sub;
      if (interior && qi == na) {
        for (int j = 1; j <= nr; ++j) V[j][qi] = V[j][0];
        s1outer[qi] = s1outer[0];
        continue;
      }
      double t = l == 0 ? z3.theta[i] : z3.theta[i] + (z3.theta[i + 1] - z3.theta[i]) * l / sub;
      for (int j = 1; j < nr; ++j)
        V[j][qi] = T.add_vertex(rho * detail::sector_point(radii[j], t, g(radii[j], t) / radii[j], ambient, Lambda, interior));
      // outer ring of S1: the rho Z3 polygon, subdivided on its chords
      if (l == 0) {
        Point X3 = detail::sector_point(1.0, z3.theta[i], z3.y[i], ambient, Lambda, interior);
        V[nr][qi] = same_node(i) ? xid[i] : T.add_vertex(rho * X3);
      } else {
        Point A = detail::sector_point(1.0, z3.theta[i], z3.y[i], ambient, Lambda, interior);
        Point B = detail::sector_point(1.0, z3.theta[i + 1], z3.y[i + 1], ambient, Lambda, interior);
        double u = double(l) / sub;
        V[nr][qi] = T.add_vertex(rho * ((1 - u) * A + u * B));
      }
      s1outer[qi] = V[nr][qi];
    }
    for (int qi = 0; qi < na; ++qi) {
      T.add(apex, V[1][qi], V[1][qi + 1], 1);
      for (int j = 1; j < nr; ++j) {
        T.add(V[j][qi], V[j + 1][qi], V[j + 1][qi + 1], 1);
        T.add(V[j][qi], V[j + 1][qi + 1], V[j][qi + 1], 1);
      }
    }
    // ring between rho Z1 and Z; on unchanged cells it shares S1's chord points
    auto differs = [&](int i) { return !same_node(i) || !same_node(i + 1); };
    for (int i = 0; i < k; ++i) {
      std::vector<int> inner{xid[i]};
      if (!differs(i))
        for (int l = 1; l < sub; ++l) inner.push_back(s1outer[i * sub + l]);
      inner.push_back(xid[i + 1]);
      for (std::size_t l = 0; l + 1 < inner.size(); ++l) T.add(inner[l], zid[i], inner[l + 1], 1);
      T.add(inner.back(), zid[i], zid[i + 1], 1);
    }
    // S2: a strip between rho Z1 and rho Z3, each changed cell filled by the
    // cone from its Z1 node
    double mS2 = 0;
    for (int i = 0; i < k; ++i) {
      if (!differs(i)) continue;
      std::vector<int> loop{xid[i + 1]};
      for (int qi = (i + 1) * sub; qi >= i * sub; --qi) loop.push_back(s1outer[qi]);
      for (std::size_t l = 0; l + 1 < loop.size(); ++l) {
        int p0 = loop[l], p1 = loop[l + 1];
        if (p0 == p1 || p0 == xid[i] || p1 == xid[i]) continue;
        T.add(xid[i], p0, p1, 1);
        mS2 += triangle_area(T.vertices[xid[i]], T.vertices[p0], T.vertices[p1]);
      }
    }
    masses.push_back(mass(T));
    rep.mass_S2 = mS2;
    if (lev == levels - 1) {
      // boundary check against the cone over Z restricted to B1
      SimplicialCurrent expect(1, ambient);
      expect.vertices = T.vertices;
      for (int i = 0; i < k; ++i) expect.add(zid[i], zid[i + 1], 1);
      if (!interior) {
        // 0 -> e1 along radial nodes of the t = 0 ray, and -e1 -> 0
        std::vector<int> ray0{apex}, rayL{apex};
        for (int j = 1; j <= nr; ++j) ray0.push_back(V[j][0]), rayL.push_back(V[j][na]);
        ray0.push_back(zid[0]);
        rayL.push_back(zid[k]);
        for (std::size_t j = 0; j + 1 < ray0.size(); ++j) expect.add(ray0[j], ray0[j + 1], 1);
        for (std::size_t j = 0; j + 1 < rayL.size(); ++j) expect.add(rayL[j + 1], rayL[j], 1);
      }
      auto dH = chain_map(boundary(T)), dE = chain_map(expect);
      rep.boundary_exact = dH == dE;
      if (!rep.boundary_exact) throw MathError("competitor boundary does not match the cone over Z");
      out.H = T;
      // cone over Z and its flat reference on the same angular nodes
      SimplicialCurrent Zc(1, ambient), Sc(1, ambient);
      for (int i = 0; i <= k; ++i) {
        Zc.add_vertex(T.vertices[zid[i]]);
        Point P = detail::sector_point(1.0, zz.theta[i], Point::Zero(m), ambient, Lambda, interior);
        if (!interior && i == 0) P = unit(ambient, 0);
        if (!interior && i == k) P = -unit(ambient, 0);
        Sc.add_vertex(P);
      }
      for (int i = 0; i < k; ++i) Zc.add(i, i + 1, 1), Sc.add(i, i + 1, 1);
      rep.mass_cone_Z = mass(cone_over(Zc, Point::Zero(ambient)));
      rep.mass_S_B1 = mass(cone_over(Sc, Point::Zero(ambient)));
    }
  }
  rep.mass_H = masses.back();
  if (masses.size() >= 2) rep.margin_error = std::abs(masses.back() - masses[masses.size() - 2]) / 3;
  rep.lhs = rep.mass_H - rep.mass_S_B1;
  rep.rhs = (1 - rep.eps1) * (rep.mass_cone_Z - rep.mass_S_B1);
  rep.margin = rep.rhs - rep.lhs;
  out.report = rep;
  return out;
}

struct EpiCheckOptions {
  double delta = 0.5;
  ApproxOptions approx{0.1, 6.0, 2};
  CompetitorOptions competitor;
  int excess_starts = 16;
};

namespace detail {

// Orthogonal M with M u = e1, M v = e2 and det M = 1.
inline Mat frame_to(const Point& u, const Point& v) {
  int n = static_cast<int>(u.size());
  Mat B(n, n + 2);
  B.col(0) = u;
  B.col(1) = v;
  B.rightCols(n) = Mat::Identity(n, n);
  Mat Q(n, n);
  int c = 0;
  for (int j = 0; j < n + 2 && c < n; ++j) {
    Point w = B.col(j);
    for (int i = 0; i < c; ++i) w -= Q.col(i).dot(w) * Q.col(i);
    for (int i = 0; i < c; ++i) w -= Q.col(i).dot(w) * Q.col(i);
    double nw = w.norm();
    if (nw < 1e-8) continue;
    Q.col(c++) = w / nw;
  }
  Mat M = Q.transpose();
  if (M.determinant() < 0) M.row(n - 1) *= -1;
  return M;
}

struct Component {
  std::vector<int> verts;  // ordered; closed loops do not repeat the first
  bool closed = false;
};

// Split a 1-current into simple paths and loops (multiplicities +-1).
inline std::vector<Component> curve_components(const SimplicialCurrent& Z) {
  int nv = static_cast<int>(Z.vertices.size());
  std::vector<int> next(nv, -1), prev(nv, -1);
  for (int i = 0; i < Z.size(); ++i) {
    auto m = Z.mult[i];
    if (m == 0) continue;
    if (std::abs(m) != 1) throw UsageError("curve components must have multiplicity one");
    int a = Z.simplices[i][0], b = Z.simplices[i][1];
    if (m < 0) std::swap(a, b);
    if (next[a] != -1 || prev[b] != -1) throw UsageError("curve has a branch point");
    next[a] = b;
    prev[b] = a;
  }
  std::vector<Component> out;
  std::vector<char> seen(nv, 0);
  for (int v = 0; v < nv; ++v)
    if (prev[v] == -1 && next[v] != -1) {
      Component c;
      for (int x = v; x != -1; x = next[x]) c.verts.push_back(x), seen[x] = 1;
      out.push_back(c);
    }
  for (int v = 0; v < nv; ++v)
    if (!seen[v] && next[v] != -1) {
      Component c;
      c.closed = true;
      int x = v;
      do {
        c.verts.push_back(x);
        seen[x] = 1;
        x = next[x];
      } while (x != v);
      out.push_back(c);
    }
  return out;
}

inline double circle_distance(const Plane2& P, const Point& z) {
  Point p = P.project(z);
  double r = p.norm();
  return std::sqrt((z - p).squaredNorm() + (r - 1) * (r - 1));
}

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  Point d = b - a;
  double L = d.squaredNorm();
  double u = L > 0 ? std::clamp((p - a).dot(d) / L, 0.0, 1.0) : 0.0;
  return (p - a - u * d).norm();
}

inline EpiReport null_component(const std::vector<Point>& pts) {
  EpiReport r;
  r.kind = "null";
  int n = static_cast<int>(pts[0].size());
  Point c = Point::Zero(n);
  for (const auto& p : pts) c += p;
  c /= double(pts.size());
  Summer mh, mz;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point &a = pts[i], &b = pts[(i + 1) % pts.size()];
    mh.add(triangle_area(c, a, b));
    mz.add(triangle_area(Point::Zero(n), a, b));
  }
  r.mass_H = mh.value();
  r.mass_cone_Z = mz.value();
  r.mass_S_B1 = 0;
  r.boundary_exact = true;
  r.eps1 = 1;
  return r;
}

}  // namespace detail

// Decompose Z into components near the pieces of S, run the boundary, interior
// or null construction on each and aggregate the masses.
inline EpiReport epiperimetric_check(const ConeSpec& S, const SimplicialCurrent& Zin, double eps1,
                                     const EpiCheckOptions& opt = {}) {
  validate(S);
  int n = S.ambient;
  if (Zin.dim != 1 || Zin.ambient != n) throw UsageError("curve must be a 1-current in the cone's ambient space");
  SimplicialCurrent Z = compact(weld(compact(Zin), 1e-12));
  for (const auto& v : Z.vertices)
    if (std::abs(v.norm() - 1) > 1e-9) throw UsageError("curve must lie on the unit sphere");

  // frame with the half-plane's line on e1 and its inward direction on e2
  Mat M0 = detail::frame_to(S.half.line, S.half.inward);
  for (auto& v : Z.vertices) v = M0 * v;
  std::vector<Plane2> planes;  // piece 0: plane of the half-plane
  std::vector<int> mult;
  planes.emplace_back(unit(n, 0), unit(n, 1), 1);
  mult.push_back(S.Q);
  for (const auto& p : S.planes) {
    Point u = M0 * p.plane.first(), v = M0 * p.plane.second();
    v -= u.dot(v) * u;
    planes.emplace_back(u.normalized(), v.normalized(), 1);
    mult.push_back(p.theta);
  }
  HalfPlane half{unit(n, 0), unit(n, 1)};

  EpiReport agg;
  agg.kind = "aggregate";
  ConeSpec Sr = S;
  Sr.half = half;
  Sr.planes.clear();
  for (std::size_t i = 1; i < planes.size(); ++i) Sr.planes.push_back({planes[i], mult[i]});
  SimplicialCurrent R = cross_section(Sr, 64);
  double massR = pi * (1 + 2 * S.Q);
  for (std::size_t i = 1; i < planes.size(); ++i) massR += 2 * pi * mult[i];
  agg.mass_gauge = mass(Z) - massR;

  auto comps = detail::curve_components(Z);
  int nboundary = 0;
  std::vector<Point> image(Z.vertices.size());
  double chord_area = 0;
  for (const auto& comp : comps) {
    std::vector<Point> pts;
    for (int v : comp.verts) pts.push_back(Z.vertices[v]);
    // nearest piece by Hausdorff distance of the vertices
    int best = -1;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < planes.size(); ++q) {
      if (comp.closed ? q == 0 && S.Q == 0 : q > 0) continue;
      double d = 0;
      for (const auto& p : pts) {
        double e = q == 0 && !comp.closed && S.Q == 0 ? std::max(detail::circle_distance(planes[0], p), half.distance(p))
                                                       : detail::circle_distance(planes[q], p);
        d = std::max(d, e);
      }
      if (d < bestd) bestd = d, best = static_cast<int>(q);
    }
    if (best < 0 || bestd > eps1) throw MathError("hypothesis (a3) fails");
    agg.hausdorff_gauge = std::max(agg.hausdorff_gauge, bestd);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      Point p = planes[best].project(pts[j]);
      image[comp.verts[j]] = p / p.norm();
    }
    for (std::size_t j = 0; j + (comp.closed ? 0 : 1) < pts.size(); ++j) {
      const Point &a = image[comp.verts[j]], &b = image[comp.verts[(j + 1) % pts.size()]];
      double phi = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
      chord_area += (phi - std::sin(phi)) / 2;
    }

    EpiReport rep;
    if (!comp.closed) {
      if (++nboundary > 1) throw UsageError("curve has more than one open component");
      if ((pts.front() - unit(n, 0)).norm() > 1e-9 || (pts.back() + unit(n, 0)).norm() > 1e-9)
        throw UsageError("open component must run from e1 to -e1");
      SimplicialCurrent Z0(1, n);
      for (const auto& p : pts) Z0.add_vertex(p);
      Z0.vertices.front() = unit(n, 0);
      Z0.vertices.back() = -unit(n, 0);
      for (std::size_t j = 0; j + 1 < pts.size(); ++j) Z0.add(int(j), int(j + 1), 1);
      auto be = boundary_excess(Z0, opt.excess_starts);
      Mat M = detail::frame_to(be.plane.first(), be.plane.second());
      int k = static_cast<int>(pts.size()) - 1;
      std::vector<double> th(k + 1);
      std::vector<Point> y(k + 1);
      double acc = 0, prev = 0;
      for (int j = 0; j <= k; ++j) {
        Point x = M * Z0.vertices[j];
        double r = std::hypot(x(0), x(1));
        if (r < 1e-12) throw MathError("curve meets the normal space of the plane");
        double a = std::atan2(x(1), x(0));
        if (j > 0) acc += std::remainder(a - prev, 2 * pi);
        prev = a;
        th[j] = acc;
        y[j] = x.tail(n - 2) / r;
      }
      int theta0 = static_cast<int>(std::lround((th[k] / pi - 1) / 2));
      double Lambda = (2 * theta0 + 1) * pi;
      if (theta0 < 0 || std::abs(th[k] - Lambda) > 1e-6) throw MathError("open component does not wind an odd number of half turns");
      th[0] = 0, y[0].setZero();
      th[k] = Lambda, y[k].setZero();
      LiftedCurve c;
      c.symmetric = true;
      c.Q = 2 * theta0 + 1;
      for (int i = 0; i <= 2 * k; ++i) {
        int j = i < k ? k - i : i - k;
        double s = i < k ? -1.0 : 1.0;
        c.theta.push_back(s * th[j]);
        c.y.push_back(s * y[j]);
        c.t.push_back(s * th[j]);
      }
      c.theta[k] = 0, c.t[k] = 0;
      c.L = 2 * Lambda;
      auto [gr, arep] = lipschitz_approximate(c, opt.delta, opt.approx);
      LiftedCurve z1, z3;
      for (int i = k; i <= 2 * k; ++i) {
        z1.t.push_back(c.theta[i]), z1.theta.push_back(c.theta[i]), z1.y.push_back(c.y[i]);
        z3.t.push_back(gr.theta[i]), z3.theta.push_back(gr.theta[i]), z3.y.push_back(gr.y[i]);
      }
      z1.Q = z3.Q = 1;
      z1.L = z3.L = Lambda;
      rep = build_competitor(z3, theta0, opt.competitor, &z1).report;
    } else {
      Mat M = detail::frame_to(planes[best].first(), planes[best].second());
      std::vector<Point> X;
      for (const auto& p : pts) {
        Point x = M * p;
        double r = std::hypot(x(0), x(1));
        if (r < 1e-12) throw MathError("curve meets the normal space of the plane");
        X.push_back(x / r);
      }
      LiftedCurve c = lift(X);
      if (c.Q < 0) throw MathError("closed component winds against the plane's orientation");
      if (c.Q == 0) {
        rep = detail::null_component(pts);
      } else {
        int k = c.cells();
        c.theta[k] = c.theta[0] + 2 * pi * c.Q;
        c.y[k] = c.y[0];
        auto [gr, arep] = lipschitz_approximate(c, opt.delta, opt.approx);
        LiftedCurve z1 = c, z3 = gr;
        z1.t = z1.theta;
        z3.t = z3.theta;
        z3.Q = c.Q;
        rep = build_competitor(z3, 0, opt.competitor, &z1, true).report;
      }
    }
    agg.components.push_back(rep);
  }
  if (nboundary != 1) throw UsageError("curve needs exactly one component from e1 to -e1");
  agg.flat_gauge = homotopy_mass_bound(Z, image) + chord_area;
  {
    double d = 0;
    for (const auto& p : R.vertices) {
      double e = std::numeric_limits<double>::infinity();
      for (int i = 0; i < Z.size(); ++i)
        e = std::min(e, detail::point_segment_distance(p, Z.vertices[Z.simplices[i][0]], Z.vertices[Z.simplices[i][1]]));
      d = std::max(d, e);
    }
    agg.hausdorff_gauge = std::max(agg.hausdorff_gauge, d);
  }
  agg.hypotheses_ok = agg.flat_gauge <= eps1 && agg.mass_gauge <= eps1 && agg.hausdorff_gauge <= eps1;

  agg.eps1 = 1;
  agg.boundary_exact = true;
  for (const auto& r : agg.components) {
    agg.mass_H += r.mass_H;
    agg.mass_S_B1 += r.mass_S_B1;
    agg.mass_cone_Z += r.mass_cone_Z;
    agg.mass_S2 += r.mass_S2;
    agg.margin_error += r.margin_error;
    agg.E_f += r.E_f;
    agg.E_h += r.E_h;
    agg.eps1 = std::min(agg.eps1, r.eps1);
    agg.boundary_exact = agg.boundary_exact && r.boundary_exact;
    if (r.kind == "boundary") {
      agg.theta0 = r.theta0, agg.c0 = r.c0, agg.c0_mode = r.c0_mode, agg.l0 = r.l0, agg.rho = r.rho, agg.eps = r.eps;
    }
  }
  agg.gap = agg.E_f - agg.E_h;
  agg.lhs = agg.mass_H - agg.mass_S_B1;
  agg.rhs = (1 - agg.eps1) * (agg.mass_cone_Z - agg.mass_S_B1);
  agg.margin = agg.rhs - agg.lhs;
  return agg;
}

}  // namespace epicone
