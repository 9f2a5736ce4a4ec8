#pragma once

#include "epicone/clip.hpp"
#include "epicone/cone.hpp"
#include "epicone/flat_norm.hpp"

#include <random>
#include <string>

namespace epicone {

inline double unit_ball_volume(int m) { return std::pow(pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0); }

namespace detail {

inline double span_distance(const SimplicialCurrent& T, int i, const Point& x) {
  const auto& s = T.simplices[i];
  const Point& a = T.vertices[s[0]];
  Point d = x - a;
  if (T.dim == 0) return d.norm();
  Point u = (T.vertices[s[1]] - a).normalized();
  Point r = d - d.dot(u) * u;
  if (T.dim == 2) {
    Point v = T.vertices[s[2]] - a;
    v -= v.dot(u) * u;
    v.normalize();
    r -= r.dot(v) * v;
  }
  return r.norm();
}

inline double simplex_ball_volume(const SimplicialCurrent& T, int i, const Point& x, double t) {
  const auto& s = T.simplices[i];
  if (T.dim == 2) return triangle_ball_area(T.vertices[s[0]], T.vertices[s[1]], T.vertices[s[2]], x, t);
  if (T.dim == 1) return segment_ball_length(T.vertices[s[0]], T.vertices[s[1]], x, t);
  return (T.vertices[s[0]] - x).norm() <= t ? 1.0 : 0.0;
}

inline double simplex_min_distance(const SimplicialCurrent& T, int i, const Point& x) {
  const auto& s = T.simplices[i];
  if (T.dim == 2) return (closest_point_triangle(x, T.vertices[s[0]], T.vertices[s[1]], T.vertices[s[2]]) - x).norm();
  if (T.dim == 1) return (closest_point_segment(x, T.vertices[s[0]], T.vertices[s[1]]) - x).norm();
  return (T.vertices[s[0]] - x).norm();
}

inline double simplex_max_distance(const SimplicialCurrent& T, int i, const Point& x) {
  double d = 0;
  for (int a = 0; a <= T.dim; ++a) d = std::max(d, (T.vertices[T.simplices[i][a]] - x).norm());
  return d;
}

// Radii where t -> |simplex ∩ B_t| is not smooth.
inline std::vector<double> radial_breaks(const SimplicialCurrent& T, int i, const Point& x, double h) {
  std::vector<double> b{h};
  const auto& s = T.simplices[i];
  for (int a = 0; a <= T.dim; ++a) {
    const Point& p = T.vertices[s[a]];
    b.push_back((p - x).norm());
    for (int c = a + 1; c <= T.dim; ++c) {
      const Point& q = T.vertices[s[c]];
      Point d = (q - p).normalized();
      Point w = x - p;
      b.push_back((w - w.dot(d) * d).norm());
      b.push_back((closest_point_segment(x, p, q) - x).norm());
    }
  }
  return b;
}

inline const GaussLegendre& radial_rule() {
  static const GaussLegendre gl(16);
  return gl;
}

// Integral over {a < |z - x| <= b} of g(|z - x|) against |simplex i|, by
// g(b) mu(B_b) - g(a) mu(B_a) - int_a^b g'(t) mu(B_t) dt with the exact
// mu(B_t). The t-integral is split at the breaks of mu and each piece is
// mapped through a smoothstep to absorb the endpoint singularities.
template <class G, class DG>
double radial_integral(const SimplicialCurrent& T, int i, const Point& x, double a, double b, double h, G&& g,
                       DG&& dg) {
  double tmin = simplex_min_distance(T, i, x), tmax = simplex_max_distance(T, i, x);
  if (b < tmin || a >= tmax || b <= a) return 0.0;
  double vol = T.volume(i);
  double lo = std::max(a, tmin), hi = std::min(b, tmax);
  double mu_a = a <= tmin ? 0.0 : simplex_ball_volume(T, i, x, a);
  double out = -(a > 0 ? g(a) * mu_a : 0.0);
  if (b >= tmax)
    out += vol * g(hi);
  else
    out += g(b) * simplex_ball_volume(T, i, x, b);
  std::vector<double> br{lo, hi};
  for (double t : radial_breaks(T, i, x, h))
    if (t > lo && t < hi) br.push_back(t);
  std::sort(br.begin(), br.end());
  const auto& gl = radial_rule();
  Summer s;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    double p = br[k], q = br[k + 1];
    if (q - p <= 1e-15 * hi) continue;
    for (std::size_t n = 0; n < gl.x.size(); ++n) {
      double u = 0.5 * (gl.x[n] + 1.0);
      double t = p + (q - p) * u * u * (3.0 - 2.0 * u);
      double jac = (q - p) * 6.0 * u * (1.0 - u) * 0.5;
      s.add(gl.w[n] * jac * dg(t) * simplex_ball_volume(T, i, x, t));
    }
  }
  return out - s.value();
}

}  // namespace detail

// Integral of |z-x|^{-p} |(z-x)^perp|^q e^{C|z-x|^alpha} over a < |z-x| <= b
// against ||T||, where ^perp is taken against each simplex's own plane.
inline double annulus_perp_integral(const SimplicialCurrent& T, const Point& x, double a, double b, double p, int q,
                                    double C = 0.0, double alpha = 1.0) {
  Summer s;
  for (int i = 0; i < T.size(); ++i) {
    double h = detail::span_distance(T, i, x);
    double hq = std::pow(h, q);
    if (hq <= 0) continue;
    auto g = [&](double t) { return hq * std::exp(C * std::pow(t, alpha)) * std::pow(t, -p); };
    auto dg = [&](double t) {
      return hq * std::exp(C * std::pow(t, alpha)) * std::pow(t, -p) * (C * alpha * std::pow(t, alpha - 1) - p / t);
    };
    s.add(std::abs(static_cast<double>(T.mult[i])) * detail::radial_integral(T, i, x, a, b, h, g, dg));
  }
  return s.value();
}

// ---- trace -------------------------------------------------------------

struct TraceOptions {
  double r0 = 1.0;
  int steps = 8;
  double q = 1.0 / std::sqrt(2.0);
  double C3 = 0.0;
  double alpha3 = 1.0;
  // a radius is resolved when every simplex meeting the ball either has x as
  // a vertex or has diameter <= mesh_factor * r
  double mesh_factor = 1.0;
};

struct MonotonicityTrace {
  Point x;
  int m = 2;
  double C3 = 0, alpha3 = 1, q = 0;
  std::vector<double> radii;           // decreasing
  std::vector<double> masses;          // ||T||(B_r)
  std::vector<double> ratios;          // e^{C3 r^a3} mass / r^m
  std::vector<double> perp_integrals;  // over (radii[j+1], radii[j]]
  std::vector<std::string> warnings;

  double weight(double r) const { return std::exp(C3 * std::pow(r, alpha3)); }
};

inline bool radius_resolved(const SimplicialCurrent& T, const Point& x, double r, double factor) {
  for (int i = 0; i < T.size(); ++i) {
    if (detail::simplex_min_distance(T, i, x) > r) continue;
    bool at_x = false;
    double diam = 0;
    for (int a = 0; a <= T.dim; ++a) {
      const Point& p = T.vertices[T.simplices[i][a]];
      if ((p - x).norm() <= 1e-14 * std::max(1.0, r)) at_x = true;
      for (int c = a + 1; c <= T.dim; ++c) diam = std::max(diam, (p - T.vertices[T.simplices[i][c]]).norm());
    }
    if (!at_x && diam > factor * r) return false;
  }
  return true;
}

inline MonotonicityTrace monotonicity_trace(const SimplicialCurrent& T, const Point& x, const TraceOptions& opt = {}) {
  if (opt.steps < 1 || opt.r0 <= 0 || opt.q <= 0 || opt.q >= 1) throw UsageError("trace needs r0 > 0, steps >= 1, 0 < q < 1");
  if (T.dim < 1) throw UsageError("trace needs a current of dimension at least 1");
  auto dT = boundary(T);
  bool on_boundary = false;
  for (int i = 0; i < dT.size() && !on_boundary; ++i)
    on_boundary = detail::simplex_min_distance(dT, i, x) <= 1e-9 * opt.r0;
  MonotonicityTrace tr;
  tr.x = x;
  tr.m = T.dim;
  tr.C3 = opt.C3;
  tr.alpha3 = opt.alpha3;
  tr.q = opt.q;
  if (!on_boundary) tr.warnings.push_back("x is not on the support of the boundary");
  for (int j = 0; j < opt.steps; ++j) {
    double r = opt.r0 * std::pow(opt.q, j);
    if (!radius_resolved(T, x, r, opt.mesh_factor)) {
      tr.warnings.push_back("trace truncated at r = " + std::to_string(r) + " (below mesh resolution)");
      break;
    }
    tr.radii.push_back(r);
  }
  int n = static_cast<int>(tr.radii.size());
  tr.masses.resize(n);
  tr.ratios.resize(n);
  tr.perp_integrals.assign(std::max(0, n - 1), 0.0);
  parallel_for(n, [&](int j) {
    double r = tr.radii[j];
    tr.masses[j] = mass(T, x, r);
    tr.ratios[j] = tr.weight(r) * tr.masses[j] / std::pow(r, tr.m);
    if (j + 1 < n)
      tr.perp_integrals[j] = 0.5 * annulus_perp_integral(T, x, tr.radii[j + 1], r, tr.m + 2, 2, tr.C3, tr.alpha3);
  });
  return tr;
}

// Two-sided check: ratio(r) - ratio(s) >= perp integral over (s, r] - tol for
// every traced pair s < r.
struct LedgerCheck {
  bool ok = true;
  bool monotone = true;
  double tol = 0;
  double worst_slack = 0;  // min over pairs of diff - perp
  int worst_outer = -1, worst_inner = -1;
  double worst_monotone = 0;  // min over pairs of ratio(r) - ratio(s)
};

inline LedgerCheck ledger_check(const MonotonicityTrace& tr, double rel_tol = 1e-6) {
  LedgerCheck c;
  int n = static_cast<int>(tr.radii.size());
  double scale = 0;
  for (double v : tr.ratios) scale = std::max(scale, std::abs(v));
  c.tol = rel_tol * scale;
  c.worst_slack = std::numeric_limits<double>::infinity();
  c.worst_monotone = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    double perp = 0;
    for (int b = a + 1; b < n; ++b) {
      perp += tr.perp_integrals[b - 1];
      double diff = tr.ratios[a] - tr.ratios[b];
      if (diff - perp < c.worst_slack) {
        c.worst_slack = diff - perp;
        c.worst_outer = a;
        c.worst_inner = b;
      }
      c.worst_monotone = std::min(c.worst_monotone, diff);
    }
  }
  if (n < 2) c.worst_slack = c.worst_monotone = 0;
  c.ok = c.worst_slack >= -c.tol;
  c.monotone = c.worst_monotone >= -c.tol;
  return c;
}

// Smallest C3 in [0, hi] (to rel_tol of hi) for which the ledger passes at
// the given alpha3; negative when even hi fails.
inline double bisect_C3(const SimplicialCurrent& T, const Point& x, TraceOptions opt, double hi = 10.0,
                        int iterations = 30, double rel_tol = 1e-6) {
  auto passes = [&](double c) {
    opt.C3 = c;
    return ledger_check(monotonicity_trace(T, x, opt), rel_tol).ok;
  };
  if (passes(0.0)) return 0.0;
  if (!passes(hi)) return -1.0;
  double lo = 0.0;
  for (int i = 0; i < iterations; ++i) {
    double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct DensityEstimate {
  double theta = 0;
  double error = 0;
  double last = 0;  // last ratio / omega_m
  bool extrapolated = false;
};

// Limit of ratio / omega_m as r -> 0. Aitken extrapolation over the last three
// ratios when their differences contract geometrically.
inline DensityEstimate density(const MonotonicityTrace& tr, double rel_tol = 1e-6) {
  int n = static_cast<int>(tr.ratios.size());
  if (n < 4) throw UsageError("density needs at least 4 traced radii");
  auto lc = ledger_check(tr, rel_tol);
  if (!lc.monotone)
    throw MathError("ratio trace is not monotone beyond tolerance (" + std::to_string(lc.worst_monotone) + ")");
  double w = unit_ball_volume(tr.m);
  const auto& R = tr.ratios;
  double d1 = R[n - 2] - R[n - 3], d2 = R[n - 1] - R[n - 2];
  DensityEstimate e;
  e.last = R[n - 1] / w;
  double lim = R[n - 1];
  if (std::abs(d1) > 1e-15 * std::abs(R[n - 1]) && d2 / d1 > 0 && d2 / d1 < 0.95) {
    lim = R[n - 1] - d2 * d2 / (d2 - d1);
    e.extrapolated = true;
  }
  e.theta = lim / w;
  e.error = std::max(std::abs(lim - R[n - 1]), std::abs(d2)) / w;
  return e;
}

// ---- slice continuity --------------------------------------------------

// Great-circle distance between unit vectors.
inline double spherical_arc(const Point& a, const Point& b) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm()));
}

// Area of the geodesic triangle with unit-vector vertices, in any dimension:
// tan(E/2) = sqrt(Gram(a,b,c)) / (1 + a.b + b.c + c.a).
inline double spherical_triangle_area(const Point& a, const Point& b, const Point& c) {
  Mat M(a.size(), 3);
  M << a, b, c;
  Eigen::HouseholderQR<Mat> qr(M);
  double vol = std::abs(qr.matrixQR().diagonal().prod());
  return 2.0 * std::atan2(vol, 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
}

struct SliceOptions {
  double C3 = 0.0, alpha3 = 1.0;
  int facets = 64;
  int lp_max_faces = 250;  // above this the explicit filling bound is used
};

struct SliceContinuity {
  double r = 0, s = 0;  // radii actually used
  double lhs = 0;
  std::string lhs_method;  // "lp" or "witness"
  double M1 = 0;           // mass of the radial projection of T in the annulus
  double M2 = 0;           // mass of the radial projection of dT in the annulus
  double rhs1 = 0, rhs2 = 0, tail = 0;
  double ratio_r = 0, ratio_s = 0;
  double log_factor = 0, C = 0;
  int lp_faces = 0;
  bool lp_integral = true;
  double filling_on_complex = 0;  // spherical mass of the projected annulus plus projected dT

  // lhs^2 <= rhs1 <= rhs2, with the tolerance relative to the size of the
  // terms (the ratio difference in rhs2 is pure roundoff on exact cones)
  bool chain_holds(double rel_tol = 1e-12) const {
    double scale = C * log_factor * ratio_s * ratio_s + tail + rhs1 + lhs * lhs;
    return lhs * lhs <= rhs1 + rel_tol * scale && rhs1 <= rhs2 + rel_tol * scale;
  }
};

inline SliceContinuity slice_continuity(const SimplicialCurrent& T, const Point& x, double r, double s,
                                        const SliceOptions& opt = {}) {
  if (!(r > 0 && r < s)) throw UsageError("slice continuity needs 0 < r < s");
  if (T.dim != 2) throw UsageError("slice continuity is implemented for 2-currents");
  const int m = T.dim;
  SliceContinuity out;
  BallClipper outer(T, x, s, opt.facets);
  auto cs = outer.clip(T);
  auto As = cs.inside;
  BallClipper inner(As, x, r, opt.facets);
  auto cr = inner.clip(As);
  out.s = outer.radius();
  out.r = inner.radius();
  SimplicialCurrent ann = cr.outside;
  ann.vertices = inner.vertices();
  SimplicialCurrent sig_s = cs.slice, sig_r = cr.slice;
  sig_s.vertices = sig_r.vertices = ann.vertices;
  SimplicialCurrent gam = boundary(ann);
  gam.vertices = ann.vertices;
  for (int i = 0; i < sig_s.size(); ++i) gam.add(sig_s.simplices[i], -sig_s.mult[i]);
  for (int i = 0; i < sig_r.size(); ++i) gam.add(sig_r.simplices[i], sig_r.mult[i]);
  gam = canonicalize(gam);

  out.M1 = annulus_perp_integral(T, x, out.r, out.s, m + 1, 1);
  out.M2 = annulus_perp_integral(boundary(T), x, out.r, out.s, m, 1);
  double witness = out.M1 + out.M2;

  if (ann.size() <= opt.lp_max_faces) {
    // radial projection, with coincident images identified
    ChainComplex K;
    K.k = 1;
    K.ambient = T.ambient;
    std::map<std::vector<long long>, int> seen;
    std::vector<int> img(ann.vertices.size());
    for (std::size_t v = 0; v < ann.vertices.size(); ++v) {
      Point d = ann.vertices[v] - x;
      double n = d.norm();
      if (n > 0) d /= n;
      std::vector<long long> key(d.size());
      for (int a = 0; a < d.size(); ++a) key[a] = std::llround(d(a) * 1e12);
      auto [it, fresh] = seen.emplace(key, static_cast<int>(K.vertices.size()));
      if (fresh) K.vertices.push_back(d);
      img[v] = it->second;
    }
    auto project = [&](const SimplicialCurrent& C) {
      SimplicialCurrent P(C.dim, C.ambient);
      P.vertices = K.vertices;
      for (int i = 0; i < C.size(); ++i) {
        auto q = C.simplices[i];
        bool repeated = false;
        for (int a = 0; a <= C.dim; ++a) q[a] = img[q[a]];
        for (int a = 0; a <= C.dim; ++a)
          for (int b = a + 1; b <= C.dim; ++b) repeated |= q[a] == q[b];
        if (!repeated) P.add(q, C.mult[i]);
      }
      return canonicalize(P);
    };
    ann = project(ann);
    sig_s = project(sig_s);
    sig_r = project(sig_r);
    gam = project(gam);
    K.metric = [&K](const ChainKey& c, int d) {
      if (d == 1) return spherical_arc(K.vertices[c[0]], K.vertices[c[1]]);
      return spherical_triangle_area(K.vertices[c[0]], K.vertices[c[1]], K.vertices[c[2]]);
    };
    for (const auto& t : ann.simplices) K.add_face(t);
    for (const auto* c : {&sig_s, &sig_r, &gam})
      for (const auto& e : c->simplices) K.add_cell(e);
    auto fr = flat_norm_on_complex(K, chain_on_complex(K, sig_s) - chain_on_complex(K, sig_r));
    Summer wc;
    for (int i = 0; i < ann.size(); ++i) {
      const auto& t = ann.simplices[i];
      wc.add(std::abs(static_cast<double>(ann.mult[i])) *
             spherical_triangle_area(K.vertices[t[0]], K.vertices[t[1]], K.vertices[t[2]]));
    }
    for (int i = 0; i < gam.size(); ++i)
      wc.add(std::abs(static_cast<double>(gam.mult[i])) *
             spherical_arc(K.vertices[gam.simplices[i][0]], K.vertices[gam.simplices[i][1]]));
    out.filling_on_complex = wc.value();
    out.lp_integral = fr.integral;
    out.lhs = fr.value;
    out.lhs_method = "lp";
    out.lp_faces = static_cast<int>(K.faces.size());
  } else {
    out.lhs = witness;
    out.lhs_method = "witness";
  }

  auto ratio = [&](double t) {
    return std::exp(opt.C3 * std::pow(t, opt.alpha3)) * mass(T, x, t) / std::pow(t, m);
  };
  out.ratio_r = ratio(out.r);
  out.ratio_s = ratio(out.s);
  out.tail = 2 * out.M2 * out.M2;
  out.rhs1 = 2 * out.M1 * out.M1 + out.tail;
  out.log_factor = std::max(std::log(out.s / out.r), std::log(2.0));
  out.C = 8.0 * std::pow(2.0, m) / std::log(2.0);
  out.rhs2 = out.C * out.log_factor * out.ratio_s * (out.ratio_s - out.ratio_r) + out.tail;
  return out;
}

// ---- measure identity --------------------------------------------------

struct RadialMeasure {
  std::vector<double> radius, weight;  // point masses at |x| = radius
};

struct IdentityCheck {
  double lhs = 0, rhs = 0, residual = 0;
};

// int_a^b f(t) d mu(B_t) through f(b)mu(B_b) - f(a)mu(B_a) - int f' mu(B_t) dt
// against the direct sum over a < |x| <= b.
template <class F, class DF>
IdentityCheck measure_identity_selftest(const RadialMeasure& mu, F&& f, DF&& df, double a, double b) {
  if (mu.radius.size() != mu.weight.size()) throw UsageError("radius and weight lists differ in length");
  if (!(a < b)) throw UsageError("identity needs a < b");
  auto ball = [&](double t) {
    Summer s;
    for (std::size_t i = 0; i < mu.radius.size(); ++i)
      if (mu.radius[i] <= t) s.add(mu.weight[i]);
    return s.value();
  };
  std::vector<double> br{a, b};
  for (double r : mu.radius)
    if (r > a && r < b) br.push_back(r);
  std::sort(br.begin(), br.end());
  static const GaussLegendre gl(24);
  Summer integral;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    double mid = ball(0.5 * (br[k] + br[k + 1]));
    if (mid != 0) integral.add(mid * gl.integrate(df, br[k], br[k + 1]));
  }
  IdentityCheck c;
  c.lhs = f(b) * ball(b) - f(a) * ball(a) - integral.value();
  Summer direct;
  for (std::size_t i = 0; i < mu.radius.size(); ++i)
    if (mu.radius[i] > a && mu.radius[i] <= b) direct.add(mu.weight[i] * f(mu.radius[i]));
  c.rhs = direct.value();
  c.residual = std::abs(c.lhs - c.rhs);
  return c;
}

// ---- decay fits --------------------------------------------------------

struct DecayFit {
  std::vector<double> radii, values;
  double exponent = 0, constant = 0, residual = 0;
  int dropped = 0;
  bool is_void = false;  // every value was zero (or too few positive points)
};

// Values <= zero_tol count as zero and are dropped.
inline DecayFit decay_fit(const std::vector<double>& r, const std::vector<double>& v, double zero_tol = 1e-12) {
  if (r.size() != v.size()) throw UsageError("radii and values differ in length");
  if (r.size() < 5) throw UsageError("decay fit needs at least 5 points");
  DecayFit d;
  d.radii = r;
  d.values = v;
  int positive = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0) throw UsageError("radii must be positive");
    if (v[i] > zero_tol)
      ++positive;
    else
      ++d.dropped;
  }
  std::vector<double> kept(v);
  for (double& w : kept)
    if (w <= zero_tol) w = 0;
  auto fit = loglog_fit(r, kept);
  if (positive < 2 || !fit.valid) {
    d.is_void = true;
    return d;
  }
  d.exponent = fit.exponent;
  d.constant = fit.constant;
  d.residual = fit.residual;
  return d;
}

// ---- support distances and blow-ups ------------------------------------

// Nearest point of spt S.
inline Point project_to_support(const ConeSpec& S, const Point& z) {
  Point best;
  double bd = std::numeric_limits<double>::infinity();
  auto consider = [&](const Point& p) {
    double d = (z - p).norm();
    if (d < bd) {
      bd = d;
      best = p;
    }
  };
  const auto& H = S.half;
  if (S.Q > 0)
    consider(H.plane().project(z));
  else
    consider(z.dot(H.line) * H.line + std::max(0.0, z.dot(H.inward)) * H.inward);
  for (const auto& p : S.planes) consider(p.plane.project(z));
  return best;
}

struct HausdorffDistance {
  double one_sided = 0;  // sup over T of dist to spt S
  double symmetric = 0;  // max of both directions
};

inline double distance_to_support(const SimplicialCurrent& T, const Point& p) {
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < T.size(); ++i) d = std::min(d, detail::simplex_min_distance(T, i, p));
  return d;
}

// Distances inside the closed ball B_R(0); samples of S use k segments per
// half turn at `rings` radii.
inline HausdorffDistance hausdorff_support_distance(const SimplicialCurrent& T, const ConeSpec& S, double R = 1.0,
                                                    int k = 32, int rings = 8) {
  HausdorffDistance h;
  std::vector<Point> pts;
  for (int i = 0; i < T.size(); ++i) {
    Point c = Point::Zero(T.ambient);
    for (int a = 0; a <= T.dim; ++a) c += T.vertices[T.simplices[i][a]];
    c /= T.dim + 1;
    pts.push_back(c);
    for (int a = 0; a <= T.dim; ++a) pts.push_back(T.vertices[T.simplices[i][a]]);
  }
  bool any = false;
  for (const auto& p : pts)
    if (p.norm() <= R) {
      any = true;
      h.one_sided = std::max(h.one_sided, S.support_distance(p));
    }
  if (!any) throw UsageError("current has no support in the region");
  double back = 0;
  for (int j = 1; j <= rings; ++j) {
    auto Z = cross_section(S, k, R * j / rings);
    for (const auto& v : Z.vertices) back = std::max(back, distance_to_support(T, v));
  }
  h.symmetric = std::max(h.one_sided, back);
  return h;
}

struct BlowupOptions {
  int facets = 256;
  int hausdorff_k = 32;
  int hausdorff_rings = 8;
};

struct BlowupReport {
  double theta = 0;
  std::vector<double> radii, excess, flat, hausdorff, hausdorff_symmetric;
  DecayFit excess_fit, flat_fit, hausdorff_fit;
};

// T_{x,r} = (z - x)/r restricted to B_1, compared with S. The flat gauge is
// the straight-line homotopy mass from T_{x,r} to its nearest-point
// projection onto spt S, an upper bound for their flat distance.
inline BlowupReport blowup(const SimplicialCurrent& T, const Point& x, const ConeSpec& S, const std::vector<double>& radii,
                           const BlowupOptions& opt = {}) {
  BlowupReport rep;
  rep.theta = S.density();
  int n = static_cast<int>(radii.size());
  rep.radii = radii;
  rep.excess.resize(n);
  rep.flat.resize(n);
  rep.hausdorff.resize(n);
  rep.hausdorff_symmetric.resize(n);
  double w = unit_ball_volume(T.dim);
  parallel_for(n, [&](int j) {
    double r = radii[j];
    rep.excess[j] = (mass(T, x, r) / std::pow(r, T.dim) - rep.theta * w) / w;
    auto Tr = push_forward(dilation(x, r), compact(restrict_to_ball(T, x, r, opt.facets)));
    rep.flat[j] = homotopy_mass_bound(Tr, [&](const Point& z) { return project_to_support(S, z); });
    auto hd = hausdorff_support_distance(Tr, S, 1.0, opt.hausdorff_k, opt.hausdorff_rings);
    rep.hausdorff[j] = hd.one_sided;
    rep.hausdorff_symmetric[j] = hd.symmetric;
  });
  rep.excess_fit = decay_fit(radii, rep.excess);
  rep.flat_fit = decay_fit(radii, rep.flat);
  rep.hausdorff_fit = decay_fit(radii, rep.hausdorff);
  return rep;
}

}  // namespace epicone
