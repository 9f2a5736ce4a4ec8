#pragma once

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "epicone/core.hpp"

namespace epicone {

// |v|_h^2 = (1 + |y|^2) v_theta^2 + |v_y|^2 + |y ^ v_y|^2 on R x R^{n-2}.
struct MetricH {
  static double wedge2(const Point& y, const Point& v) {
    return std::max(0.0, y.squaredNorm() * v.squaredNorm() - std::pow(y.dot(v), 2));
  }
  static double norm2(const Point& y, double vt, const Point& vy) {
    return (1 + y.squaredNorm()) * vt * vt + vy.squaredNorm() + wedge2(y, vy);
  }
  static double norm(const Point& y, double vt, const Point& vy) { return std::sqrt(norm2(y, vt, vy)); }

  // Exact length and energy (integral of |d|_h^2 over the unit parameter) of
  // the straight segment (ta, ya) -> (tb, yb).
  static double segment_length(double ta, const Point& ya, double tb, const Point& yb) {
    static const GaussLegendre g(10);
    double dt = tb - ta;
    Point dy = yb - ya;
    double w = wedge2(ya, dy), q = dy.squaredNorm();
    return g.integrate(
        [&](double s) {
          Point y = ya + s * dy;
          return std::sqrt((1 + y.squaredNorm()) * dt * dt + q + w);
        },
        0.0, 1.0);
  }
  static double segment_energy(double ta, const Point& ya, double tb, const Point& yb) {
    double dt = tb - ta;
    Point dy = yb - ya, ym = 0.5 * (ya + yb);
    double q = dy.squaredNorm();
    return (1 + ym.squaredNorm() + q / 12) * dt * dt + q + wedge2(ym, dy);
  }
};

// Lift of a curve on the cylinder boundary: samples (t_i, theta_i, y_i),
// i = 0..k, covering one period, with x(t + L) = x(t) + 2 pi Q e_theta.
// Symmetric curves are stored on [-L/2, L/2] with sample i mirroring k - i.
struct LiftedCurve {
  std::vector<double> t, theta;
  std::vector<Point> y;
  int Q = 0;
  double L = 0;
  bool symmetric = false;

  int cells() const { return static_cast<int>(t.size()) - 1; }
  int codim() const { return y.empty() ? 0 : static_cast<int>(y[0].size()); }
};

inline double segment_length(const LiftedCurve& c, int i) {
  return MetricH::segment_length(c.theta[i], c.y[i], c.theta[i + 1], c.y[i + 1]);
}

inline double euclidean_segment_length(const LiftedCurve& c, int i) {
  double dt = c.theta[i + 1] - c.theta[i];
  return std::sqrt(dt * dt + (c.y[i + 1] - c.y[i]).squaredNorm());
}

inline double h_length(const LiftedCurve& c) {
  Summer s;
  for (int i = 0; i < c.cells(); ++i) s.add(segment_length(c, i));
  return s.value();
}

inline void check_closure(const LiftedCurve& c) {
  int k = c.cells();
  if (k < 1 || c.theta.size() != c.t.size() || c.y.size() != c.t.size()) throw UsageError("malformed curve samples");
  double w = c.theta[k] - c.theta[0];
  if (std::abs(w - 2 * pi * c.Q) > 1e-9) throw UsageError("curve does not close up with its winding number");
  if ((c.y[k] - c.y[0]).norm() > 1e-9) throw UsageError("curve is not periodic in y");
}

// Lift of a closed polygon on the cylinder {x1^2 + x2^2 = 1} in R^n, given as
// vertices without repeating the first. t is the euclidean arc length.
inline LiftedCurve lift(const std::vector<Point>& X) {
  if (X.size() < 3) throw UsageError("closed curve needs at least three vertices");
  int n = static_cast<int>(X[0].size());
  if (n < 3) throw UsageError("ambient dimension must be at least 3");
  LiftedCurve c;
  auto ang = [](const Point& p) {
    double r = std::hypot(p(0), p(1));
    if (r < 1e-12) throw UsageError("curve touches the cylinder axis");
    return std::atan2(p(1), p(0));
  };
  double th = ang(X[0]);
  if (th < 0) th += 2 * pi;
  double t = 0;
  std::size_t k = X.size();
  for (std::size_t i = 0; i <= k; ++i) {
    const Point& p = X[i % k];
    if (i > 0) {
      const Point& prev = X[i - 1];
      double d = ang(p) - ang(prev);
      d = std::remainder(d, 2 * pi);
      if (std::abs(d) > pi - 1e-9) throw UsageError("consecutive samples are pi apart in angle; branch is ambiguous");
      th += d;
      t += (p - prev).norm();
    }
    c.t.push_back(t);
    c.theta.push_back(th);
    c.y.push_back(p.tail(n - 2));
  }
  double w = (c.theta.back() - c.theta.front()) / (2 * pi);
  c.Q = static_cast<int>(std::lround(w));
  c.L = t;
  return c;
}

// Keep the vertices, reset t to cumulative h-length: unit h-speed on every
// interval.
inline LiftedCurve h_reparametrize(const LiftedCurve& c) {
  check_closure(c);
  LiftedCurve r = c;
  std::vector<double> len(c.cells());
  Summer total;
  for (int i = 0; i < c.cells(); ++i) len[i] = segment_length(c, i), total.add(len[i]);
  if (!(total.value() > 0)) throw UsageError("curve has zero length");
  if (c.symmetric) {
    // accumulate outward from the centre so that t(k - i) = -t(i) exactly
    int k = c.cells();
    if (k % 2) throw UsageError("symmetric curve needs an even number of cells");
    int mid = k / 2;
    r.t[mid] = 0;
    double acc = 0;
    for (int i = mid; i < k; ++i) {
      acc += len[i];
      r.t[i + 1] = acc;
      r.t[k - i - 1] = -acc;
    }
  } else {
    double acc = 0;
    r.t[0] = 0;
    for (int i = 0; i < c.cells(); ++i) acc += len[i], r.t[i + 1] = acc;
  }
  r.L = r.t.back() - r.t.front();
  return r;
}

// E = integral of |x'|_h - theta' over one period.
inline double excess_scalar(const LiftedCurve& c) {
  Summer s;
  for (int i = 0; i < c.cells(); ++i) s.add(segment_length(c, i) - (c.theta[i + 1] - c.theta[i]));
  return s.value();
}

struct GeodesicPath {
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<Point> y;
  double energy = 0;
  double length = 0;
  double speed_deviation = 0;  // max relative deviation of segment h-speed from the mean
  int iterations = 0;
  bool used_gradient = false;
};

namespace detail {

// Energy of the path with the given interior unknowns, plus gradient and
// Hessian (block tridiagonal, stored dense).
inline double path_energy(const std::vector<double>& t, const std::vector<double>& th, const std::vector<Point>& y,
                          Eigen::VectorXd* grad, Mat* hess) {
  int k = static_cast<int>(t.size()) - 1, d = 1 + static_cast<int>(y[0].size()), m = d - 1;
  int nu = (k - 1) * d;
  if (grad) grad->setZero(nu);
  if (hess) hess->setZero(nu, nu);
  Summer e;
  for (int i = 0; i < k; ++i) {
    double dtt = t[i + 1] - t[i];
    double dth = th[i + 1] - th[i];
    Point dy = y[i + 1] - y[i], ym = 0.5 * (y[i] + y[i + 1]);
    double s = ym.squaredNorm(), q = dy.squaredNorm(), c = ym.dot(dy);
    double f = (1 + s + q / 12) * dth * dth + q + s * q - c * c;
    e.add(f / dtt);
    if (!grad && !hess) continue;
    // derivatives in (dth, dy, ym)
    Eigen::VectorXd g(1 + 2 * m);
    g(0) = 2 * (1 + s + q / 12) * dth;
    g.segment(1, m) = 2 * (1 + s) * dy - 2 * c * ym + (dth * dth / 6) * dy;
    g.segment(1 + m, m) = 2 * dth * dth * ym + 2 * q * ym - 2 * c * dy;
    Mat H = Mat::Zero(1 + 2 * m, 1 + 2 * m);
    Mat I = Mat::Identity(m, m);
    H(0, 0) = 2 * (1 + s + q / 12);
    H.block(0, 1, 1, m) = (dth / 3) * dy.transpose();
    H.block(0, 1 + m, 1, m) = 4 * dth * ym.transpose();
    H.block(1, 1, m, m) = (2 * (1 + s) + dth * dth / 6) * I - 2 * ym * ym.transpose();
    H.block(1, 1 + m, m, m) = 4 * dy * ym.transpose() - 2 * ym * dy.transpose() - 2 * c * I;
    H.block(1 + m, 1 + m, m, m) = (2 * dth * dth + 2 * q) * I - 2 * dy * dy.transpose();
    Mat Hs = H.selfadjointView<Eigen::Upper>();
    H = Hs;
    // chain rule to the endpoint unknowns (a, b) = ((th_i, y_i), (th_i+1, y_i+1))
    Mat Jm = Mat::Zero(1 + 2 * m, 2 * d);
    Jm(0, 0) = -1, Jm(0, d) = 1;
    Jm.block(1, 1, m, m) = -I, Jm.block(1, d + 1, m, m) = I;
    Jm.block(1 + m, 1, m, m) = 0.5 * I, Jm.block(1 + m, d + 1, m, m) = 0.5 * I;
    Eigen::VectorXd gl = Jm.transpose() * g / dtt;
    Mat Hl = Jm.transpose() * H * Jm / dtt;
    int slot[2] = {i - 1, i};  // unknown index of node i and i+1
    for (int a = 0; a < 2; ++a) {
      if (slot[a] < 0 || slot[a] >= k - 1) continue;
      if (grad) grad->segment(slot[a] * d, d) += gl.segment(a * d, d);
      if (hess)
        for (int b = 0; b < 2; ++b)
          if (slot[b] >= 0 && slot[b] < k - 1)
            hess->block(slot[a] * d, slot[b] * d, d, d) += Hl.block(a * d, b * d, d, d);
    }
  }
  return e.value();
}

}  // namespace detail

// Minimizer of the discrete energy sum |d_i|_h^2 / dt_i over piecewise-linear
// paths through the given node times with fixed ends.
inline GeodesicPath geodesic_bvp(double th1, const Point& y1, double th2, const Point& y2,
                                 const std::vector<double>& times) {
  int k = static_cast<int>(times.size()) - 1;
  if (k < 1) throw UsageError("geodesic needs at least one interval");
  for (int i = 0; i < k; ++i)
    if (!(times[i + 1] > times[i])) throw UsageError("geodesic node times must increase");
  if (th1 == th2 && (y1 - y2).norm() == 0) throw UsageError("geodesic endpoints coincide");
  int d = 1 + static_cast<int>(y1.size());
  GeodesicPath P;
  P.t = times;
  double T = times[k] - times[0];
  for (int i = 0; i <= k; ++i) {
    double s = (times[i] - times[0]) / T;
    P.theta.push_back((1 - s) * th1 + s * th2);
    P.y.push_back((1 - s) * y1 + s * y2);
  }
  P.theta[0] = th1, P.y[0] = y1, P.theta[k] = th2, P.y[k] = y2;
  auto unpack = [&](const Eigen::VectorXd& u, std::vector<double>& th, std::vector<Point>& y) {
    for (int i = 1; i < k; ++i) {
      th[i] = u((i - 1) * d);
      y[i] = u.segment((i - 1) * d + 1, d - 1);
    }
  };
  Eigen::VectorXd u((k - 1) * d);
  for (int i = 1; i < k; ++i) u((i - 1) * d) = P.theta[i], u.segment((i - 1) * d + 1, d - 1) = P.y[i];
  if (k > 1) {
    auto th = P.theta;
    auto yy = P.y;
    Eigen::VectorXd g;
    Mat H;
    double E = detail::path_energy(times, th, yy, &g, &H);
    double scale = std::max(1.0, E);
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
      P.iterations = it;
      if (g.norm() <= 1e-12 * scale) {
        ok = true;
        break;
      }
      Eigen::LDLT<Mat> ldlt(H);
      Eigen::VectorXd step;
      bool newton = ldlt.info() == Eigen::Success && ldlt.isPositive();
      if (newton) {
        step = -ldlt.solve(g);
        if (!(step.dot(g) < 0)) newton = false;
      }
      if (!newton) {
        step = -g;
        P.used_gradient = true;
      }
      if (step.norm() <= 1e-15 * (1 + u.norm())) {
        ok = g.norm() <= 1e-9 * scale;
        break;
      }
      double lam = 1, En = E;
      Eigen::VectorXd un, gn;
      Mat Hn;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, lam *= 0.5) {
        un = u + lam * step;
        unpack(un, th, yy);
        En = detail::path_energy(times, th, yy, &gn, &Hn);
        // near the minimum energy differences drown in roundoff; a full
        // Newton step that halves the gradient is accepted regardless
        if (En <= E + 1e-4 * lam * step.dot(g) || (newton && ls == 0 && gn.norm() < 0.5 * g.norm())) {
          moved = true;
          break;
        }
      }
      if (!moved) {
        ok = g.norm() <= 1e-9 * scale;
        break;
      }
      u = un;
      E = En;
      g = gn;
      H = Hn;
    }
    if (!ok) throw MathError("geodesic solver did not converge");
    unpack(u, P.theta, P.y);
  }
  Summer e, len;
  std::vector<double> sp;
  for (int i = 0; i < k; ++i) {
    double dt = times[i + 1] - times[i];
    e.add(MetricH::segment_energy(P.theta[i], P.y[i], P.theta[i + 1], P.y[i + 1]) / dt);
    double l = MetricH::segment_length(P.theta[i], P.y[i], P.theta[i + 1], P.y[i + 1]);
    len.add(l);
    sp.push_back(l / dt);
  }
  P.energy = e.value();
  P.length = len.value();
  double mean = P.length / T;
  for (double v : sp) P.speed_deviation = std::max(P.speed_deviation, std::abs(v - mean) / mean);
  return P;
}

inline GeodesicPath geodesic_bvp(double th1, const Point& y1, double th2, const Point& y2, double duration,
                                 int interior = 64) {
  if (!(duration > 0)) throw UsageError("geodesic duration must be positive");
  std::vector<double> t;
  for (int i = 0; i <= interior + 1; ++i) t.push_back(duration * i / (interior + 1));
  return geodesic_bvp(th1, y1, th2, y2, t);
}

// Uncentred maximal function of a periodic piecewise-constant f on cells of
// widths w: for each cell, the sup of the mean of f over runs of consecutive
// cells containing it (runs shorter than one period).
inline std::vector<double> maximal_function(const std::vector<double>& f, const std::vector<double>& w) {
  int k = static_cast<int>(f.size());
  if (w.size() != f.size()) throw UsageError("maximal function: sizes differ");
  std::vector<double> mf(k, 0.0), mean(k), suf(k);
  for (int i = 0; i < k; ++i) {
    double s = 0, ww = 0;
    for (int l = 0; l < k; ++l) {
      int j = (i + l) % k;
      s += f[j] * w[j], ww += w[j];
      mean[l] = s / ww;
    }
    // suf[l]: best mean over runs i..i+e with e >= l
    double best = -std::numeric_limits<double>::infinity();
    for (int l = k - 1; l >= 0; --l) suf[l] = best = std::max(best, mean[l]);
    for (int l = 0; l < k; ++l) {
      int j = (i + l) % k;
      mf[j] = std::max(mf[j], suf[l]);
    }
  }
  return mf;
}

struct ApproxReport {
  double E = 0, E_tilde = 0;
  double sup_y = 0, sup_y_tilde = 0;
  double lip = 0;
  double lip_constant = 0;  // lip / (delta + sqrt(E m) / delta)
  double sym_diff_mass = 0;
  double sym_constant = 0;  // sym_diff_mass delta^2 / E
  double bad_set_measure = 0;
  double weak_l1_constant = 0;  // |O| delta^2 / (3 E)
  int components = 0;
  int kept_components = 0;  // components where the geodesic did not improve and the input was kept
  double delta = 0;
  std::string period_convention = "angular period 2 pi Q";
};

struct ApproxOptions {
  double eps0 = 0.05;
  double C = 6.0;  // weak L^1 constant for the precondition C E / L < delta^2
  int min_gap = 2;
};

// Lipschitz approximation: replace the curve on the bad set of the maximal
// function of 1 - theta' by geodesics, then write it as a graph over theta.
inline std::pair<LiftedCurve, ApproxReport> lipschitz_approximate(const LiftedCurve& input, double delta,
                                                                  const ApproxOptions& opt = {}) {
  LiftedCurve c = h_reparametrize(input);
  int k = c.cells();
  if (c.symmetric) {
    int h = k / 2;
    for (int i = 0; i <= k; ++i)
      if (c.theta[k - i] != -c.theta[i] || c.y[k - i] != -c.y[i])
        throw UsageError("curve flagged symmetric is not reflection invariant");
    if (c.theta[h] != 0 || c.y[h].norm() != 0) throw UsageError("symmetric curve must pass through the origin at t = 0");
  }
  ApproxReport rep;
  rep.delta = delta;
  rep.E = excess_scalar(c);
  for (const auto& v : c.y) rep.sup_y = std::max(rep.sup_y, v.norm());
  if (rep.E > opt.eps0) throw MathError("excess E exceeds eps0");
  if (rep.sup_y > opt.eps0) throw MathError("sup |y| exceeds eps0");
  if (!(delta * delta <= 1 - opt.eps0)) throw MathError("delta^2 exceeds 1 - eps0");
  if (!(opt.C * rep.E / c.L < delta * delta)) throw MathError("C E / L is not below delta^2");

  std::vector<double> f(k), w(k);
  for (int i = 0; i < k; ++i) {
    w[i] = c.t[i + 1] - c.t[i];
    f[i] = std::max(0.0, 1.0 - (c.theta[i + 1] - c.theta[i]) / w[i]);
  }
  auto mf = maximal_function(f, w);
  std::vector<char> bad(k);
  for (int i = 0; i < k; ++i) bad[i] = mf[i] > delta * delta;
  if (c.symmetric)
    for (int i = 0; i < k; ++i) bad[i] = bad[i] || bad[k - 1 - i];
  // absorb short good gaps between bad cells
  if (std::count(bad.begin(), bad.end(), 1) > 0) {
    std::vector<char> nb = bad;
    for (int i = 0; i < k; ++i) {
      if (!bad[i]) continue;
      for (int g = 1; g <= opt.min_gap; ++g) {
        int j = (i + g + 1) % k;
        if (bad[j]) {
          for (int h = 1; h <= g; ++h) nb[(i + h) % k] = 1;
          break;
        }
      }
    }
    bad = nb;
  }
  if (std::count(bad.begin(), bad.end(), 1) == k) throw MathError("bad set covers the whole period");
  for (int i = 0; i < k; ++i)
    if (bad[i]) rep.bad_set_measure += w[i];
  rep.weak_l1_constant = rep.E > 0 ? rep.bad_set_measure * delta * delta / (3 * rep.E) : 0;

  // components as runs [a, b) of bad cells, starting after a good cell
  std::vector<std::pair<int, int>> comps;
  int start = 0;
  while (bad[start]) ++start;
  for (int s = 0; s < k;) {
    int i = (start + s) % k;
    if (!bad[i]) {
      ++s;
      continue;
    }
    int len = 0;
    while (s + len < k && bad[(start + s + len) % k]) ++len;
    comps.push_back({i, len});
    s += len;
  }
  rep.components = static_cast<int>(comps.size());

  auto node = [&](int j) {  // node j of the periodic extension
    int p = ((j % k) + k) % k, wrap = (j - p) / k;
    return std::tuple<double, double, Point>(c.t[p] + wrap * c.L, c.theta[p] + wrap * 2 * pi * c.Q, c.y[p]);
  };
  // Each job replaces nodes strictly between ja and jb. Symmetric curves are
  // solved on t >= 0 only; components through the centre or the seam become
  // half problems pinned at the symmetry point.
  std::vector<std::pair<int, int>> jobs;
  int mid = k / 2;
  for (auto [a, len] : comps) {
    int b = a + len;
    if (!c.symmetric) {
      jobs.push_back({a, b});
    } else if (a < mid && b > mid) {
      jobs.push_back({mid, b});
    } else if (a < k && b > k) {
      jobs.push_back({a, k});
    } else if (a >= mid) {
      jobs.push_back({a, b});
    }
  }
  LiftedCurve out = c;
  std::vector<char> changed(k, 0);
  std::vector<std::optional<GeodesicPath>> sol(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), [&](int ci) {
    auto [a, b] = jobs[ci];
    if (b - a < 1) return;
    std::vector<double> times;
    for (int j = a; j <= b; ++j) times.push_back(std::get<0>(node(j)));
    auto [ta, tha, ya] = node(a);
    auto [tb, thb, yb] = node(b);
    GeodesicPath g = geodesic_bvp(tha, ya, thb, yb, times);
    double old_len = 0, bound = std::max(ya.norm(), yb.norm());
    for (int j = a; j < b; ++j) {
      auto [t0, h0, y0] = node(j);
      auto [t1, h1, y1] = node(j + 1);
      old_len += MetricH::segment_length(h0, y0, h1, y1);
    }
    bool sup_ok = true;
    for (const auto& v : g.y) sup_ok = sup_ok && v.norm() <= bound;
    if (g.length < old_len * (1 - 1e-14) && sup_ok) sol[ci] = std::move(g);
  });
  for (std::size_t ci = 0; ci < jobs.size(); ++ci) {
    if (!sol[ci]) {
      ++rep.kept_components;
      continue;
    }
    auto [a, b] = jobs[ci];
    const auto& g = *sol[ci];
    for (int j = a; j < b; ++j) changed[((j % k) + k) % k] = 1;
    for (int l = 1; l < b - a; ++l) {
      int j = a + l, p = ((j % k) + k) % k, wrap = (j - p) / k;
      out.theta[p] = g.theta[l] - wrap * 2 * pi * c.Q;
      out.y[p] = g.y[l];
    }
  }
  if (c.symmetric) {
    for (int i = mid + 1; i <= k; ++i) {
      out.theta[k - i] = -out.theta[i];
      out.y[k - i] = -out.y[i];
    }
    for (int i = 0; i < mid; ++i) changed[i] = changed[k - 1 - i];
  } else {
    out.theta[k] = out.theta[0] + 2 * pi * c.Q;
    out.y[k] = out.y[0];
  }

  // graph form over the angle
  LiftedCurve gr = out;
  for (int i = 0; i < k; ++i)
    if (!(out.theta[i + 1] > out.theta[i])) throw MathError("approximation is not a graph over the angle");
  gr.t = out.theta;
  gr.L = 2 * pi * c.Q;
  rep.E_tilde = excess_scalar(gr);
  for (const auto& v : gr.y) rep.sup_y_tilde = std::max(rep.sup_y_tilde, v.norm());
  for (int i = 0; i < k; ++i) {
    rep.lip = std::max(rep.lip, (gr.y[i + 1] - gr.y[i]).norm() / (gr.theta[i + 1] - gr.theta[i]));
    if (changed[i]) rep.sym_diff_mass += euclidean_segment_length(c, i) + euclidean_segment_length(out, i);
  }
  if (rep.E > 0) {
    rep.lip_constant = rep.lip / (delta + std::sqrt(rep.E * rep.sup_y) / delta);
    rep.sym_constant = rep.sym_diff_mass * delta * delta / rep.E;
  }
  return {gr, rep};
}

// CSV with header t,theta,y1..y{n-2}.
inline void write_curve_csv(std::ostream& os, const LiftedCurve& c) {
  os << "t,theta";
  for (int j = 0; j < c.codim(); ++j) os << ",y" << j + 1;
  os << "\n" << std::setprecision(17);
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    os << c.t[i] << "," << c.theta[i];
    for (int j = 0; j < c.codim(); ++j) os << "," << c.y[i](j);
    os << "\n";
  }
}

// closed = false reads an open profile (a boundary sector) without the
// winding and periodicity checks.
inline LiftedCurve read_curve_csv(std::istream& is, bool symmetric = false, bool closed = true) {
  std::string line;
  if (!std::getline(is, line)) throw UsageError("curve file is empty");
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) head.push_back(cell);
  }
  if (head.size() < 3 || head[0] != "t" || head[1] != "theta") throw UsageError("curve header must be t,theta,y1,...");
  int m = static_cast<int>(head.size()) - 2;
  LiftedCurve c;
  c.symmetric = symmetric;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (...) {
        throw UsageError("bad number in curve file: " + cell);
      }
    }
    if (static_cast<int>(v.size()) != m + 2) throw UsageError("wrong column count in curve file");
    c.t.push_back(v[0]);
    c.theta.push_back(v[1]);
    Point y(m);
    for (int j = 0; j < m; ++j) y(j) = v[2 + j];
    c.y.push_back(y);
  }
  if (c.t.size() < 3) throw UsageError("curve needs at least three samples");
  c.Q = static_cast<int>(std::lround((c.theta.back() - c.theta.front()) / (2 * pi)));
  c.L = c.t.back() - c.t.front();
  if (closed) check_closure(c);
  return c;
}

// Curve with theta(s) = 2 pi Q s / k + a(s), y = b(s) on k cells.
inline LiftedCurve sample_curve(int k, int Q, const std::function<double(double)>& dtheta,
                                const std::function<Point(double)>& y, bool symmetric = false) {
  LiftedCurve c;
  c.Q = Q;
  c.symmetric = symmetric;
  for (int i = 0; i <= k; ++i) {
    double s = symmetric ? -pi * Q + 2 * pi * Q * i / k : 2 * pi * Q * i / k;
    if (symmetric && 2 * i == k) s = 0;
    if (symmetric && i > k / 2) s = -(-pi * Q + 2 * pi * Q * (k - i) / k);
    c.t.push_back(s);
    c.theta.push_back(s + dtheta(s));
    c.y.push_back(y(s));
  }
  if (symmetric)
    for (int i = k / 2 + 1; i <= k; ++i) c.theta[i] = -c.theta[k - i], c.y[i] = -c.y[k - i];
  c.L = c.t.back() - c.t.front();
  return c;
}

}  // namespace epicone
