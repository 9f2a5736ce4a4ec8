#pragma once

#include <sstream>

#include "epicone/core.hpp"

#include <unsupported/Eigen/AutoDiff>

namespace epicone {

// Boundary curve Gamma = {(y, gamma(y))} near 0 for two-dimensional currents:
// y is the first coordinate, gamma takes values in the remaining ambient-1.
struct BoundaryGraph {
  int ambient = 4;
  std::function<Point(double)> gamma;   // values in R^{ambient-1}
  std::function<Point(double)> dgamma;  // derivative
  double eps1 = 0.2;                    // bound on the C^{1,alpha} norm
  double alpha1 = 1.0;
  double r1 = 0.5;
};

inline BoundaryGraph flat_graph(int ambient = 4) {
  BoundaryGraph g;
  g.ambient = ambient;
  g.gamma = [ambient](double) { return Point(Point::Zero(ambient - 1)); };
  g.dgamma = g.gamma;
  return g;
}

// gamma(y) = c |y|^p along direction e_{axis+1} (axis counts from the first
// z-coordinate). p = 2 is the smooth parabola; p in (1, 2) gives C^{1,p-1}.
inline BoundaryGraph power_graph(double c, double p, int ambient = 4, int axis = 0) {
  if (p <= 1) throw UsageError("power graph exponent must exceed 1");
  BoundaryGraph g;
  g.ambient = ambient;
  g.alpha1 = std::min(1.0, p - 1);
  g.gamma = [=](double y) {
    Point z = Point::Zero(ambient - 1);
    z(axis) = c * std::pow(std::abs(y), p);
    return z;
  };
  g.dgamma = [=](double y) {
    Point z = Point::Zero(ambient - 1);
    z(axis) = y == 0 ? 0.0 : c * p * std::pow(std::abs(y), p - 1) * (y > 0 ? 1 : -1);
    return z;
  };
  return g;
}

struct ChartChecks {
  double sphere_max_err = 0;    // max | |phi(x)| - |x| | / |x|
  double gamma_max_err = 0;     // max distance of phi(Gamma samples) from Gamma_0
  double inverse_max_err = 0;   // max |phi(psi(x)) - x| / |x|
  double jacobian_max_err = 0;  // chain-rule Dphi vs central differences, relative
  double seminorm = 0;          // sampled C^{1,alpha} norm of gamma
  int samples = 0;
};

namespace detail {

using AD = Eigen::AutoDiffScalar<Eigen::VectorXd>;

inline double val(double x) { return x; }
inline double val(const AD& x) { return x.value(); }

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

inline double smoothstep5(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10 + u * (-15 + 6 * u));
}

}  // namespace detail

// phi = psi^{-1}, psi = Phi^{-1} o F o Phi with Phi the homogeneous extension
// of a map that flattens the sphere near the e1 axis onto the cylinder
// |y| = cos(2 theta) |x|, and F the vertical shear by eta(|z|/|x|) gamma.
class StraighteningMap {
 public:
  StraighteningMap(BoundaryGraph g, double theta = pi / 16) : g_(std::move(g)), theta_(theta) {
    if (!(theta > 0 && theta < pi / 8)) throw UsageError("cone angle must lie in (0, pi/8)");
    n_ = g_.ambient;
    if (n_ < 3) throw UsageError("ambient dimension must be at least 3");
    c2_ = std::cos(2 * theta);
    lo_ = std::sin(theta / 4);
    hi_ = std::sin(theta / 2);
  }

  int ambient() const { return n_; }
  double theta() const { return theta_; }
  const BoundaryGraph& graph() const { return g_; }
  // Blend band of the sphere-to-cylinder flattening, in |z|/|x|.
  std::pair<double, double> blend_band() const { return {std::sin(theta_), std::sin(3 * theta_)}; }
  std::pair<double, double> cutoff_band() const { return {lo_, hi_}; }

  double eta(double t) const {
    if (t <= lo_) return 1.0;
    if (t >= hi_) return 0.0;
    double u = (t - lo_) / (hi_ - lo_);
    return 1 - u * u * (3 - 2 * u);
  }

  // Radius profile of the flattening: cos(2 theta) below the band,
  // sqrt(1 - s^2) (identity) above it.
  double rho(double s) const {
    auto [a, b] = blend_band();
    double w = detail::smoothstep5((s - a) / (b - a));
    return (1 - w) * c2_ + w * std::sqrt(std::max(0.0, 1 - s * s));
  }

  Point Phi(const Point& x) const {
    double r = x.norm();
    if (r == 0) return x;
    double s = x.tail(n_ - 1).norm() / r;
    Point p = x;
    p(0) = r * rho(s) * (x(0) >= 0 ? 1 : -1);
    return p;
  }

  // Parameter y with |(y, gamma(y))| = R on the side sign(sigma).
  double graph_parameter(double R, double sigma) const {
    double y = sigma * R;
    for (int it = 0; it < 60; ++it) {
      Point z = g_.gamma(y);
      double gval = y * y + z.squaredNorm() - R * R;
      double d = 2 * y + 2 * z.dot(g_.dgamma(y));
      if (d == 0) break;
      double step = gval / d;
      y -= step;
      if (std::abs(step) <= 1e-16 * R) break;
    }
    return y;
  }

  template <class S>
  detail::Vec<S> psi_t(const detail::Vec<S>& x) const {
    using detail::val;
    double r = 0;
    for (int i = 0; i < n_; ++i) r += val(x(i)) * val(x(i));
    r = std::sqrt(r);
    if (r == 0) return x;
    double s = 0;
    for (int i = 1; i < n_; ++i) s += val(x(i)) * val(x(i));
    s = std::sqrt(s) / r;
    if (s >= std::sin(theta_)) return x;  // Phi is not the cylinder map here, and eta vanishes
    double sig = val(x(0)) >= 0 ? 1 : -1;
    S R = sqrt_t(x.squaredNorm());
    // Phi on the cylinder region
    S Y = c2_ * R * sig;
    detail::Vec<S> Z = x.tail(n_ - 1);
    double zn = 0;
    for (int i = 0; i < n_ - 1; ++i) zn += val(Z(i)) * val(Z(i));
    zn = std::sqrt(zn);
    double phin = std::sqrt(val(Y) * val(Y) + zn * zn);
    if (zn >= hi_ * phin) return x;
    S e = S(1.0);
    if (zn > lo_ * phin) {
      S t = sqrt_t(Z.squaredNorm()) / sqrt_t(Y * Y + Z.squaredNorm());
      S u = (t - lo_) / (hi_ - lo_);
      e = 1.0 - u * u * (3.0 - 2.0 * u);
    }
    // F: shear by the graph point on the sphere of radius |Y| / cos(2 theta) = R
    detail::Vec<S> gh = graph_point_t(R, sig);
    detail::Vec<S> Zn = Z + e * gh;
    S Rn = R;
    S zz = Zn.squaredNorm();
    if (val(zz) > std::pow(std::sin(theta_) * val(Rn), 2)) {
      std::ostringstream os;
      os << "sheared point leaves the flattened region at |x| = " << r;
      throw MathError(os.str());
    }
    detail::Vec<S> out(n_);
    out(0) = sig * sqrt_t(Rn * Rn - zz);
    out.tail(n_ - 1) = Zn;
    return out;
  }

  Point psi(const Point& x) const { return psi_t<double>(x); }

  Mat Dpsi(const Point& x) const {
    detail::Vec<detail::AD> xa(n_);
    for (int i = 0; i < n_; ++i) xa(i) = detail::AD(x(i), n_, i);
    auto y = psi_t<detail::AD>(xa);
    Mat J(n_, n_);
    for (int i = 0; i < n_; ++i) {
      if (y(i).derivatives().size() == 0)
        J.row(i).setZero();
      else
        J.row(i) = y(i).derivatives().transpose();
    }
    return J;
  }

  // phi(x) by damped Newton on psi(p) = x, seeded at p = x.
  Point phi(const Point& x) const {
    double r = x.norm();
    if (r == 0) return x;
    Point p = x;
    Point res = psi(p) - x;
    double rn = res.norm();
    for (int it = 0; it < 60 && rn > 1e-14 * r; ++it) {
      Point step = Dpsi(p).partialPivLu().solve(res);
      double lam = 1;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls, lam *= 0.5) {
        Point q = p - lam * step;
        Point rq = psi(q) - x;
        if (rq.norm() < rn || rq.norm() <= 1e-14 * r) {
          p = q, res = rq, rn = rq.norm(), moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (!(rn <= 1e-12 * r)) {
      std::ostringstream os;
      os << "Newton inversion failed at x = (" << x.transpose() << "), residual " << rn;
      throw MathError(os.str());
    }
    return p;
  }

  Mat Dphi(const Point& x) const {
    if (x.norm() == 0) return Mat::Identity(n_, n_);
    return Dpsi(phi(x)).inverse();
  }

 private:
  static double sqrt_t(double v) { return std::sqrt(v); }
  static detail::AD sqrt_t(const detail::AD& v) { return Eigen::sqrt(v); }

  detail::Vec<double> graph_point_t(double R, double sig) const { return g_.gamma(graph_parameter(R, sig)); }
  detail::Vec<detail::AD> graph_point_t(const detail::AD& R, double sig) const {
    double y = graph_parameter(R.value(), sig);
    Point z = g_.gamma(y), dz = g_.dgamma(y);
    double dy_dR = R.value() / (y + z.dot(dz));
    detail::Vec<detail::AD> out(n_ - 1);
    for (int i = 0; i < n_ - 1; ++i) out(i) = detail::AD(z(i), (dz(i) * dy_dR) * R.derivatives());
    return out;
  }

  BoundaryGraph g_;
  double theta_;
  int n_;
  double c2_, lo_, hi_;
};

// Sampled C^{1,alpha} norm: sup |D gamma| + Holder quotient of D gamma.
inline double sampled_seminorm(const BoundaryGraph& g, int k = 400) {
  std::vector<double> ys;
  for (int i = 0; i <= k; ++i) ys.push_back(-g.r1 + 2 * g.r1 * i / k);
  double sup = 0, hol = 0;
  std::vector<Point> d;
  for (double y : ys) d.push_back(g.dgamma(y)), sup = std::max(sup, d.back().norm());
  for (int i = 0; i <= k; ++i)
    for (int j = i + 1; j <= k; j += std::max(1, (j - i) / 8))
      hol = std::max(hol, (d[i] - d[j]).norm() / std::pow(ys[j] - ys[i], g.alpha1));
  return sup + hol;
}

// Deterministic sample set: directions near the e1 axis and on the whole
// sphere, radii log-spaced in [1e-3, 0.9 r1].
inline std::vector<Point> chart_samples(int ambient, double r1, int count, double max_angle = pi) {
  std::vector<Point> out;
  std::uint64_t st = 0x9e3779b97f4a7c15ull;
  auto next = [&] {
    st ^= st << 13, st ^= st >> 7, st ^= st << 17;
    return (st >> 11) * (1.0 / 9007199254740992.0);
  };
  for (int i = 0; i < count; ++i) {
    double r = 1e-3 * std::pow(0.9 * r1 / 1e-3, (i + 0.5) / count);
    Point w(ambient);
    for (int a = 0; a < ambient; ++a) {
      double u1 = std::max(next(), 1e-300), u2 = next();
      w(a) = std::sqrt(-2 * std::log(u1)) * std::cos(2 * pi * u2);
    }
    Point z = w.tail(ambient - 1);
    z.normalize();
    double ang = max_angle * next();
    double sgn = w(0) >= 0 ? 1 : -1;
    Point x(ambient);
    x(0) = sgn * std::cos(ang);
    x.tail(ambient - 1) = std::sin(ang) * z;
    out.push_back(r * x);
  }
  return out;
}

struct Straightening {
  StraighteningMap map;
  ChartChecks checks;
};

inline Straightening build_straightening(const BoundaryGraph& g, double theta = pi / 16, int samples = 1000) {
  if (!g.gamma || !g.dgamma) throw UsageError("boundary graph needs gamma and its derivative");
  if (g.gamma(0).norm() > 1e-10 || g.dgamma(0).norm() > 1e-10)
    throw UsageError("boundary graph must satisfy gamma(0) = 0 and Dgamma(0) = 0");
  StraighteningMap m(g, theta);
  ChartChecks c;
  c.seminorm = sampled_seminorm(g);
  if (c.seminorm >= g.eps1) throw UsageError("C^{1,alpha} norm of gamma exceeds eps1");
  for (int i = 1; i <= 200; ++i) {
    double y = g.r1 * i / 200;
    for (double s : {y, -y}) {
      Point z = g.gamma(s);
      if (z.norm() > std::sin(theta / 4) * std::sqrt(s * s + z.squaredNorm()))
        throw UsageError("boundary graph leaves the cone |z| <= sin(theta/4)|x| inside r1");
    }
  }
  auto pts = chart_samples(g.ambient, g.r1, samples);
  auto near = chart_samples(g.ambient, g.r1, samples / 2, theta);
  pts.insert(pts.end(), near.begin(), near.end());
  for (const auto& x : pts) {
    double r = x.norm();
    Point p = m.phi(x);
    c.sphere_max_err = std::max(c.sphere_max_err, std::abs(p.norm() - r) / r);
    c.inverse_max_err = std::max(c.inverse_max_err, (m.phi(m.psi(x)) - x).norm() / r);
    Mat J = m.Dpsi(p).inverse();
    Mat fd(g.ambient, g.ambient);
    double h = 1e-6 * r;
    for (int a = 0; a < g.ambient; ++a) {
      Point e = unit(g.ambient, a) * h;
      fd.col(a) = (m.phi(x + e) - m.phi(x - e)) / (2 * h);
    }
    c.jacobian_max_err = std::max(c.jacobian_max_err, (J - fd).norm() / std::max(1.0, J.norm()));
  }
  for (int i = 0; i < samples; ++i) {
    double y = g.r1 * 0.9 * (2.0 * (i + 0.5) / samples - 1);
    Point x(g.ambient);
    x(0) = y;
    x.tail(g.ambient - 1) = g.gamma(y);
    Point p = m.phi(x);
    c.gamma_max_err = std::max(c.gamma_max_err, p.tail(g.ambient - 1).norm());
    c.sphere_max_err = std::max(c.sphere_max_err, std::abs(p.norm() - x.norm()) / x.norm());
  }
  c.samples = static_cast<int>(pts.size()) + samples;
  return {std::move(m), c};
}

// |phi(x) - x| / |x| + ||Dphi(x) - 1||_2
inline double chart_deviation(const StraighteningMap& m, const Point& x) {
  Point p = m.phi(x);
  Mat J = m.Dpsi(p).inverse() - Mat::Identity(m.ambient(), m.ambient());
  Eigen::JacobiSVD<Mat> svd(J);
  return (p - x).norm() / x.norm() + svd.singularValues()(0);
}

struct ChartFit {
  double C1 = 0;      // smallest constant with lhs <= C1 |x|^alpha on the samples
  double alpha1 = 0;  // fitted exponent
  double constant = 0;
  double residual = 0;
  bool valid = false;  // false when the deviation vanishes identically
  int samples = 0;
};

inline std::vector<Point> fit_samples(int ambient, double theta, int count = 200) {
  std::vector<Point> out;
  int nr = 20, per = std::max(1, count / nr);
  for (int i = 0; i < nr; ++i) {
    double r = 1e-3 * std::pow(100.0, i / double(nr - 1));
    for (int j = 0; j < per; ++j) {
      double ang = (theta / 8) * (j + 0.5) / per;
      double sg = j % 2 ? -1 : 1;
      Point x = Point::Zero(ambient);
      x(0) = sg * r * std::cos(ang);
      x(1 + j % (ambient - 1)) = r * std::sin(ang);
      out.push_back(x);
    }
  }
  return out;
}

inline ChartFit fit_chart_constants(const StraighteningMap& m, const std::vector<Point>& samples) {
  if (samples.size() < 100) throw UsageError("chart fit needs at least 100 samples");
  std::vector<double> r, v;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0;
  for (const auto& x : samples) {
    double n = x.norm();
    if (n == 0) throw UsageError("chart fit sample at the origin");
    r.push_back(n);
    v.push_back(chart_deviation(m, x));
    rmin = std::min(rmin, n), rmax = std::max(rmax, n);
  }
  if (rmax / rmin < 1 + 1e-9) throw UsageError("chart fit samples are collinear in log-log");
  ChartFit f;
  f.samples = static_cast<int>(samples.size());
  double vmax = *std::max_element(v.begin(), v.end());
  if (vmax <= 1e-12) return f;
  auto ll = loglog_fit(r, v);
  if (!ll.valid) return f;
  f.valid = true;
  f.alpha1 = ll.exponent;
  f.constant = ll.constant;
  f.residual = ll.residual;
  for (std::size_t i = 0; i < r.size(); ++i) f.C1 = std::max(f.C1, v[i] / std::pow(r[i], f.alpha1));
  return f;
}

}  // namespace epicone
