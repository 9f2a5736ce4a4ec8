#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace epicone {

using Point = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;

// Bad input, unreadable file, unknown name. Maps to CLI exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical or mathematical failure (non-convergence, violated hypothesis).
// Maps to CLI exit code 2.
struct MathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Point unit(int ambient, int i) {
  Point e = Point::Zero(ambient);
  e(i) = 1.0;
  return e;
}

// Neumaier-compensated sum; order of accumulation is the caller's order.
class Summer {
 public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

inline double sum(const std::vector<double>& v) {
  Summer s;
  for (double x : v) s.add(x);
  return s.value();
}

// Worker count from EPICONE_THREADS (default 1 when unset).
inline int thread_cap() {
  const char* env = std::getenv("EPICONE_THREADS");
  int n = 1;
  if (env) {
    try {
      n = std::stoi(env);
    } catch (...) {
      n = 1;
    }
  }
  return std::max(1, n);
}

// Runs body(i) for i in [0, n). Each index must write only its own slot so
// results do not depend on scheduling.
template <class F>
void parallel_for(int n, F&& body) {
  int workers = std::min(thread_cap(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) body(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(pi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        double z1 = z;
        z = z1 - p1 / pp;
        if (std::abs(z - z1) < 1e-16) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
  }
  // Integral of f over [a, b].
  template <class F>
  double integrate(F&& f, double a, double b) const {
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    Summer s;
    for (std::size_t i = 0; i < x.size(); ++i) s.add(w[i] * f(c + h * x[i]));
    return h * s.value();
  }
};

// Least squares fit of log v = log C + a log r.
struct LogLogFit {
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // RMS of log residuals
  bool valid = false;
};

inline LogLogFit loglog_fit(const std::vector<double>& r, const std::vector<double>& v) {
  LogLogFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i] > 0 && v[i] > 0) {
      lx.push_back(std::log(r[i]));
      ly.push_back(std::log(v[i]));
    }
  std::size_t n = lx.size();
  if (n < 2) return fit;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx < 1e-14 * n) return fit;
  fit.exponent = sxy / sxx;
  double logc = my - fit.exponent * mx;
  fit.constant = std::exp(logc);
  double rr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = ly[i] - logc - fit.exponent * lx[i];
    rr += e * e;
  }
  fit.residual = std::sqrt(rr / n);
  fit.valid = true;
  return fit;
}

}  // namespace epicone
