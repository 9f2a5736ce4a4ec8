#pragma once

// Independent reference computations shared by unit and acceptance tests.

#include <limits>
#include <vector>

#include "epicone/curve.hpp"

namespace oracle {

using epicone::Point;

// Shortest h-length from (0, y1) to (dtheta, y2) in R x R^2 over paths monotone
// in theta: dynamic programming over theta layers, a square y-grid, and y-moves
// of at most K cells per layer. Edge lengths use Simpson's rule on the metric
// along the straight edge.
inline double dp_geodesic_length(const Point& y1, double dtheta, const Point& y2, int layers = 200, int grid = 200,
                                 double pad = 0.02) {
  double lo0 = std::min(y1(0), y2(0)) - pad, hi0 = std::max(y1(0), y2(0)) + pad;
  double lo1 = std::min(y1(1), y2(1)) - pad, hi1 = std::max(y1(1), y2(1)) + pad;
  double h0 = (hi0 - lo0) / (grid - 1), h1 = (hi1 - lo1) / (grid - 1);
  // shift the grid so both endpoints are nodes up to a sub-cell stretch
  int a0 = static_cast<int>(std::lround((y1(0) - lo0) / h0)), a1 = static_cast<int>(std::lround((y1(1) - lo1) / h1));
  int b0 = static_cast<int>(std::lround((y2(0) - lo0) / h0)), b1 = static_cast<int>(std::lround((y2(1) - lo1) / h1));
  if (b0 != a0) h0 = (y2(0) - y1(0)) / (b0 - a0);
  if (b1 != a1) h1 = (y2(1) - y1(1)) / (b1 - a1);
  lo0 = y1(0) - a0 * h0;
  lo1 = y1(1) - a1 * h1;
  double dth = dtheta / layers;
  double slope = std::max(std::abs(y2(0) - y1(0)) / h0, std::abs(y2(1) - y1(1)) / h1) / layers;
  int K = static_cast<int>(std::ceil(2 * slope)) + 1;
  auto len = [&](double p0, double p1, double q0, double q1) {
    double d0 = q0 - p0, d1 = q1 - p1, q = d0 * d0 + d1 * d1;
    double w = p0 * d1 - p1 * d0;
    auto sp = [&](double s) {
      double y0 = p0 + s * d0, yy = p1 + s * d1;
      return std::sqrt((1 + y0 * y0 + yy * yy) * dth * dth + q + w * w);
    };
    return (sp(0) + 4 * sp(0.5) + sp(1)) / 6;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cur(grid * grid, inf), nxt(grid * grid);
  cur[a0 * grid + a1] = 0;
  for (int l = 0; l < layers; ++l) {
    std::fill(nxt.begin(), nxt.end(), inf);
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        double v = cur[i * grid + j];
        if (v == inf) continue;
        double p0 = lo0 + i * h0, p1 = lo1 + j * h1;
        for (int di = -K; di <= K; ++di) {
          int ii = i + di;
          if (ii < 0 || ii >= grid) continue;
          for (int dj = -K; dj <= K; ++dj) {
            int jj = j + dj;
            if (jj < 0 || jj >= grid) continue;
            double c = v + len(p0, p1, lo0 + ii * h0, lo1 + jj * h1);
            double& slot = nxt[ii * grid + jj];
            if (c < slot) slot = c;
          }
        }
      }
    std::swap(cur, nxt);
  }
  return cur[b0 * grid + b1];
}

// Maximal function by brute force over every run of consecutive cells.
inline std::vector<double> maximal_function(const std::vector<double>& f, const std::vector<double>& w) {
  int k = static_cast<int>(f.size());
  std::vector<double> mf(k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int len = 1; len <= k; ++len) {
      double s = 0, ww = 0;
      for (int l = 0; l < len; ++l) s += f[(i + l) % k] * w[(i + l) % k], ww += w[(i + l) % k];
      double m = s / ww;
      for (int l = 0; l < len; ++l) mf[(i + l) % k] = std::max(mf[(i + l) % k], m);
    }
  return mf;
}

}  // namespace oracle
