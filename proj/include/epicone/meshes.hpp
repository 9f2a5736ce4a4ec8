#pragma once

#include "epicone/current.hpp"

namespace epicone {

using PolarMap = std::function<Point(double rho, double phi)>;

// Polar triangulation of the sector {rho <= radii.back(), phi in [phi0, phi1]}.
// radii[0] must be 0 (single apex vertex). A full turn (phi1 - phi0 = 2 pi)
// wraps around. Triangles are oriented counterclockwise in (rho, phi).
inline SimplicialCurrent polar_mesh(const std::vector<double>& radii, int ntheta, double phi0, double phi1,
                                    const PolarMap& F, std::int64_t m = 1) {
  bool closed = std::abs(phi1 - phi0 - 2 * pi) < 1e-12;
  int na = closed ? ntheta : ntheta + 1;
  Point c = F(0.0, phi0);
  SimplicialCurrent T(2, static_cast<int>(c.size()));
  int apex = T.add_vertex(c);
  std::vector<std::vector<int>> ring(radii.size());
  for (std::size_t i = 1; i < radii.size(); ++i)
    for (int j = 0; j < na; ++j) ring[i].push_back(T.add_vertex(F(radii[i], phi0 + (phi1 - phi0) * j / ntheta)));
  auto at = [&](std::size_t i, int j) { return ring[i][closed ? j % ntheta : j]; };
  for (int j = 0; j < ntheta; ++j) T.add(apex, at(1, j), at(1, j + 1), m);
  for (std::size_t i = 1; i + 1 < radii.size(); ++i)
    for (int j = 0; j < ntheta; ++j) {
      T.add(at(i, j), at(i + 1, j), at(i + 1, j + 1), m);
      T.add(at(i, j), at(i + 1, j + 1), at(i, j + 1), m);
    }
  return T;
}

// 0 = r_0 < r_1 < ... : `levels` geometric rings q^l * r_inner below r_inner
// followed by n uniform rings up to R.
inline std::vector<double> graded_radii(double R, int n, int levels = 0, double q = 0.5) {
  std::vector<double> r{0.0};
  double inner = R / n;
  for (int l = levels; l >= 1; --l) r.push_back(inner * std::pow(q, l));
  for (int i = 1; i <= n; ++i) r.push_back(R * i / n);
  return r;
}

inline PolarMap planar_map(int ambient, double cx = 0, double cy = 0) {
  return [=](double rho, double phi) {
    Point p = Point::Zero(ambient);
    p(0) = cx + rho * std::cos(phi);
    p(1) = cy + rho * std::sin(phi);
    return p;
  };
}

inline SimplicialCurrent flat_disk(double R, int nr, int nt, int ambient = 4, std::int64_t m = 1) {
  return polar_mesh(graded_radii(R, nr), nt, 0, 2 * pi, planar_map(ambient), m);
}

// Half-disk {x2 >= 0} in span(e1, e2).
inline SimplicialCurrent flat_half_disk(double R, int nr, int nt, int ambient = 4, std::int64_t m = 1) {
  return polar_mesh(graded_radii(R, nr), nt, 0, pi, planar_map(ambient), m);
}

}  // namespace epicone
