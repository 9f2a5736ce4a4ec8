// Regenerates the files under tests/fixtures: make_fixtures <dir>
#include <fstream>
#include <iostream>

#include "epicone/cone.hpp"
#include "epicone/curve.hpp"

using namespace epicone;

namespace {

Point y2(double a, double b) {
  Point y(2);
  y << a, b;
  return y;
}

void write(const std::string& path, const std::function<void(std::ostream&)>& f) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write " + path);
  f(os);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <dir>\n";
    return 1;
  }
  std::string d = argv[1];
  // half-circle cross-section with a mode-2 wiggle of amplitude 0.03 in e3
  const int k = 256;
  LiftedCurve z;
  z.Q = 1;
  std::vector<Point> pts;
  for (int i = 0; i <= k; ++i) {
    double t = i == k ? pi : pi * i / k;
    double w = (i == 0 || i == k) ? 0.0 : 0.03 * std::sin(2 * t);
    z.t.push_back(t);
    z.theta.push_back(t);
    z.y.push_back(y2(w, 0));
    Point p(4);
    p << std::cos(t), std::sin(t), w, 0;
    pts.push_back(p / p.norm());
  }
  pts.front() = unit(4, 0);
  pts.back() = -unit(4, 0);
  z.L = pi;
  write(d + "/wiggled_half_circle.csv", [&](std::ostream& os) { write_curve_csv(os, z); });
  write(d + "/wiggled_half_circle.cur", [&](std::ostream& os) { write_current(os, polyline(pts, false)); });

  // symmetric closed curve with a localized high-frequency wiggle near s = +-1
  auto y = [](double s) {
    double bump = std::abs(s - 1.0) < 0.02 * pi ? 0.01 * std::sin(60 * s) * std::pow(std::cos((s - 1.0) / 0.04), 2) : 0;
    return y2(0.01 * std::sin(s) + bump, 0.5 * bump);
  };
  auto th = [](double s) {
    return std::abs(s - 1.0) < 0.02 * pi ? 0.03 * std::sin(50 * (s - 1.0)) * std::cos((s - 1.0) / 0.04) : 0.0;
  };
  auto c = sample_curve(
      2000, 1, [&](double s) { return s >= 0 ? th(s) : -th(-s); },
      [&](double s) { return Point(s >= 0 ? y(s) : Point(-y(-s))); }, true);
  write(d + "/wiggled_symmetric.csv", [&](std::ostream& os) { write_curve_csv(os, c); });

  // two planar arcs from e1 to -e1: the upper unit half-circle and a square detour
  std::vector<Point> arc, box;
  for (int i = 0; i <= 64; ++i) {
    Point p = Point::Zero(4);
    p(0) = std::cos(pi * i / 64);
    p(1) = std::sin(pi * i / 64);
    arc.push_back(p);
  }
  for (auto [a, b] : {std::pair{1.0, 0.0}, {1.0, 1.0}, {-1.0, 1.0}, {-1.0, 0.0}}) {
    Point p = Point::Zero(4);
    p(0) = a;
    p(1) = b;
    box.push_back(p);
  }
  write(d + "/half_circle.cur", [&](std::ostream& os) { write_current(os, polyline(arc, false)); });
  write(d + "/square_arc.cur", [&](std::ostream& os) { write_current(os, polyline(box, false)); });
  return 0;
}
