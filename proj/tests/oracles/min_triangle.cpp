#include "min_triangle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace oracle {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Eigen::Vector2d normal(double theta) { return {std::cos(theta), std::sin(theta)}; }

double support(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& n) {
  double h = -kInf;
  for (const auto& p : hull) h = std::max(h, n.dot(p));
  return h;
}

// Area of the triangle {x : n_k . x <= h_k}, or +inf if it is unbounded.
double triangle_area(const std::vector<Eigen::Vector2d>& hull, std::array<double, 3> theta) {
  for (auto& t : theta) t = std::fmod(std::fmod(t, 2 * kPi) + 2 * kPi, 2 * kPi);
  std::sort(theta.begin(), theta.end());
  for (int k = 0; k < 3; ++k) {
    double gap = k < 2 ? theta[k + 1] - theta[k] : theta[0] + 2 * kPi - theta[2];
    if (gap >= kPi - 1e-12) return kInf;
  }
  std::array<Eigen::Vector2d, 3> n;
  std::array<double, 3> h;
  for (int k = 0; k < 3; ++k) {
    n[k] = normal(theta[k]);
    h[k] = support(hull, n[k]);
  }
  std::array<Eigen::Vector2d, 3> v;
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix2d A;
    A.row(0) = n[k].transpose();
    A.row(1) = n[(k + 1) % 3].transpose();
    v[k] = A.partialPivLu().solve(Eigen::Vector2d(h[k], h[(k + 1) % 3]));
  }
  return 0.5 * std::abs(cross(v[0], v[1], v[2]));
}

}  // namespace

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

double min_enclosing_triangle_area(const std::vector<Eigen::Vector2d>& points) {
  const auto hull = convex_hull(points);
  if (hull.size() < 3) return kInf;

  double best = kInf;
  std::array<double, 3> best_theta{};
  constexpr int kSteps = 360;
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const Eigen::Vector2d d = hull[(e + 1) % hull.size()] - hull[e];
    // Outward normal of a counter-clockwise edge.
    const double flush = std::atan2(-d.x(), d.y());
    for (int a = 1; a < kSteps; ++a) {
      for (int b = a + 1; b < kSteps; ++b) {
        std::array<double, 3> th{flush, flush + 2 * kPi * a / kSteps, flush + 2 * kPi * b / kSteps};
        double area = triangle_area(hull, th);
        if (area < best) {
          best = area;
          best_theta = th;
        }
      }
    }
  }

  double step = 2 * kPi / kSteps;
  while (step > 1e-10) {
    bool improved = false;
    for (int k = 0; k < 3; ++k) {
      for (double s : {step, -step}) {
        auto th = best_theta;
        th[k] += s;
        double area = triangle_area(hull, th);
        if (area < best) {
          best = area;
          best_theta = th;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace oracle
