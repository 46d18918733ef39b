#pragma once

#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Minimum-area triangle enclosing a planar point set, by exhaustive search.
/// One side is laid flush with each convex-hull edge in turn; the other two sides are
/// support lines whose normal angles are scanned on a 1 degree grid and then polished by
/// a shrinking pattern search over all three angles. Returns +inf for fewer than 3 hull points.
double min_enclosing_triangle_area(const std::vector<Eigen::Vector2d>& points);

/// Counter-clockwise hull, collinear points dropped (Andrew's monotone chain).
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> points);

}  // namespace oracle
