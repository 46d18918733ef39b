#pragma once

#include <Eigen/Dense>

namespace cpm {

/// PCA basis of the centered term-utterance matrix plus the displacement axis that turns
/// the R-dimensional affine subspace into K = R + 1 linear coordinates.
struct ProjectionBasis {
  Eigen::MatrixXd U;          // N x R, orthonormal principal axes
  Eigen::VectorXd x_bar;      // N, column mean of X
  Eigen::VectorXd u_orth;     // N, unit component of x_bar orthogonal to span(U)
  Eigen::MatrixXd U_tilde;    // N x K, [U | u_orth]
  Eigen::VectorXd singular_values;  // of X - x_bar 1^T, descending
  int R = 0;
  /// Set when x_bar lay in span(U) and u_orth had to be taken from the next singular vector.
  bool orth_fallback = false;

  int K() const noexcept { return R + 1; }
  Eigen::Index N() const noexcept { return U.rows(); }
};

struct ProjectedPoints {
  Eigen::MatrixXd P;        // N x M, projected points in term coordinates
  Eigen::MatrixXd P_tilde;  // K x M, U_tilde^T P
};

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-12;

/// Requires 1 <= R <= min(N-1, M-1) and numerical rank >= R (RankDeficiencyError otherwise).
ProjectionBasis fit_projection(const Eigen::MatrixXd& X, int R);

/// P = x_bar 1^T + U U^T (X - x_bar 1^T) and P_tilde = U_tilde^T P.
ProjectedPoints project_points(const Eigen::MatrixXd& X, const ProjectionBasis& basis);

/// U_tilde * coords; accepts a single K-vector or a K x n block.
Eigen::MatrixXd lift_to_original(const Eigen::MatrixXd& coords, const ProjectionBasis& basis);

/// Flips columns so that each one's largest-magnitude entry is non-negative
/// (ties resolved at the lowest row index).
void canonicalize_signs(Eigen::MatrixXd& columns);

}  // namespace cpm
