#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpm/projection.hpp"

namespace cpm {

struct MvsaConfig {
  int K = 0;                       // vertex count, R + 1
  double expansion_factor = 0.0;   // inflation of the VCA simplex before discarding; 0 disables
  int max_iterations = 300;
  double objective_tolerance = 1e-9;
  double constraint_tolerance = 1e-8;
  std::uint64_t rng_seed = 1;
  int restarts = 8;  // VCA seeds rng_seed, rng_seed + 1, ...; the best local optimum is kept

  /// Throws ConfigError on K < 2, negative expansion, non-positive tolerances or restarts.
  void validate() const;
};

struct VcaResult {
  std::vector<Eigen::Index> selected_indices;
  Eigen::MatrixXd M0;  // K x K, the selected columns
};

struct InteriorSplit {
  std::vector<Eigen::Index> retained;
  std::vector<Eigen::Index> discarded;
};

/// Fitted minimum-volume simplex. Columns of A follow the columns of the fitted P_tilde.
struct SimplexModel {
  Eigen::MatrixXd Q;        // K x K, inverse of V_tilde
  Eigen::MatrixXd V_tilde;  // K x K, vertices in subspace coordinates
  Eigen::MatrixXd V;        // N x K, vertices in term coordinates (empty unless lifted)
  Eigen::MatrixXd A;        // K x M convex coefficients after clamping
  Eigen::RowVectorXd c;     // 1^T Q = c
  std::vector<double> objective_trace;  // log|det Q|: start value, then one per accepted step

  std::vector<Eigen::Index> vca_indices;
  InteriorSplit split;
  int iterations = 0;
  int repair_doublings = 0;
  int starts = 1;  // distinct VCA starts tried
  bool converged = false;
  std::string stop_reason;
  double min_coefficient_retained = 0.0;   // before clamping
  double min_coefficient_discarded = 0.0;  // before clamping; 0 when nothing was discarded
  double reconstruction_error = 0.0;       // ||P~ - V~ A_raw||_F / ||P~||_F

  int K() const noexcept { return static_cast<int>(Q.rows()); }
};

/// Seeded Vertex Component Analysis: K extreme columns of P_tilde.
VcaResult vca_init(const Eigen::MatrixXd& P_tilde, int K, std::uint64_t seed);

/// Moves each vertex (column) away from the vertex centroid by (1 + factor).
Eigen::MatrixXd expand_simplex(const Eigen::MatrixXd& M0, double factor);

/// Barycentric coordinates of every column of `points` w.r.t. the simplex columns.
Eigen::MatrixXd barycentric_coordinates(const Eigen::MatrixXd& points,
                                        const Eigen::MatrixXd& simplex);

/// A point is discarded only when strictly interior: every barycentric coordinate > tol and
/// the coordinates sum to one within tol. Boundary and exterior points are retained.
InteriorSplit discard_interior(const Eigen::MatrixXd& P_tilde, const Eigen::MatrixXd& simplex,
                               double tol);

/// c = 1^T P_K^{-1} for K well-conditioned columns chosen by pivoted QR.
Eigen::RowVectorXd equality_constant(const Eigen::MatrixXd& P_tilde);

/// log|det Q| via LU.
double log_abs_det(const Eigen::MatrixXd& Q);

/// Maximizes log|det Q| subject to Q P_tilde >= 0 on retained points and 1^T Q = c.
SimplexModel solve_mvsa(const Eigen::MatrixXd& P_tilde, const MvsaConfig& config);

/// Same fit, with V lifted back to term coordinates.
SimplexModel solve_mvsa(const ProjectedPoints& points, const ProjectionBasis& basis,
                        const MvsaConfig& config);

/// Entries in (-tol, 0) become 0, then every column is rescaled to sum to one.
Eigen::MatrixXd clamp_coefficients(Eigen::MatrixXd A, double tol);

/// a = Q p~ for every column, clamped and renormalized like the fit.
Eigen::MatrixXd decompose(const Eigen::MatrixXd& P_tilde, const SimplexModel& model,
                          double constraint_tolerance = 1e-8);

}  // namespace cpm
