#pragma once

#include <vector>

#include <Eigen/Dense>

namespace cpm {

/// Euclidean projection of z onto {x : normals.col(j)^T x >= offsets(j) for all j}.
struct PolyhedralProjection {
  Eigen::VectorXd point;
  Eigen::VectorXd multipliers;            // one per active constraint, >= 0
  std::vector<Eigen::Index> active;       // constraint indices, linearly independent normals
  Eigen::MatrixXd tangent_basis;          // orthonormal basis of the active normals' complement
};

/// Dual active-set method (Goldfarb-Idnani) specialised to an identity Hessian.
/// The polyhedron must be non-empty; an empty one raises FeasibilityError.
PolyhedralProjection project_onto_polyhedron(const Eigen::VectorXd& z,
                                             const Eigen::MatrixXd& normals,
                                             const Eigen::VectorXd& offsets);

}  // namespace cpm
