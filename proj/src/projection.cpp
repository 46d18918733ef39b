#include "cpm/projection.hpp"

#include <cmath>
#include <string>

#include "cpm/error.hpp"

namespace cpm {

void canonicalize_signs(Eigen::MatrixXd& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      double a = std::abs(columns(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (columns.rows() > 0 && columns(best, j) < 0.0) {
      columns.col(j) = -columns.col(j);
    }
  }
}

ProjectionBasis fit_projection(const Eigen::MatrixXd& X, int R) {
  const Eigen::Index N = X.rows();
  const Eigen::Index M = X.cols();
  if (R < 1) {
    throw ConfigError("subspace dimension must be at least 1, got " + std::to_string(R));
  }

  ProjectionBasis basis;
  basis.R = R;
  basis.x_bar = X.rowwise().mean();
  Eigen::MatrixXd centered = X.colwise() - basis.x_bar;

  // SVD of the centered matrix itself; no covariance product.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  basis.singular_values = svd.singularValues();

  const Eigen::Index structural = std::min(N - 1, M - 1);
  int attainable = 0;
  const double top = basis.singular_values.size() > 0 ? basis.singular_values(0) : 0.0;
  if (top > 0.0) {
    for (Eigen::Index r = 0; r < std::min<Eigen::Index>(structural, basis.singular_values.size());
         ++r) {
      if (basis.singular_values(r) / top >= kRankTolerance) ++attainable;
    }
  }
  if (R > attainable) {
    throw RankDeficiencyError(R, attainable);
  }

  Eigen::MatrixXd axes = svd.matrixU().leftCols(R + 1 <= svd.matrixU().cols() ? R + 1 : R);
  canonicalize_signs(axes);
  basis.U = axes.leftCols(R);

  Eigen::VectorXd u0 = basis.x_bar - basis.U * (basis.U.transpose() * basis.x_bar);
  const double u0_norm = u0.norm();
  if (u0_norm > kRankTolerance * std::max(1.0, basis.x_bar.norm())) {
    basis.u_orth = u0 / u0_norm;
  } else {
    if (axes.cols() <= R) {
      throw DegeneracyError("mean lies in the principal subspace and no further axis exists");
    }
    basis.u_orth = axes.col(R);
    basis.orth_fallback = true;
  }

  basis.U_tilde.resize(N, R + 1);
  basis.U_tilde << basis.U, basis.u_orth;
  return basis;
}

ProjectedPoints project_points(const Eigen::MatrixXd& X, const ProjectionBasis& basis) {
  if (X.rows() != basis.N()) {
    throw ShapeError("matrix has " + std::to_string(X.rows()) + " rows, basis expects " +
                     std::to_string(basis.N()));
  }
  ProjectedPoints out;
  Eigen::MatrixXd centered = X.colwise() - basis.x_bar;
  out.P = (basis.U * (basis.U.transpose() * centered)).colwise() + basis.x_bar;
  out.P_tilde = basis.U_tilde.transpose() * out.P;
  return out;
}

Eigen::MatrixXd lift_to_original(const Eigen::MatrixXd& coords, const ProjectionBasis& basis) {
  if (coords.rows() != basis.K()) {
    throw ShapeError("coordinates have " + std::to_string(coords.rows()) + " rows, basis has K=" +
                     std::to_string(basis.K()));
  }
  return basis.U_tilde * coords;
}

}  // namespace cpm
