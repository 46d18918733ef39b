#include "cpm/mvsa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "cpm/error.hpp"
#include "cpm/polyhedral_projection.hpp"

namespace cpm {
namespace {

constexpr int kMaxVcaDraws = 16;
constexpr int kMaxRepairDoublings = 20;
constexpr int kMaxHalvings = 40;
constexpr int kMaxSlopeSearch = 30;
constexpr double kSlopeReduction = 0.1;
constexpr double kArmijo = 1e-4;
constexpr int kMaxDualIterations = 100;
constexpr double kDualTolerance = 1e-11;
constexpr double kMaxStep = 1e6;

std::string describe(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os.precision(17);
  os << m;
  return os.str();
}

// Step direction for the current iterate, expressed in barycentric coordinates.
//
// With Q' = (I + W) Q the objective becomes log|det Q| + log|det(I + W)|, the coefficients of
// point i become (I + W) a_i, and 1^T Q' = c holds iff every column of W sums to zero. The
// subproblem keeps the exact gradient (tr W) and replaces the indefinite curvature -tr(W^2) by
// -||W||_F^2, which agrees with it on symmetric W:
//
//   min 1/2 ||W - I||^2   s.t.  1^T W = 0,   w_k^T a_i >= -max(a_ki, 0)   for every k, i.
//
// Rows only couple through the column sums, so the problem is solved in its dual over the
// K multipliers mu of 1^T W = 0; for fixed mu each row is a projection onto its own polyhedron.
// The dual is concave and piecewise quadratic; it is maximized with regularized semismooth
// Newton steps and a line search on the directional slope.
//
// Each row starts from the points nearest its facet (smallest a_ki); constraints violated by
// the current solution are added until none remain. mu carries over between calls.
class DirectionSolver {
 public:
  explicit DirectionSolver(Eigen::Index K)
      : K_(K), mu_(Eigen::VectorXd::Constant(K, 1.0 / static_cast<double>(K))) {}

  // Seeds every row's working set from the coefficients of the current iterate.
  void reset(const Eigen::MatrixXd& A) {
    const Eigen::Index m = A.cols();
    rows_.assign(static_cast<std::size_t>(K_), Row{});
    const Eigen::Index seed = std::min<Eigen::Index>(m, 2 * K_ + 8);
    for (Eigen::Index k = 0; k < K_; ++k) {
      std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
      std::iota(order.begin(), order.end(), 0);
      std::partial_sort(order.begin(), order.begin() + seed, order.end(),
                        [&](Eigen::Index a, Eigen::Index b) {
                          return A(k, a) < A(k, b) || (A(k, a) == A(k, b) && a < b);
                        });
      order.resize(static_cast<std::size_t>(seed));
      set_constraints(A, k, std::move(order));
    }
  }

  // Minimizes 1/2 ||W - T||^2 over the constraints above; T = I gives the basic step.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& T) {
    const Eigen::Index m = A.cols();
    target_ = T;
    Evaluation cur;
    for (int round = 0; round < kMaxWorkingSetRounds; ++round) {
      cur = maximize_dual();
      bool grew = false;
      for (Eigen::Index k = 0; k < K_; ++k) {
        Row& row = rows_[static_cast<std::size_t>(k)];
        Eigen::RowVectorXd slack = cur.W.row(k) * A + A.row(k).cwiseMax(0.0);
        std::vector<char> in(static_cast<std::size_t>(m), 0);
        for (Eigen::Index i : row.members) in[static_cast<std::size_t>(i)] = 1;
        std::vector<Eigen::Index> violated;
        for (Eigen::Index i = 0; i < m; ++i) {
          if (!in[static_cast<std::size_t>(i)] && slack(i) < -kViolation) violated.push_back(i);
        }
        if (violated.empty()) continue;
        const auto take = std::min<std::size_t>(violated.size(), static_cast<std::size_t>(K_));
        std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take),
                          violated.end(), [&](Eigen::Index a, Eigen::Index b) {
                            return slack(a) < slack(b) || (slack(a) == slack(b) && a < b);
                          });
        std::vector<Eigen::Index> members = row.members;
        members.insert(members.end(), violated.begin(),
                       violated.begin() + static_cast<std::ptrdiff_t>(take));
        set_constraints(A, k, std::move(members));
        grew = true;
      }
      if (!grew) break;
    }
    // Remove the remaining column-sum residual so the equality holds exactly.
    Eigen::MatrixXd W = cur.W;
    W.rowwise() -= cur.gradient.transpose() / static_cast<double>(K_);
    return W;
  }

 private:
  static constexpr int kMaxWorkingSetRounds = 50;
  static constexpr double kViolation = 1e-12;

  struct Row {
    std::vector<Eigen::Index> members;
    Eigen::MatrixXd normals;
    Eigen::VectorXd offsets;
  };

  struct Evaluation {
    Eigen::MatrixXd W;
    Eigen::VectorXd gradient;   // column sums of W, as a vector
    Eigen::MatrixXd curvature;  // sum of tangent-space projectors
  };

  void set_constraints(const Eigen::MatrixXd& A, Eigen::Index k, std::vector<Eigen::Index> members) {
    Row& row = rows_[static_cast<std::size_t>(k)];
    row.members = std::move(members);
    const auto n = static_cast<Eigen::Index>(row.members.size());
    row.normals.resize(K_, n);
    row.offsets.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index i = row.members[static_cast<std::size_t>(j)];
      row.normals.col(j) = A.col(i);
      row.offsets(j) = -std::max(A(k, i), 0.0);
    }
  }

  Evaluation maximize_dual() {
    Evaluation cur = evaluate(mu_);
    for (int it = 0; it < kMaxDualIterations; ++it) {
      if (cur.gradient.lpNorm<Eigen::Infinity>() <= kDualTolerance) break;

      const double reg = std::max(1e-14, std::min(1.0, cur.gradient.norm()));
      Eigen::MatrixXd H = cur.curvature + reg * Eigen::MatrixXd::Identity(K_, K_);
      Eigen::VectorXd delta = H.ldlt().solve(cur.gradient);
      const double slope = cur.gradient.dot(delta);
      if (!(slope > 0.0)) break;

      // The dual is concave, so its slope along delta decreases in t. Take the full step
      // unless it overshoots, otherwise bracket the slope's root by regula falsi (Illinois).
      // Slopes stay meaningful where value differences are lost to rounding.
      Evaluation next = evaluate(mu_ + delta);
      double t = 1.0;
      double d_hi = next.gradient.dot(delta);
      bool moved = d_hi >= 0.0;
      if (!moved) {
        double lo = 0.0, d_lo = slope, hi = 1.0;
        int side = 0;
        for (int s = 0; s < kMaxSlopeSearch; ++s) {
          t = (lo * d_hi - hi * d_lo) / (d_hi - d_lo);
          next = evaluate(mu_ + t * delta);
          const double d = next.gradient.dot(delta);
          if (std::abs(d) <= kSlopeReduction * slope) {
            moved = true;
            break;
          }
          if (d > 0.0) {
            lo = t;
            d_lo = d;
            if (side == 1) d_hi *= 0.5;
            side = 1;
          } else {
            hi = t;
            d_hi = d;
            if (side == -1) d_lo *= 0.5;
            side = -1;
          }
        }
      }
      if (!moved) break;
      mu_ += t * delta;
      cur = std::move(next);
    }
    return cur;
  }

  Evaluation evaluate(const Eigen::VectorXd& mu) const {
    Evaluation e;
    e.W.resize(K_, K_);
    e.curvature = Eigen::MatrixXd::Zero(K_, K_);
    for (Eigen::Index k = 0; k < K_; ++k) {
      const Row& row = rows_[static_cast<std::size_t>(k)];
      Eigen::VectorXd target = target_.row(k).transpose() - mu;
      auto proj = project_onto_polyhedron(target, row.normals, row.offsets);
      e.W.row(k) = proj.point.transpose();
      e.curvature.noalias() += proj.tangent_basis * proj.tangent_basis.transpose();
    }
    e.gradient = e.W.colwise().sum().transpose();
    return e;
  }

  Eigen::Index K_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd target_;
  std::vector<Row> rows_;
};

// Step length along W: the constraints Q Y >= 0 are linear, so the largest feasible t is exact;
// within it, log|det(I + tW)| = sum_j log|1 + t lambda_j| is maximized by golden section.
double preferred_step(const Eigen::MatrixXd& W, const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd D = W * A;
  double t_max = kMaxStep;
  for (Eigen::Index i = 0; i < A.cols(); ++i) {
    for (Eigen::Index k = 0; k < A.rows(); ++k) {
      if (D(k, i) < 0.0) t_max = std::min(t_max, std::max(A(k, i), 0.0) / -D(k, i));
    }
  }
  if (!(t_max > 0.0)) return 1.0;

  const Eigen::VectorXcd lambda = Eigen::EigenSolver<Eigen::MatrixXd>(W, false).eigenvalues();
  auto gain = [&](double t) {
    double g = 0.0;
    for (Eigen::Index j = 0; j < lambda.size(); ++j) g += std::log(std::abs(1.0 + t * lambda(j)));
    return g;
  };
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0, hi = t_max;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double g1 = gain(x1), g2 = gain(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12 * t_max; ++it) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + kInvPhi * (hi - lo);
      g2 = gain(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - kInvPhi * (hi - lo);
      g1 = gain(x1);
    }
  }
  double best = 0.5 * (lo + hi);
  if (gain(t_max) > gain(best)) best = t_max;
  if (t_max >= 1.0 && gain(1.0) > gain(best)) best = 1.0;
  return std::isfinite(gain(best)) && best > 0.0 ? best : std::min(1.0, t_max);
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(idx[j]);
  return out;
}

}  // namespace

void MvsaConfig::validate() const {
  if (K < 2) {
    throw ConfigError("MVSA needs at least 2 vertices (R >= 1), got K=" + std::to_string(K));
  }
  if (!(expansion_factor >= 0.0)) throw ConfigError("expansion factor must be >= 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (!(objective_tolerance > 0.0)) throw ConfigError("objective tolerance must be > 0");
  if (!(constraint_tolerance > 0.0)) throw ConfigError("constraint tolerance must be > 0");
}

VcaResult vca_init(const Eigen::MatrixXd& P_tilde, int K, std::uint64_t seed) {
  const Eigen::Index dim = P_tilde.rows();
  const Eigen::Index M = P_tilde.cols();
  if (K < 1) throw ConfigError("VCA needs K >= 1");
  if (M < K || dim < K) {
    throw DegeneracyError("VCA needs at least K=" + std::to_string(K) + " points in " +
                          std::to_string(K) + " dimensions");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = P_tilde.colwise().norm().maxCoeff();
  if (!(scale > 0.0)) throw DegeneracyError("all points are zero");

  VcaResult out;
  Eigen::MatrixXd basis(dim, 0);  // orthonormal basis of the selected columns
  for (int step = 0; step < K; ++step) {
    bool found = false;
    for (int draw = 0; draw < kMaxVcaDraws && !found; ++draw) {
      Eigen::VectorXd w(dim);
      for (Eigen::Index i = 0; i < dim; ++i) w(i) = gauss(rng);
      if (basis.cols() > 0) w -= basis * (basis.transpose() * w);
      if (w.norm() <= 1e-12) continue;

      Eigen::VectorXd scores = (P_tilde.transpose() * w).cwiseAbs();
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < M; ++j) {
        if (scores(j) > scores(best)) best = j;
      }
      Eigen::VectorXd residual = P_tilde.col(best);
      if (basis.cols() > 0) residual -= basis * (basis.transpose() * residual);
      if (residual.norm() <= 1e-10 * scale) continue;

      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = residual.normalized();
      out.selected_indices.push_back(best);
      found = true;
    }
    if (!found) {
      throw DegeneracyError("fewer than K=" + std::to_string(K) +
                            " affinely independent points (found " + std::to_string(step) + ")");
    }
  }
  out.M0 = select_columns(P_tilde, out.selected_indices);
  return out;
}

Eigen::MatrixXd expand_simplex(const Eigen::MatrixXd& M0, double factor) {
  if (!(factor >= 0.0)) throw ConfigError("expansion factor must be >= 0");
  Eigen::VectorXd g = M0.rowwise().mean();
  Eigen::MatrixXd out = ((M0.colwise() - g) * (1.0 + factor)).colwise() + g;
  return out;
}

Eigen::MatrixXd barycentric_coordinates(const Eigen::MatrixXd& points,
                                        const Eigen::MatrixXd& simplex) {
  if (simplex.rows() != simplex.cols() || points.rows() != simplex.rows()) {
    throw ShapeError("simplex must be square and match the point dimension");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(simplex);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw DegeneracyError("simplex vertices are affinely dependent");
  }
  return lu.solve(points);
}

InteriorSplit discard_interior(const Eigen::MatrixXd& P_tilde, const Eigen::MatrixXd& simplex,
                               double tol) {
  Eigen::MatrixXd bary = barycentric_coordinates(P_tilde, simplex);
  InteriorSplit split;
  for (Eigen::Index j = 0; j < bary.cols(); ++j) {
    const bool inside =
        bary.col(j).minCoeff() > tol && std::abs(bary.col(j).sum() - 1.0) <= tol;
    (inside ? split.discarded : split.retained).push_back(j);
  }
  return split;
}

Eigen::RowVectorXd equality_constant(const Eigen::MatrixXd& P_tilde) {
  const Eigen::Index K = P_tilde.rows();
  if (P_tilde.cols() < K) throw DegeneracyError("fewer points than coordinates");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P_tilde);
  qr.setThreshold(1e-12);
  if (qr.rank() < K) {
    throw DegeneracyError("points span only " + std::to_string(qr.rank()) + " of " +
                          std::to_string(K) + " dimensions");
  }
  Eigen::MatrixXd PK(K, K);
  for (Eigen::Index j = 0; j < K; ++j) PK.col(j) = P_tilde.col(qr.colsPermutation().indices()(j));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(K);
  return PK.transpose().partialPivLu().solve(ones).transpose();
}

double log_abs_det(const Eigen::MatrixXd& Q) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Q);
  return lu.matrixLU().diagonal().cwiseAbs().array().log().sum();
}

Eigen::MatrixXd clamp_coefficients(Eigen::MatrixXd A, double tol) {
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index k = 0; k < A.rows(); ++k) {
      if (A(k, j) < 0.0 && A(k, j) > -tol) A(k, j) = 0.0;
    }
    const double s = A.col(j).sum();
    if (s != 0.0) A.col(j) /= s;
  }
  return A;
}

// One local ascent from the VCA simplex drawn with `vca`.
static SimplexModel solve_from(const Eigen::MatrixXd& P_tilde, const MvsaConfig& config,
                               const VcaResult& vca, const Eigen::RowVectorXd& c) {
  const int K = config.K;
  const double tol = config.constraint_tolerance;

  SimplexModel model;
  model.c = c;
  model.vca_indices = vca.selected_indices;
  const Eigen::MatrixXd start = expand_simplex(vca.M0, config.expansion_factor);
  model.split = discard_interior(P_tilde, start, tol);
  const Eigen::MatrixXd Y = select_columns(P_tilde, model.split.retained);
  auto retained_rank = [&] {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Y);
    qr.setThreshold(1e-12);
    return qr.rank();
  };
  if (Y.cols() < K || retained_rank() < K) {
    throw DegeneracyError("expansion factor " + std::to_string(config.expansion_factor) +
                          " leaves " + std::to_string(Y.cols()) +
                          " retained points; K=" + std::to_string(K) +
                          " affinely independent ones are needed to bound the simplex");
  }

  // Feasible start: inflate about the centroid until every retained point is enclosed.
  Eigen::MatrixXd Q;
  double scale = 1.0;
  for (int doubling = 0;; ++doubling) {
    Q = expand_simplex(start, scale - 1.0).inverse();
    if ((Q * Y).minCoeff() >= -tol) {
      model.repair_doublings = doubling;
      break;
    }
    if (doubling == kMaxRepairDoublings) {
      throw FeasibilityError("start simplex still excludes points after " +
                             std::to_string(kMaxRepairDoublings) + " doublings");
    }
    scale *= 2.0;
  }
  if ((Q.colwise().sum() - model.c).norm() > 1e-8 * std::max(1.0, model.c.norm())) {
    throw DegeneracyError("start simplex is inconsistent with the affine hyperplane");
  }

  double f = log_abs_det(Q);
  if (!std::isfinite(f)) throw NumericalError("non-finite objective at start:\n" + describe(Q));
  model.objective_trace.push_back(f);
  model.stop_reason = "max_iterations";

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(K, K);
  DirectionSolver direction(K);
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const Eigen::MatrixXd A = Q * Y;
    direction.reset(A);
    const Eigen::MatrixXd W = direction.solve(A, I);
    if (!(W.trace() > 1e-15) || W.norm() <= 1e-14) {
      model.converged = true;
      model.stop_reason = "stationary";
      break;
    }
    const double slope = W.trace();

    const double t0 = preferred_step(W, A);
    bool accepted = false;
    double t = t0;
    double f_next = f;
    Eigen::MatrixXd Q_next;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      Q_next = (I + t * W) * Q;
      f_next = log_abs_det(Q_next);
      if (!std::isfinite(f_next)) {
        throw NumericalError("non-finite objective at iteration " + std::to_string(iter) +
                             ", step " + std::to_string(t) + ":\nQ =\n" + describe(Q) +
                             "\nW =\n" + describe(W));
      }
      if (f_next >= f + kArmijo * t * slope && (Q_next * Y).minCoeff() >= -tol) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      model.converged = true;
      model.stop_reason = "no_ascent_step";
      break;
    }
    const double gain = f_next - f;
    Q = std::move(Q_next);
    f = f_next;
    model.objective_trace.push_back(f);
    model.iterations = iter + 1;
    if (gain < config.objective_tolerance) {
      model.converged = true;
      model.stop_reason = "objective_tolerance";
      break;
    }
  }

  model.Q = Q;
  model.V_tilde = Q.inverse();
  Eigen::MatrixXd raw = Q * P_tilde;
  const double pnorm = P_tilde.norm();
  model.reconstruction_error =
      (P_tilde - model.V_tilde * raw).norm() / (pnorm > 0.0 ? pnorm : 1.0);
  model.min_coefficient_retained = select_columns(raw, model.split.retained).minCoeff();
  model.min_coefficient_discarded =
      model.split.discarded.empty() ? 0.0
                                    : select_columns(raw, model.split.discarded).minCoeff();
  model.A = clamp_coefficients(std::move(raw), tol);
  return model;
}

SimplexModel solve_mvsa(const Eigen::MatrixXd& P_tilde, const MvsaConfig& config) {
  config.validate();
  const int K = config.K;
  if (P_tilde.rows() != K) {
    throw ShapeError("projected points have " + std::to_string(P_tilde.rows()) +
                     " coordinates, expected K=" + std::to_string(K));
  }
  const Eigen::RowVectorXd c = equality_constant(P_tilde);
  if (((c * P_tilde).array() - 1.0).abs().maxCoeff() > 1e-8) {
    throw DegeneracyError("projected points do not lie on a common affine hyperplane");
  }

  // Starts from consecutive VCA seeds; the largest final log|det Q| wins, ties to the earliest.
  std::optional<SimplexModel> best;
  std::set<std::vector<Eigen::Index>> tried;
  for (int r = 0; r < config.restarts; ++r) {
    VcaResult vca = vca_init(P_tilde, K, config.rng_seed + static_cast<std::uint64_t>(r));
    std::vector<Eigen::Index> key = vca.selected_indices;
    std::sort(key.begin(), key.end());
    if (!tried.insert(key).second) continue;
    if (!best) {
      best = solve_from(P_tilde, config, vca, c);
      continue;
    }
    try {
      SimplexModel m = solve_from(P_tilde, config, vca, c);
      if (m.objective_trace.back() > best->objective_trace.back()) best = std::move(m);
    } catch (const DegeneracyError&) {
    } catch (const FeasibilityError&) {
    }
  }
  best->starts = static_cast<int>(tried.size());
  return std::move(*best);
}

SimplexModel solve_mvsa(const ProjectedPoints& points, const ProjectionBasis& basis,
                        const MvsaConfig& config) {
  SimplexModel model = solve_mvsa(points.P_tilde, config);
  model.V = lift_to_original(model.V_tilde, basis);
  return model;
}

Eigen::MatrixXd decompose(const Eigen::MatrixXd& P_tilde, const SimplexModel& model,
                          double constraint_tolerance) {
  if (P_tilde.rows() != model.K()) {
    throw ShapeError("points have " + std::to_string(P_tilde.rows()) +
                     " coordinates, model has K=" + std::to_string(model.K()));
  }
  return clamp_coefficients(model.Q * P_tilde, constraint_tolerance);
}

}  // namespace cpm
