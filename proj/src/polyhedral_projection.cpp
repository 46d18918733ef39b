#include "cpm/polyhedral_projection.hpp"

#include <cmath>
#include <limits>

#include "cpm/error.hpp"

namespace cpm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-12;
constexpr double kDependTol = 1e-12;

// Plane rotation acting on the pair (a, b) so that b becomes zero.
struct Givens {
  double c = 1.0;
  double s = 0.0;
  double h = 0.0;

  Givens(double a, double b) {
    h = std::hypot(a, b);
    if (h > 0.0) {
      c = a / h;
      s = b / h;
    }
  }
};

void rotate_columns(Eigen::MatrixXd& m, Eigen::Index i, Eigen::Index k, const Givens& g) {
  Eigen::VectorXd ci = m.col(i);
  m.col(i) = g.c * ci + g.s * m.col(k);
  m.col(k) = -g.s * ci + g.c * m.col(k);
}

class ActiveSet {
 public:
  explicit ActiveSet(Eigen::Index n) : J_(Eigen::MatrixXd::Identity(n, n)), R_(n, n) {
    R_.setZero();
  }

  Eigen::Index size() const { return q_; }
  Eigen::Index dim() const { return J_.rows(); }
  const Eigen::MatrixXd& J() const { return J_; }

  // d = J^T n for the constraint being considered.
  Eigen::VectorXd project(const Eigen::VectorXd& normal) const { return J_.transpose() * normal; }

  Eigen::VectorXd primal_direction(const Eigen::VectorXd& d) const {
    const Eigen::Index n = dim();
    return J_.rightCols(n - q_) * d.tail(n - q_);
  }

  Eigen::VectorXd dual_direction(const Eigen::VectorXd& d) const {
    if (q_ == 0) return {};
    return R_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(d.head(q_));
  }

  void add(Eigen::VectorXd d) {
    const Eigen::Index n = dim();
    for (Eigen::Index j = n - 1; j > q_; --j) {
      if (d(j) == 0.0) continue;
      Givens g(d(j - 1), d(j));
      d(j - 1) = g.h;
      d(j) = 0.0;
      rotate_columns(J_, j - 1, j, g);
    }
    R_.col(q_).head(q_ + 1) = d.head(q_ + 1);
    ++q_;
  }

  void remove(Eigen::Index l) {
    for (Eigen::Index j = l; j + 1 < q_; ++j) R_.col(j) = R_.col(j + 1);
    R_.col(q_ - 1).setZero();
    for (Eigen::Index j = l; j + 1 < q_; ++j) {
      Givens g(R_(j, j), R_(j + 1, j));
      for (Eigen::Index k = j; k + 1 < q_; ++k) {
        double a = R_(j, k);
        double b = R_(j + 1, k);
        R_(j, k) = g.c * a + g.s * b;
        R_(j + 1, k) = -g.s * a + g.c * b;
      }
      rotate_columns(J_, j, j + 1, g);
    }
    --q_;
  }

 private:
  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  Eigen::Index q_ = 0;
};

}  // namespace

PolyhedralProjection project_onto_polyhedron(const Eigen::VectorXd& z,
                                             const Eigen::MatrixXd& normals,
                                             const Eigen::VectorXd& offsets) {
  const Eigen::Index n = z.size();
  const Eigen::Index m = normals.cols();
  if (normals.rows() != n || offsets.size() != m) {
    throw ShapeError("polyhedron constraints do not match the point dimension");
  }

  Eigen::VectorXd norms = normals.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (norms(j) == 0.0 && offsets(j) > kFeasTol) {
      throw FeasibilityError("constraint 0 >= positive offset is unsatisfiable");
    }
  }

  ActiveSet set(n);
  Eigen::VectorXd x = z;
  std::vector<Eigen::Index> active;
  std::vector<double> u;
  std::vector<char> is_active(static_cast<std::size_t>(m), 0);

  const long max_steps = 20 * (m + n) + 100;
  long steps = 0;

  for (;;) {
    // Most violated constraint, measured as signed distance to its hyperplane.
    Eigen::Index p = -1;
    double worst = -kFeasTol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (is_active[static_cast<std::size_t>(j)] || norms(j) == 0.0) continue;
      double s = (normals.col(j).dot(x) - offsets(j)) / norms(j);
      if (s < worst) {
        worst = s;
        p = j;
      }
    }
    if (p < 0) break;

    const Eigen::VectorXd np = normals.col(p);
    double s_p = np.dot(x) - offsets(p);
    double u_p = 0.0;

    for (;;) {
      if (++steps > max_steps) {
        throw NumericalError("polyhedral projection did not terminate");
      }
      Eigen::VectorXd d = set.project(np);
      Eigen::VectorXd step = set.primal_direction(d);
      Eigen::VectorXd r = set.dual_direction(d);

      double t1 = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index l = 0; l < set.size(); ++l) {
        if (r(l) > 0.0) {
          double t = u[static_cast<std::size_t>(l)] / r(l);
          if (t < t1) {
            t1 = t;
            drop = l;
          }
        }
      }
      double t2 = kInf;
      const double dz = step.dot(np);
      if (step.norm() > kDependTol * norms(p) && dz > 0.0) {
        t2 = -s_p / dz;
      }
      if (t1 == kInf && t2 == kInf) {
        throw FeasibilityError("polyhedron is empty");
      }

      const double t = std::min(t1, t2);
      for (Eigen::Index l = 0; l < set.size(); ++l) u[static_cast<std::size_t>(l)] -= t * r(l);
      u_p += t;

      if (t2 == kInf) {
        // Dual-only step: np depends on the active normals, release one of them.
        is_active[static_cast<std::size_t>(active[static_cast<std::size_t>(drop)])] = 0;
        active.erase(active.begin() + drop);
        u.erase(u.begin() + drop);
        set.remove(drop);
        continue;
      }

      x += t * step;
      if (t2 <= t1) {
        set.add(d);
        active.push_back(p);
        u.push_back(u_p);
        is_active[static_cast<std::size_t>(p)] = 1;
        break;
      }
      is_active[static_cast<std::size_t>(active[static_cast<std::size_t>(drop)])] = 0;
      active.erase(active.begin() + drop);
      u.erase(u.begin() + drop);
      set.remove(drop);
      s_p = np.dot(x) - offsets(p);
    }
  }

  PolyhedralProjection out;
  out.point = std::move(x);
  out.active = std::move(active);
  out.multipliers = Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  out.tangent_basis = set.J().rightCols(n - set.size());
  return out;
}

}  // namespace cpm
