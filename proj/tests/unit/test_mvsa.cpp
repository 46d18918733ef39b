#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cpm/error.hpp"
#include "cpm/mvsa.hpp"
#include "min_triangle.hpp"
#include "synthetic.hpp"

using namespace cpm;

namespace {

MvsaConfig config_for(int K) {
  MvsaConfig c;
  c.K = K;
  return c;
}

Eigen::MatrixXd unit_triangle() {
  Eigen::MatrixXd xy(2, 3);
  xy << 0, 1, 0,
        0, 0, 1;
  return oracle::lift_planar(xy);
}

void check_model_invariants(const Eigen::MatrixXd& P_tilde, const SimplexModel& m, double tol) {
  const int K = m.K();
  CHECK((m.Q * m.V_tilde - Eigen::MatrixXd::Identity(K, K)).norm() <= 1e-8);
  for (Eigen::Index j : m.split.retained) CHECK(m.A.col(j).minCoeff() >= -tol);
  CHECK(m.min_coefficient_retained >= -tol);
  CHECK((m.A.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-8);
  CHECK(m.reconstruction_error <= 1e-6);
  CHECK((P_tilde - m.V_tilde * m.A).norm() / P_tilde.norm() <= 1e-6);
  CHECK((m.Q.colwise().sum() - m.c).norm() <= 1e-8 * std::max(1.0, m.c.norm()));
  for (std::size_t i = 1; i < m.objective_trace.size(); ++i) {
    CHECK(m.objective_trace[i] >= m.objective_trace[i - 1] - 1e-9);
  }
}

}  // namespace

TEST_SUITE("mvsa") {

TEST_CASE("config validation") {
  MvsaConfig c = config_for(1);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_for(3);
  c.expansion_factor = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_for(3);
  c.objective_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_for(3);
  c.constraint_tolerance = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_for(3);
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_for(3);
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_NOTHROW(config_for(2).validate());
}

TEST_CASE("VCA never picks the centroid of a triangle") {
  Eigen::MatrixXd P(3, 4);
  P.leftCols(3) = unit_triangle();
  P.col(3) = unit_triangle().rowwise().mean();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    VcaResult r = vca_init(P, 3, seed);
    std::set<Eigen::Index> chosen(r.selected_indices.begin(), r.selected_indices.end());
    CHECK(chosen == std::set<Eigen::Index>{0, 1, 2});
    CHECK(std::abs(r.M0.determinant()) > 1e-10);
  }
}

TEST_CASE("VCA is deterministic per seed and picks distinct columns") {
  std::mt19937_64 rng(37);
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(4, 4);
  auto s = oracle::mixture(V, 200, 3, 41);
  VcaResult a = vca_init(s.points, 4, 99), b = vca_init(s.points, 4, 99);
  CHECK(a.selected_indices == b.selected_indices);
  std::set<Eigen::Index> distinct(a.selected_indices.begin(), a.selected_indices.end());
  CHECK(distinct.size() == 4);
  CHECK(vca_init(s.points, 1, 5).selected_indices.size() == 1);
}

TEST_CASE("VCA rejects degenerate inputs") {
  Eigen::MatrixXd P(3, 5);
  P << 1, 2, 3, 4, 5,
       2, 4, 6, 8, 10,
       1, 1, 1, 1, 1;  // all on one line
  CHECK_THROWS_AS(vca_init(P, 3, 1), DegeneracyError);
  CHECK_THROWS_AS(vca_init(unit_triangle().leftCols(2), 3, 1), DegeneracyError);
}

TEST_CASE("expansion") {
  Eigen::MatrixXd T = unit_triangle();
  CHECK(expand_simplex(T, 0.0) == T);
  Eigen::MatrixXd E = expand_simplex(T, 0.2);
  Eigen::VectorXd g = T.rowwise().mean();
  for (int k = 0; k < 3; ++k) {
    CHECK((E.col(k) - g).norm() == doctest::Approx(1.2 * (T.col(k) - g).norm()).epsilon(1e-14));
  }
  CHECK_THROWS_AS(expand_simplex(T, -1.0), ConfigError);

  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Random(3, 3);
    S.row(2).setOnes();
    Eigen::MatrixXd pts(3, 50);
    for (int j = 0; j < 50; ++j) pts.col(j) = S * oracle::dirichlet(rng, 3);
    CHECK(barycentric_coordinates(pts, expand_simplex(S, 0.2)).minCoeff() >= 0.0);
  }
}

TEST_CASE("interior discard keeps the boundary") {
  Eigen::MatrixXd T = unit_triangle();
  Eigen::MatrixXd pts(3, 4);
  pts.col(0) = T.rowwise().mean();             // centroid
  pts.col(1) = T.col(1);                       // vertex
  pts.col(2) = 0.5 * (T.col(0) + T.col(2));    // edge midpoint
  pts.col(3) << 2.0, 2.0, 1.0;                 // outside
  InteriorSplit s = discard_interior(pts, T, 1e-8);
  CHECK(s.discarded == std::vector<Eigen::Index>{0});
  CHECK(s.retained == std::vector<Eigen::Index>{1, 2, 3});
  Eigen::MatrixXd flat = T;
  flat.col(2) = T.col(1);
  CHECK_THROWS_AS(discard_interior(pts, flat, 1e-8), DegeneracyError);
}

TEST_CASE("two vertices on a line reach the extreme points") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-3.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd P(2, 30);
    for (int j = 0; j < 30; ++j) P.col(j) << u(rng), 1.0;
    SimplexModel m = solve_mvsa(P, config_for(2));
    double lo = P.row(0).minCoeff(), hi = P.row(0).maxCoeff();
    Eigen::Vector2d ends(m.V_tilde(0, 0) / m.V_tilde(1, 0), m.V_tilde(0, 1) / m.V_tilde(1, 1));
    if (ends(0) > ends(1)) std::swap(ends(0), ends(1));
    CHECK(std::abs(ends(0) - lo) <= 1e-6);
    CHECK(std::abs(ends(1) - hi) <= 1e-6);
    check_model_invariants(P, m, 1e-8);
  }
}

TEST_CASE("recovers a known triangle from mixtures") {
  Eigen::MatrixXd xy(2, 3);
  xy << 0.1, 0.9, 0.3,
        0.1, 0.2, 0.8;
  Eigen::MatrixXd V = oracle::lift_planar(xy);
  auto s = oracle::mixture(V, 500, 5, 53);
  SimplexModel m = solve_mvsa(s.points, config_for(3));
  CHECK(oracle::max_matched_distance(m.V_tilde, V) <= 0.05);
  check_model_invariants(s.points, m, 1e-8);
  CHECK(m.converged);
}

TEST_CASE("planar fits are minimal against the exhaustive triangle search") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 6 + trial;
    Eigen::MatrixXd xy(2, n);
    std::vector<Eigen::Vector2d> pts;
    for (int j = 0; j < n; ++j) {
      xy.col(j) << u(rng), u(rng);
      pts.emplace_back(xy.col(j));
    }
    SimplexModel m = solve_mvsa(oracle::lift_planar(xy), config_for(3));
    Eigen::Matrix2d edges;
    Eigen::MatrixXd v = m.V_tilde.topRows(2).array().rowwise() / m.V_tilde.row(2).array();
    edges << v.col(1) - v.col(0), v.col(2) - v.col(0);
    const double area = 0.5 * std::abs(edges.determinant());
    CHECK(area <= 1.02 * oracle::min_enclosing_triangle_area(pts));
  }
}

TEST_CASE("restarts escape a poor local optimum") {
  Eigen::MatrixXd xy(2, 10);
  xy << -0.6224, 1.0113, -1.6681, -0.1985, -0.7967, 0.4906, -0.2538, -1.7435, -0.8480, -0.6188,
        0.2673, 0.6460, 0.5427, 0.3882, -0.4517, -0.0600, 1.1519, 0.0172, 0.6806, -0.0135;
  std::vector<Eigen::Vector2d> pts;
  for (Eigen::Index j = 0; j < xy.cols(); ++j) pts.emplace_back(xy.col(j));
  const double best = oracle::min_enclosing_triangle_area(pts);
  auto area = [](const SimplexModel& m) {
    Eigen::MatrixXd v = m.V_tilde.topRows(2).array().rowwise() / m.V_tilde.row(2).array();
    Eigen::Matrix2d e;
    e << v.col(1) - v.col(0), v.col(2) - v.col(0);
    return 0.5 * std::abs(e.determinant());
  };

  MvsaConfig single = config_for(3);
  single.restarts = 1;
  SimplexModel one = solve_mvsa(oracle::lift_planar(xy), single);
  CHECK(one.starts == 1);
  CHECK(area(one) > 1.02 * best);

  SimplexModel many = solve_mvsa(oracle::lift_planar(xy), config_for(3));
  CHECK(many.starts > 1);
  CHECK(area(many) <= 1.02 * best);
  CHECK(many.objective_trace.back() >= one.objective_trace.back());
}

TEST_CASE("higher-dimensional fits keep the invariants") {
  for (int K : {4, 6}) {
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(K, K) + 0.1 * Eigen::MatrixXd::Ones(K, K);
    auto s = oracle::mixture(V, 300, 4, static_cast<std::uint64_t>(K));
    SimplexModel m = solve_mvsa(s.points, config_for(K));
    check_model_invariants(s.points, m, 1e-8);
    CHECK(oracle::max_matched_distance(m.V_tilde, V) <= 0.1);
  }
}

TEST_CASE("expansion discards more and reports the discarded points") {
  Eigen::MatrixXd V = oracle::lift_planar((Eigen::MatrixXd(2, 3) << 0, 1, 0, 0, 0, 1).finished());
  auto s = oracle::mixture(V, 300, 5, 61);
  MvsaConfig plain = config_for(3), expanded = config_for(3);
  expanded.expansion_factor = 0.01;
  SimplexModel a = solve_mvsa(s.points, plain), b = solve_mvsa(s.points, expanded);
  CHECK(b.split.discarded.size() >= a.split.discarded.size());
  CHECK(b.split.retained.size() >= 3);
  CHECK(a.split.retained.size() + a.split.discarded.size() == 300);
  double worst = 0.0;
  for (Eigen::Index j : b.split.discarded) worst = std::min(worst, (b.Q * s.points.col(j)).minCoeff());
  CHECK(b.min_coefficient_discarded == doctest::Approx(worst).epsilon(1e-12));
  check_model_invariants(s.points, b, 1e-8);
}

TEST_CASE("an expansion that swallows every point is rejected") {
  Eigen::MatrixXd V = oracle::lift_planar((Eigen::MatrixXd(2, 3) << 0, 1, 0, 0, 0, 1).finished());
  auto s = oracle::mixture(V, 300, 5, 61);
  MvsaConfig c = config_for(3);
  c.expansion_factor = 5.0;
  CHECK_THROWS_AS(solve_mvsa(s.points, c), DegeneracyError);
}

TEST_CASE("fits are bit-for-bit deterministic") {
  auto s = oracle::mixture(Eigen::MatrixXd::Identity(4, 4), 200, 3, 67);
  SimplexModel a = solve_mvsa(s.points, config_for(4)), b = solve_mvsa(s.points, config_for(4));
  CHECK(a.Q == b.Q);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK(a.vca_indices == b.vca_indices);
}

TEST_CASE("decomposition identities") {
  auto s = oracle::mixture(Eigen::MatrixXd::Identity(3, 3) + 0.2 * Eigen::MatrixXd::Ones(3, 3), 200,
                           5, 71);
  SimplexModel m = solve_mvsa(s.points, config_for(3));
  Eigen::MatrixXd self = decompose(m.V_tilde, m);
  CHECK((self - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-6);
  Eigen::VectorXd centre = m.V_tilde.rowwise().mean();
  CHECK((decompose(centre, m).array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-8);

  std::mt19937_64 rng(73);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd w = oracle::dirichlet(rng, 3);
    CHECK((decompose(m.V_tilde * w, m) - w).cwiseAbs().maxCoeff() <= 1e-6);
  }
  CHECK_THROWS_AS(decompose(Eigen::MatrixXd::Ones(2, 3), m), ShapeError);
}

TEST_CASE("clamping") {
  Eigen::MatrixXd A(3, 2);
  A << -1e-9, 0.5,
       0.6, -0.1,
       0.4, 0.6;
  Eigen::MatrixXd C = clamp_coefficients(A, 1e-8);
  CHECK(C(0, 0) == 0.0);
  CHECK(C(1, 1) < 0.0);  // beyond tolerance, left alone
  CHECK((C.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("equality constant and objective") {
  Eigen::MatrixXd T = unit_triangle();
  Eigen::RowVectorXd c = equality_constant(T);
  CHECK((c * T - Eigen::RowVectorXd::Ones(3)).norm() <= 1e-12);
  CHECK(log_abs_det(2.0 * Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(3 * std::log(2.0)));
  Eigen::MatrixXd P(3, 4);
  P << 1, 2, 3, 4,
       1, 2, 3, 4,
       0, 0, 0, 0;
  CHECK_THROWS_AS(equality_constant(P), DegeneracyError);
}

TEST_CASE("points off a common hyperplane are rejected") {
  Eigen::MatrixXd P = Eigen::MatrixXd::Random(3, 20).cwiseAbs();
  CHECK_THROWS_AS(solve_mvsa(P, config_for(3)), DegeneracyError);
}

TEST_CASE("shape mismatch between K and the points") {
  CHECK_THROWS_AS(solve_mvsa(unit_triangle(), config_for(4)), ShapeError);
}

}  // TEST_SUITE
