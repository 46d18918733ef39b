#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Dirichlet(alpha, ..., alpha) draw via normalized gamma variates.
inline Eigen::VectorXd dirichlet(std::mt19937_64& rng, int K, double alpha = 1.0) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  Eigen::VectorXd w(K);
  for (int k = 0; k < K; ++k) w(k) = gamma(rng);
  return w / w.sum();
}

/// Weights with `pure` on vertex k and the rest spread at random over the others.
inline Eigen::VectorXd near_pure(std::mt19937_64& rng, int K, int k, double pure) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(K);
  if (K > 1) {
    Eigen::VectorXd rest = dirichlet(rng, K - 1);
    for (int j = 0, r = 0; j < K; ++j) {
      if (j != k) w(j) = (1.0 - pure) * rest(r++);
    }
  }
  w(k) = pure;
  return w;
}

/// Planar points stored as columns (x, y, 1), the layout the simplex solver expects for K = 3.
inline Eigen::MatrixXd lift_planar(const Eigen::MatrixXd& xy) {
  Eigen::MatrixXd out(3, xy.cols());
  out.topRows(2) = xy;
  out.row(2).setOnes();
  return out;
}

struct MixtureSample {
  Eigen::MatrixXd points;   // K x M, V * W
  Eigen::MatrixXd weights;  // K x M
};

/// Dirichlet(1) mixtures of the columns of V with `pure_per_vertex` near-pure points per
/// vertex (mixing weight drawn from [0.95, 0.99]) placed first.
inline MixtureSample mixture(const Eigen::MatrixXd& V, int M, int pure_per_vertex,
                             std::uint64_t seed) {
  const int K = static_cast<int>(V.cols());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> purity(0.95, 0.99);
  MixtureSample s;
  s.weights.resize(K, M);
  int j = 0;
  for (int k = 0; k < K; ++k) {
    for (int p = 0; p < pure_per_vertex && j < M; ++p) s.weights.col(j++) = near_pure(rng, K, k, purity(rng));
  }
  for (; j < M; ++j) s.weights.col(j) = dirichlet(rng, K);
  s.points = V * s.weights;
  return s;
}

/// Random whitespace corpus over a closed vocabulary "w0".."w{vocab-1}".
inline std::vector<std::string> random_lines(std::mt19937_64& rng, int lines, int vocab,
                                             int max_len) {
  std::uniform_int_distribution<int> word(0, vocab - 1);
  std::uniform_int_distribution<int> len(1, max_len);
  std::vector<std::string> out;
  for (int i = 0; i < lines; ++i) {
    std::string line;
    for (int t = len(rng); t > 0; --t) {
      if (!line.empty()) line += ' ';
      line += "w" + std::to_string(word(rng));
    }
    out.push_back(line);
  }
  return out;
}

/// Hungarian-free matching for small K: best permutation by total squared distance.
inline double max_matched_distance(const Eigen::MatrixXd& fitted, const Eigen::MatrixXd& truth) {
  const int K = static_cast<int>(truth.cols());
  std::vector<int> perm(K);
  for (int k = 0; k < K; ++k) perm[k] = k;
  double best_total = 1e300, best_max = 1e300;
  do {
    double total = 0, worst = 0;
    for (int k = 0; k < K; ++k) {
      double d = (fitted.col(perm[k]) - truth.col(k)).norm();
      total += d * d;
      worst = std::max(worst, d);
    }
    if (total < best_total) {
      best_total = total;
      best_max = worst;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best_max;
}

}  // namespace oracle
