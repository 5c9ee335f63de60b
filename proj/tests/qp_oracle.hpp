#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

// Independent brute-force oracle for the minimum-norm weight problem:
// projected gradient descent on ||w||^2 over the affine feasible set
// {A w = e_1}. The feasible start comes from a partially-pivoted square
// solve on the first (degree+1) coordinates; the projector uses a
// Gram-Schmidt orthonormal basis of the constraint rows. Deliberately
// shares no code with edge::solve_weights beyond Eigen storage.
inline Eigen::VectorXd qp_oracle_min_norm(const Eigen::VectorXd& t, int degree) {
  const int rows = degree + 1;
  const int cols = static_cast<int>(t.size());
  Eigen::MatrixXd a(rows, cols);
  for (int j = 0; j < cols; ++j) {
    double p = 1.0;
    for (int i = 0; i < rows; ++i) {
      a(i, j) = p;
      p *= t[j];
    }
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  b[0] = 1.0;

  Eigen::MatrixXd sq(rows, rows + 1);
  sq.leftCols(rows) = a.leftCols(rows);
  sq.col(rows) = b;
  for (int col = 0; col < rows; ++col) {
    int pivot = col;
    for (int r = col + 1; r < rows; ++r) {
      if (std::abs(sq(r, col)) > std::abs(sq(pivot, col))) pivot = r;
    }
    sq.row(col).swap(sq.row(pivot));
    for (int r = 0; r < rows; ++r) {
      if (r == col) continue;
      const double f = sq(r, col) / sq(col, col);
      sq.row(r) -= f * sq.row(col);
    }
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < rows; ++i) w[i] = sq(i, rows) / sq(i, i);

  std::vector<Eigen::VectorXd> q;
  for (int i = 0; i < rows; ++i) {
    Eigen::VectorXd v = a.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : q) v -= u.dot(v) * u;
    }
    if (v.norm() > 1e-13) q.push_back(v / v.norm());
  }
  auto project_feasible = [&](Eigen::VectorXd v) {
    Eigen::VectorXd delta = v - w;
    for (const auto& u : q) delta -= u.dot(delta) * u;
    return (w + delta).eval();
  };

  Eigen::VectorXd cur = w;
  const double step = 0.2;
  for (int iter = 0; iter < 20000; ++iter) {
    Eigen::VectorXd next = project_feasible(cur - step * 2.0 * cur);
    if ((next - cur).lpNorm<Eigen::Infinity>() < 1e-14) {
      cur = next;
      break;
    }
    cur = next;
  }
  return cur;
}
