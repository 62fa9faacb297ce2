#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "covmax/data_matrix.hpp"
#include "oracles.hpp"

namespace test_support {

inline oracle_ref::Grid to_grid(const covmax::DataMatrix& x) {
  oracle_ref::Grid g(x.n(), std::vector<double>(x.m()));
  for (std::size_t k = 0; k < x.n(); ++k)
    for (std::size_t i = 0; i < x.m(); ++i) g[k][i] = x(k, i);
  return g;
}

inline covmax::DataMatrix random_integer_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m, int lo = -9,
                                                int hi = 9) {
  std::uniform_int_distribution<int> cell(lo, hi);
  Eigen::MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < v.rows(); ++k)
    for (Eigen::Index i = 0; i < v.cols(); ++i) v(k, i) = cell(rng);
  return covmax::DataMatrix(std::move(v));
}

inline covmax::DataMatrix random_normal_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < v.rows(); ++k)
    for (Eigen::Index i = 0; i < v.cols(); ++i) v(k, i) = z(rng);
  return covmax::DataMatrix(std::move(v));
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

/// Rows of N(0, Sigma) via Cholesky; deterministic in rng.
inline covmax::DataMatrix gaussian_rows(std::mt19937_64& rng, std::size_t n, const Eigen::MatrixXd& sigma) {
  const Eigen::MatrixXd l = sigma.llt().matrixL();
  std::normal_distribution<double> z;
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), sigma.rows());
  for (Eigen::Index k = 0; k < g.rows(); ++k)
    for (Eigen::Index i = 0; i < g.cols(); ++i) g(k, i) = z(rng);
  return covmax::DataMatrix(g * l.transpose());
}

}  // namespace test_support
