#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "covmax/data_matrix.hpp"
#include "covmax/rng.hpp"

namespace covmax::process {

enum class InnovationKind { StandardNormal, StandardizedUniform, StandardizedStudentT, Rademacher };

/// Mean-zero, unit-variance innovation law.
class InnovationDist {
 public:
  static InnovationDist normal() noexcept { return InnovationDist(InnovationKind::StandardNormal, 0.0); }
  static InnovationDist uniform() noexcept { return InnovationDist(InnovationKind::StandardizedUniform, 0.0); }
  static InnovationDist rademacher() noexcept { return InnovationDist(InnovationKind::Rademacher, 0.0); }
  /// Student t rescaled to unit variance. Requires df > 8.
  static InnovationDist student_t(double df);

  [[nodiscard]] InnovationKind kind() const noexcept { return kind_; }
  [[nodiscard]] double df() const noexcept { return df_; }
  /// E eps^4 - 3.
  [[nodiscard]] double kappa4() const noexcept;
  [[nodiscard]] std::string_view name() const noexcept;

  friend bool operator==(const InnovationDist&, const InnovationDist&) = default;

 private:
  InnovationDist(InnovationKind kind, double df) noexcept : kind_(kind), df_(df) {}

  InnovationKind kind_;
  double df_;
};

/// Draws standardized innovations. Holds distribution state, so create one
/// per stream.
class InnovationSampler {
 public:
  explicit InnovationSampler(const InnovationDist& dist);

  double operator()(Engine& engine);

 private:
  InnovationKind kind_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_;
  std::student_t_distribution<double> student_{10.0};
  double t_scale_ = 1.0;
};

/// X_i = sum_{j=0..J} a_j eps_{i-j}, coefficients normalized to unit sum of squares.
class StationaryLinearSpec {
 public:
  /// Rescales coeffs to sum of squares one. Throws if empty, non-finite or all zero.
  StationaryLinearSpec(std::vector<double> coeffs, InnovationDist innovations);

  [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] std::size_t lag() const noexcept { return coeffs_.size() - 1; }
  [[nodiscard]] const InnovationDist& innovations() const noexcept { return innovations_; }

 private:
  std::vector<double> coeffs_;
  InnovationDist innovations_;
};

/**
 * @brief X_i = sum_{t=-T..T} f_{i,t} eps_{i-t} for i = 0..m-1.
 *
 * The coefficient table is stored as an m x (2T+1) matrix whose column
 * t + T holds lag t. Each row is rescaled to unit sum of squares.
 */
class NonstationaryLinearSpec {
 public:
  NonstationaryLinearSpec(Eigen::MatrixXd f, std::size_t half_width, InnovationDist innovations);

  static NonstationaryLinearSpec iid(std::size_t m, InnovationDist innovations);
  /// f_{i,t} = a_t for t = 0..J, zero for negative lags.
  static NonstationaryLinearSpec from_stationary(const StationaryLinearSpec& spec, std::size_t m);

  [[nodiscard]] std::size_t m() const noexcept { return static_cast<std::size_t>(f_.rows()); }
  [[nodiscard]] std::size_t half_width() const noexcept { return half_width_; }
  [[nodiscard]] double f(std::size_t i, std::ptrdiff_t t) const;
  [[nodiscard]] const Eigen::MatrixXd& table() const noexcept { return f_; }
  [[nodiscard]] const InnovationDist& innovations() const noexcept { return innovations_; }

  /// Loading of X_i on innovation u, with u shifted by T so columns run
  /// over 0..m+2T-1. Row i is f_{i, i-u}.
  [[nodiscard]] Eigen::MatrixXd loadings() const;

 private:
  Eigen::MatrixXd f_;
  std::size_t half_width_;
  InnovationDist innovations_;
};

[[nodiscard]] DataMatrix gen_iid(std::size_t n, std::size_t m, const InnovationDist& dist,
                                 std::uint64_t seed);

[[nodiscard]] DataMatrix gen_stationary_linear(std::size_t n, std::size_t m,
                                               const StationaryLinearSpec& spec, std::uint64_t seed);

[[nodiscard]] DataMatrix gen_nonstationary_linear(std::size_t n, const NonstationaryLinearSpec& spec,
                                                  std::uint64_t seed);

enum class LongMemoryVariant { PowerLaw, BoundaryLog };

/**
 * Raw (unnormalized) long-memory coefficients a_0..a_J.
 *
 * PowerLaw: a_0 = 1, a_i = i^-beta, beta in (1/2, 1].
 * BoundaryLog: a_i = i^-1/2 (log i)^-2 for i >= 2, with a_0 = a_1 = 1
 * since the formula is undefined there; beta is ignored.
 */
[[nodiscard]] std::vector<double> raw_long_memory_coeffs(double beta, std::size_t lag,
                                                         LongMemoryVariant variant);

/// raw_long_memory_coeffs rescaled to unit sum of squares.
[[nodiscard]] std::vector<double> long_memory_coeffs(double beta, std::size_t lag,
                                                     LongMemoryVariant variant);

/// phi^j for j = 0..J, rescaled; lag-k correlation is phi^k up to truncation.
[[nodiscard]] std::vector<double> ar1_coeffs(double phi, std::size_t lag);

/// Toeplitz sigma_ij = sum_j a_j a_{j+|i-j|}.
[[nodiscard]] Eigen::MatrixXd true_cov_stationary(const StationaryLinearSpec& spec, std::size_t m);

/**
 * @brief Exact second- and fourth-order moments of a linear process.
 *
 * sigma_ij = sum_u c_i(u) c_j(u) and Cum(i,j,k,l) = kappa4 sum_u c_i c_j c_k c_l,
 * where c_i(u) = f_{i, i-u} is the loading of X_i on innovation u.
 */
class LinearMoments {
 public:
  explicit LinearMoments(const NonstationaryLinearSpec& spec);

  [[nodiscard]] std::size_t m() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }
  [[nodiscard]] double kappa4() const noexcept { return kappa4_; }
  [[nodiscard]] const Eigen::MatrixXd& covariance() const noexcept { return sigma_; }
  [[nodiscard]] double sigma(std::size_t i, std::size_t j) const;
  [[nodiscard]] double cum4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;
  /// Cov(X_i X_j, X_k X_l).
  [[nodiscard]] double cov_products(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;
  /// Var(X_i X_j). Throws Kappa4Boundary when kappa4 <= -2 leaves it non-positive.
  [[nodiscard]] double tau(std::size_t i, std::size_t j) const;

 private:
  void check(std::size_t i) const;

  Eigen::MatrixXd loadings_;
  Eigen::MatrixXd sigma_;
  double kappa4_;
};

[[nodiscard]] Eigen::MatrixXd true_cov_linear(const NonstationaryLinearSpec& spec);
[[nodiscard]] double cum4_linear(const NonstationaryLinearSpec& spec, std::size_t i, std::size_t j,
                                 std::size_t k, std::size_t l);
[[nodiscard]] double cov_products(const NonstationaryLinearSpec& spec, std::size_t i, std::size_t j,
                                  std::size_t k, std::size_t l);
[[nodiscard]] double true_tau_linear(const NonstationaryLinearSpec& spec, std::size_t i, std::size_t j);

}  // namespace covmax::process
