#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "covmax/data_matrix.hpp"
#include "covmax/pair.hpp"
#include "covmax/pair_index.hpp"

namespace covmax::core {

struct PairStats {
  double sigma_hat = 0.0;
  double tau_hat = 0.0;
};

/**
 * @brief Column-centered copy of a data matrix.
 *
 * Means are accumulated in long double and subtracted once; every pair
 * statistic is then a two-pass computation over centered columns (mean of
 * products, then mean squared deviation of the products).
 */
class CenteredData {
 public:
  explicit CenteredData(const DataMatrix& x);

  [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(centered_.rows()); }
  [[nodiscard]] std::size_t m() const noexcept { return static_cast<std::size_t>(centered_.cols()); }

  [[nodiscard]] PairStats pair_stats(std::size_t i, std::size_t j) const;
  /// (1/n) sum_k (X_ki - mean_i)^2.
  [[nodiscard]] double second_moment(std::size_t i) const;
  [[nodiscard]] const Eigen::MatrixXd& centered() const noexcept { return centered_; }

 private:
  Eigen::MatrixXd centered_;
};

/// sigma_hat = (1/n) (x_i - mean_i)^T (x_j - mean_j). Zero-based indices.
[[nodiscard]] double sample_cov_pair(const DataMatrix& x, std::size_t i, std::size_t j);

/// tau_hat = (1/n) |(x_i - mean_i) o (x_j - mean_j) - sigma_hat 1|^2.
[[nodiscard]] double tau_hat_pair(const DataMatrix& x, std::size_t i, std::size_t j);

[[nodiscard]] PairStats pair_stats(const DataMatrix& x, std::size_t i, std::size_t j);

/// Full m x m sample covariance with divisor n.
[[nodiscard]] Eigen::MatrixXd sample_covariance(const DataMatrix& x);

enum class NullKind { Zero, Identity, Explicit, Toeplitz };

/// Hypothesized covariance sigma_ij under H0.
class NullCovariance {
 public:
  static NullCovariance zero();
  static NullCovariance identity();
  /// Throws InvalidArgument unless square, finite and symmetric.
  static NullCovariance explicit_matrix(Eigen::MatrixXd sigma0);
  /// gamma[l] is the lag-l autocovariance; gamma[0] must be positive.
  static NullCovariance toeplitz(std::vector<double> gamma);

  [[nodiscard]] NullKind kind() const noexcept { return kind_; }
  [[nodiscard]] double sigma(std::size_t i, std::size_t j) const;
  /// Throws InvalidArgument if this null cannot supply every pair of an m-column matrix.
  void require_dimension(std::size_t m) const;

 private:
  NullCovariance(NullKind kind, Eigen::MatrixXd matrix, std::vector<double> gamma);

  NullKind kind_;
  Eigen::MatrixXd matrix_;
  std::vector<double> gamma_;
};

/// TheoremConstants are written in terms of the dimension m (valid for the full
/// pair sets); CardinalityConstants in terms of the set size s.
enum class Normalization { TheoremConstants, CardinalityConstants };

[[nodiscard]] std::string_view to_string(Normalization mode) noexcept;

/// Dimension-based (m) constants for the canonical full sets, cardinality constants for
/// band exteriors and custom subsets.
[[nodiscard]] Normalization default_normalization(IndexKind kind) noexcept;

struct MaxDeviation {
  double statistic = 0.0;
  Pair argmax;
};

/// 1e-12 times the squared largest column second moment.
[[nodiscard]] double default_tau_floor(const CenteredData& data);

/**
 * @brief max over idx of |sigma_hat_ij - sigma_ij| / sqrt(tau_hat_ij).
 *
 * Ties go to the first pair in row-major order. Throws DegenerateVariance
 * on the first pair whose tau_hat is below the floor (or not positive).
 */
[[nodiscard]] MaxDeviation max_deviation(const DataMatrix& x, const NullCovariance& null,
                                         const PairIndexSet& idx,
                                         std::optional<double> tau_floor = std::nullopt);

[[nodiscard]] MaxDeviation max_deviation(const CenteredData& data, const NullCovariance& null,
                                         const PairIndexSet& idx,
                                         std::optional<double> tau_floor = std::nullopt);

/// y - n * stat^2: the additive normalization constant.
[[nodiscard]] double normalization_offset(std::size_t s, Normalization mode, std::size_t m);

/**
 * TheoremConstants:     y = n stat^2 - 4 log m + log log m + log(8 pi)
 * CardinalityConstants: y = n stat^2 - 2 log s + log log s + log(pi)
 *
 * Throws CardinalityTooSmall when s < 3, or m < 3 with TheoremConstants.
 */
[[nodiscard]] double gumbel_normalize(double statistic, std::size_t n, std::size_t s,
                                      Normalization mode, std::size_t m);

/// exp(-exp(-y/2)).
[[nodiscard]] double gumbel_cdf(double y) noexcept;

/// 1 - gumbel_cdf(y), computed without cancellation.
[[nodiscard]] double gumbel_survival(double y) noexcept;

/// y with gumbel_cdf(y) = 1 - alpha. Throws InvalidArgument outside (0, 1).
[[nodiscard]] double gumbel_quantile(double alpha);

struct TestResult {
  double statistic = 0.0;
  std::size_t cardinality = 0;
  double normalized = 0.0;
  double p_value = 1.0;
  Pair argmax;
  Normalization normalization = Normalization::TheoremConstants;
  IndexKind index_kind = IndexKind::StrictPairs;
  std::size_t n = 0;
  std::size_t m = 0;

  [[nodiscard]] bool rejects(double alpha) const noexcept { return p_value <= alpha; }
};

/// max_deviation, then Gumbel normalization, then p = 1 - gumbel_cdf(y).
[[nodiscard]] TestResult run_test(const DataMatrix& x, const NullCovariance& null,
                                  const PairIndexSet& idx,
                                  std::optional<Normalization> mode = std::nullopt);

}  // namespace covmax::core
