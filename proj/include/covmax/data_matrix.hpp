#pragma once

#include <cstddef>
#include <initializer_list>

#include <Eigen/Dense>

namespace covmax {

/**
 * @brief n x m sample matrix whose rows are i.i.d. observations.
 *
 * Entry (k, i) is observation k of variable i. Construction enforces
 * n >= 2, m >= 2 and finiteness of every entry. Storage is column-major so
 * each variable is a contiguous column.
 */
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd values);

  /// Row-wise literal, mostly for tests: {{1, 2}, {3, 4}, {5, 0}}.
  static DataMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  [[nodiscard]] std::size_t m() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  [[nodiscard]] double operator()(std::size_t k, std::size_t i) const {
    return values_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
  }

  [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }

  [[nodiscard]] auto column(std::size_t i) const { return values_.col(static_cast<Eigen::Index>(i)); }

 private:
  Eigen::MatrixXd values_;
};

}  // namespace covmax
