#include "covmax/data_matrix.hpp"

#include <string>
#include <utility>

#include "covmax/errors.hpp"

namespace covmax {

DataMatrix::DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 2) {
    throw InvalidArgument("data matrix needs n >= 2 rows and m >= 2 columns, got " +
                          std::to_string(values_.rows()) + " x " + std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) {
    throw InvalidArgument("data matrix contains non-finite entries");
  }
}

DataMatrix DataMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = n == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.begin()->size());
  Eigen::MatrixXd values(n, m);
  Eigen::Index k = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != m) throw InvalidArgument("ragged row literal");
    Eigen::Index i = 0;
    for (double v : row) values(k, i++) = v;
    ++k;
  }
  return DataMatrix(std::move(values));
}

}  // namespace covmax
