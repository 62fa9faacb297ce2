#include "covmax/core_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "covmax/errors.hpp"

namespace covmax::core {

namespace {

void check_index(std::size_t m, std::size_t i, std::size_t j) {
  if (i >= m || j >= m) {
    throw IndexOutOfRange("column index out of range: (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") with m = " + std::to_string(m));
  }
}

PairStats centered_pair_stats(const double* ci, const double* cj, std::size_t n) {
  long double sum = 0.0L;
  for (std::size_t k = 0; k < n; ++k) sum += static_cast<long double>(ci[k]) * cj[k];
  const long double sigma = sum / static_cast<long double>(n);

  long double ss = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const long double d = static_cast<long double>(ci[k]) * cj[k] - sigma;
    ss += d * d;
  }
  return {static_cast<double>(sigma), static_cast<double>(ss / static_cast<long double>(n))};
}

}  // namespace

CenteredData::CenteredData(const DataMatrix& x) : centered_(x.values()) {
  const auto n = centered_.rows();
  for (Eigen::Index i = 0; i < centered_.cols(); ++i) {
    long double sum = 0.0L;
    for (Eigen::Index k = 0; k < n; ++k) sum += centered_(k, i);
    const auto mean = static_cast<double>(sum / static_cast<long double>(n));
    centered_.col(i).array() -= mean;
  }
}

PairStats CenteredData::pair_stats(std::size_t i, std::size_t j) const {
  check_index(m(), i, j);
  return centered_pair_stats(centered_.col(static_cast<Eigen::Index>(i)).data(),
                             centered_.col(static_cast<Eigen::Index>(j)).data(), n());
}

double CenteredData::second_moment(std::size_t i) const {
  check_index(m(), i, i);
  long double ss = 0.0L;
  for (double v : centered_.col(static_cast<Eigen::Index>(i))) ss += static_cast<long double>(v) * v;
  return static_cast<double>(ss / static_cast<long double>(n()));
}

double sample_cov_pair(const DataMatrix& x, std::size_t i, std::size_t j) {
  return pair_stats(x, i, j).sigma_hat;
}

double tau_hat_pair(const DataMatrix& x, std::size_t i, std::size_t j) {
  return pair_stats(x, i, j).tau_hat;
}

PairStats pair_stats(const DataMatrix& x, std::size_t i, std::size_t j) {
  check_index(x.m(), i, j);
  return CenteredData(x).pair_stats(i, j);
}

Eigen::MatrixXd sample_covariance(const DataMatrix& x) {
  const CenteredData data(x);
  const Eigen::MatrixXd& c = data.centered();
  Eigen::MatrixXd cov = (c.transpose() * c) / static_cast<double>(x.n());
  // Symmetrize exactly; the product is symmetric only up to rounding.
  return (cov + cov.transpose()) * 0.5;
}

// ---------------------------------------------------------------------------
// NullCovariance

NullCovariance::NullCovariance(NullKind kind, Eigen::MatrixXd matrix, std::vector<double> gamma)
    : kind_(kind), matrix_(std::move(matrix)), gamma_(std::move(gamma)) {}

NullCovariance NullCovariance::zero() { return {NullKind::Zero, {}, {}}; }

NullCovariance NullCovariance::identity() { return {NullKind::Identity, {}, {}}; }

NullCovariance NullCovariance::explicit_matrix(Eigen::MatrixXd sigma0) {
  if (sigma0.rows() != sigma0.cols() || sigma0.rows() == 0) {
    throw InvalidArgument("null covariance must be a non-empty square matrix");
  }
  if (!sigma0.allFinite()) throw InvalidArgument("null covariance has non-finite entries");
  const double scale = std::max(1.0, sigma0.cwiseAbs().maxCoeff());
  if ((sigma0 - sigma0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("null covariance is not symmetric");
  }
  return {NullKind::Explicit, std::move(sigma0), {}};
}

NullCovariance NullCovariance::toeplitz(std::vector<double> gamma) {
  if (gamma.empty() || !(gamma.front() > 0.0)) {
    throw InvalidArgument("Toeplitz null needs gamma_0 > 0");
  }
  for (double g : gamma) {
    if (!std::isfinite(g)) throw InvalidArgument("Toeplitz null has non-finite autocovariance");
  }
  return {NullKind::Toeplitz, {}, std::move(gamma)};
}

double NullCovariance::sigma(std::size_t i, std::size_t j) const {
  switch (kind_) {
    case NullKind::Zero: return 0.0;
    case NullKind::Identity: return i == j ? 1.0 : 0.0;
    case NullKind::Explicit:
      return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    case NullKind::Toeplitz: return gamma_[i > j ? i - j : j - i];
  }
  return 0.0;
}

void NullCovariance::require_dimension(std::size_t m) const {
  if (kind_ == NullKind::Explicit && static_cast<std::size_t>(matrix_.rows()) != m) {
    throw InvalidArgument("null covariance is " + std::to_string(matrix_.rows()) + " x " +
                          std::to_string(matrix_.rows()) + " but data has m = " + std::to_string(m));
  }
  if (kind_ == NullKind::Toeplitz && gamma_.size() < m) {
    throw InvalidArgument("Toeplitz null supplies " + std::to_string(gamma_.size()) +
                          " lags but data has m = " + std::to_string(m));
  }
}

// ---------------------------------------------------------------------------
// Maximum deviation and the limit law

std::string_view to_string(Normalization mode) noexcept {
  return mode == Normalization::TheoremConstants ? "theorem" : "cardinality";
}

Normalization default_normalization(IndexKind kind) noexcept {
  switch (kind) {
    case IndexKind::StrictPairs:
    case IndexKind::PairsWithDiagonal: return Normalization::TheoremConstants;
    case IndexKind::BandExterior:
    case IndexKind::Custom: return Normalization::CardinalityConstants;
  }
  return Normalization::TheoremConstants;
}

double default_tau_floor(const CenteredData& data) {
  double largest = 0.0;
  for (std::size_t i = 0; i < data.m(); ++i) largest = std::max(largest, data.second_moment(i));
  return 1e-12 * largest * largest;
}

MaxDeviation max_deviation(const DataMatrix& x, const NullCovariance& null, const PairIndexSet& idx,
                           std::optional<double> tau_floor) {
  return max_deviation(CenteredData(x), null, idx, tau_floor);
}

MaxDeviation max_deviation(const CenteredData& data, const NullCovariance& null,
                           const PairIndexSet& idx, std::optional<double> tau_floor) {
  if (idx.dimension() != data.m()) {
    throw InvalidArgument("index set dimension " + std::to_string(idx.dimension()) +
                          " does not match data m = " + std::to_string(data.m()));
  }
  null.require_dimension(data.m());
  const double floor = tau_floor.value_or(default_tau_floor(data));
  if (floor < 0.0 || !std::isfinite(floor)) throw InvalidArgument("tau floor must be finite and >= 0");

  MaxDeviation best{-1.0, {}};
  idx.for_each([&](Pair p) {
    const PairStats st = data.pair_stats(p.i, p.j);
    if (!(st.tau_hat > 0.0) || st.tau_hat < floor) throw DegenerateVariance(p, st.tau_hat, floor);
    const double ratio = std::abs(st.sigma_hat - null.sigma(p.i, p.j)) / std::sqrt(st.tau_hat);
    if (ratio > best.statistic) best = {ratio, p};
  });
  return best;
}

double normalization_offset(std::size_t s, Normalization mode, std::size_t m) {
  if (mode == Normalization::TheoremConstants) {
    if (m < 3) throw CardinalityTooSmall(m);
    const double lm = std::log(static_cast<double>(m));
    return -4.0 * lm + std::log(lm) + std::log(8.0 * std::numbers::pi);
  }
  if (s < 3) throw CardinalityTooSmall(s);
  const double ls = std::log(static_cast<double>(s));
  return -2.0 * ls + std::log(ls) + std::log(std::numbers::pi);
}

double gumbel_normalize(double statistic, std::size_t n, std::size_t s, Normalization mode,
                        std::size_t m) {
  if (s < 3) throw CardinalityTooSmall(s);
  if (n < 2) throw InvalidArgument("gumbel_normalize needs n >= 2");
  return static_cast<double>(n) * statistic * statistic + normalization_offset(s, mode, m);
}

double gumbel_cdf(double y) noexcept { return std::exp(-std::exp(-0.5 * y)); }

double gumbel_survival(double y) noexcept { return -std::expm1(-std::exp(-0.5 * y)); }

double gumbel_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("gumbel_quantile needs alpha in (0, 1), got " + std::to_string(alpha));
  }
  return -2.0 * std::log(-std::log1p(-alpha));
}

TestResult run_test(const DataMatrix& x, const NullCovariance& null, const PairIndexSet& idx,
                    std::optional<Normalization> mode) {
  const Normalization norm = mode.value_or(default_normalization(idx.kind()));
  const std::size_t s = idx.size();
  // Fail on the constants before scanning all pairs.
  (void)normalization_offset(s, norm, x.m());
  if (s < 3) throw CardinalityTooSmall(s);

  const MaxDeviation dev = max_deviation(x, null, idx);
  TestResult r;
  r.statistic = dev.statistic;
  r.argmax = dev.argmax;
  r.cardinality = s;
  r.normalization = norm;
  r.index_kind = idx.kind();
  r.n = x.n();
  r.m = x.m();
  r.normalized = gumbel_normalize(dev.statistic, x.n(), s, norm, x.m());
  r.p_value = gumbel_survival(r.normalized);
  return r;
}

}  // namespace covmax::core
