#include "covmax/structure_tests.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "covmax/errors.hpp"

namespace covmax::structure {

using core::NullCovariance;

TestResult test_independence(const DataMatrix& x, std::optional<Normalization> mode) {
  return core::run_test(x, NullCovariance::zero(), PairIndexSet::strict_pairs(x.m()), mode);
}

TestResult test_identity(const DataMatrix& x, std::optional<Normalization> mode) {
  return core::run_test(x, NullCovariance::identity(), PairIndexSet::with_diagonal(x.m()), mode);
}

StationarityFit pooled_autocov(const DataMatrix& x) {
  const std::size_t n = x.n();
  const std::size_t m = x.m();
  const auto nm = static_cast<long double>(n) * static_cast<long double>(m);
  const Eigen::MatrixXd& v = x.values();

  long double total = 0.0L;
  for (Eigen::Index i = 0; i < v.cols(); ++i)
    for (Eigen::Index k = 0; k < v.rows(); ++k) total += v(k, i);
  const auto mu = static_cast<double>(total / nm);

  const Eigen::MatrixXd c = v.array() - mu;
  StationarityFit fit{mu, std::vector<double>(m, 0.0)};
  for (std::size_t lag = 0; lag < m; ++lag) {
    long double acc = 0.0L;
    for (std::size_t i = lag; i < m; ++i) {
      const auto a = c.col(static_cast<Eigen::Index>(i - lag));
      const auto b = c.col(static_cast<Eigen::Index>(i));
      for (Eigen::Index k = 0; k < c.rows(); ++k) acc += static_cast<long double>(a(k)) * b(k);
    }
    fit.gamma_hat[lag] = static_cast<double>(acc / nm);
  }
  return fit;
}

TestResult test_stationarity(const DataMatrix& x, std::optional<Normalization> mode) {
  StationarityFit fit = pooled_autocov(x);
  return core::run_test(x, NullCovariance::toeplitz(std::move(fit.gamma_hat)),
                        PairIndexSet::with_diagonal(x.m()), mode);
}

TestResult test_bandedness(const DataMatrix& x, std::size_t band, std::optional<Normalization> mode) {
  return core::run_test(x, NullCovariance::zero(), PairIndexSet::band_exterior(x.m(), band), mode);
}

TaperSpec::TaperSpec(std::size_t bandwidth, std::size_t m) : bandwidth_(bandwidth), m_(m) {
  if (bandwidth < 2 || bandwidth % 2 != 0) {
    throw InvalidArgument("taper bandwidth must be an even integer >= 2, got " +
                          std::to_string(bandwidth));
  }
  if (m < 2) throw InvalidArgument("taper dimension must be >= 2");
}

double taper_weight(std::size_t distance, std::size_t bandwidth) noexcept {
  if (2 * distance <= bandwidth) return 1.0;
  if (distance <= bandwidth) {
    return 2.0 - 2.0 * static_cast<double>(distance) / static_cast<double>(bandwidth);
  }
  return 0.0;
}

Eigen::MatrixXd taper_weights(const TaperSpec& spec) {
  const auto m = static_cast<Eigen::Index>(spec.m());
  Eigen::MatrixXd w(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      w(i, j) = taper_weight(static_cast<std::size_t>(i > j ? i - j : j - i), spec.bandwidth());
  return w;
}

Eigen::MatrixXd tapered_estimate(const DataMatrix& x, const TaperSpec& spec) {
  if (spec.m() != x.m()) throw InvalidArgument("taper dimension does not match data");
  return taper_weights(spec).cwiseProduct(core::sample_covariance(x));
}

std::size_t choose_bandwidth(std::size_t n, double eta) {
  if (n < 2) throw InvalidArgument("choose_bandwidth needs n >= 2");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("choose_bandwidth needs eta > 0");
  const double target = std::pow(static_cast<double>(n), 1.0 / (2.0 * eta + 1.0));
  // Nearest multiple of two, halfway cases rounding down.
  const double half = std::ceil(target / 2.0 - 0.5);
  return std::max<std::size_t>(2, 2 * static_cast<std::size_t>(std::max(0.0, half)));
}

TaperAssessment assess_taper(const DataMatrix& x, const TaperSpec& spec,
                             std::optional<Normalization> mode) {
  if (spec.m() != x.m()) throw InvalidArgument("taper dimension does not match data");
  TaperAssessment out;
  out.result = test_bandedness(x, spec.bandwidth(), mode);
  out.bandwidth = spec.bandwidth();
  out.bias_scale = 1.0 / std::sqrt(static_cast<double>(x.n()) * std::log(static_cast<double>(x.m())));
  std::ostringstream os;
  os << "null limit assumes max_{|i-j|>" << spec.bandwidth()
     << "} |sigma_ij| is much smaller than 1/sqrt(n log m) = " << out.bias_scale
     << "; the growth condition on log m relative to n is not checked";
  out.caveat = os.str();
  return out;
}

TaperAssessment assess_taper(const DataMatrix& x, double eta, std::optional<Normalization> mode) {
  return assess_taper(x, TaperSpec(choose_bandwidth(x.n(), eta), x.m()), mode);
}

}  // namespace covmax::structure
