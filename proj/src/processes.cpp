#include "covmax/processes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "covmax/errors.hpp"

namespace covmax::process {

namespace {

void normalize_unit(std::vector<double>& v, const char* what) {
  double ss = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + " contains non-finite values");
    ss += x * x;
  }
  if (!(ss > 0.0)) throw InvalidArgument(std::string(what) + " are all zero");
  const double scale = 1.0 / std::sqrt(ss);
  for (double& x : v) x *= scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// Innovations

InnovationDist InnovationDist::student_t(double df) {
  if (!(df > 8.0) || !std::isfinite(df)) {
    throw InvalidArgument("standardized Student t needs df > 8, got " + std::to_string(df));
  }
  return InnovationDist(InnovationKind::StandardizedStudentT, df);
}

double InnovationDist::kappa4() const noexcept {
  switch (kind_) {
    case InnovationKind::StandardNormal: return 0.0;
    case InnovationKind::StandardizedUniform: return -1.2;
    case InnovationKind::StandardizedStudentT: return 6.0 / (df_ - 4.0);
    case InnovationKind::Rademacher: return -2.0;
  }
  return 0.0;
}

std::string_view InnovationDist::name() const noexcept {
  switch (kind_) {
    case InnovationKind::StandardNormal: return "normal";
    case InnovationKind::StandardizedUniform: return "uniform";
    case InnovationKind::StandardizedStudentT: return "student_t";
    case InnovationKind::Rademacher: return "rademacher";
  }
  return "unknown";
}

InnovationSampler::InnovationSampler(const InnovationDist& dist)
    : kind_(dist.kind()), uniform_(-std::sqrt(3.0), std::sqrt(3.0)) {
  if (kind_ == InnovationKind::StandardizedStudentT) {
    student_ = std::student_t_distribution<double>(dist.df());
    t_scale_ = std::sqrt((dist.df() - 2.0) / dist.df());
  }
}

double InnovationSampler::operator()(Engine& engine) {
  switch (kind_) {
    case InnovationKind::StandardNormal: return normal_(engine);
    case InnovationKind::StandardizedUniform: return uniform_(engine);
    case InnovationKind::StandardizedStudentT: return t_scale_ * student_(engine);
    case InnovationKind::Rademacher: return (engine() >> 63) != 0 ? 1.0 : -1.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Specs

StationaryLinearSpec::StationaryLinearSpec(std::vector<double> coeffs, InnovationDist innovations)
    : coeffs_(std::move(coeffs)), innovations_(innovations) {
  if (coeffs_.empty()) throw InvalidArgument("stationary linear spec needs at least one coefficient");
  normalize_unit(coeffs_, "linear process coefficients");
}

NonstationaryLinearSpec::NonstationaryLinearSpec(Eigen::MatrixXd f, std::size_t half_width,
                                                 InnovationDist innovations)
    : f_(std::move(f)), half_width_(half_width), innovations_(innovations) {
  if (f_.rows() < 1) throw InvalidArgument("coefficient table has no rows");
  if (static_cast<std::size_t>(f_.cols()) != 2 * half_width_ + 1) {
    throw InvalidArgument("coefficient table must have 2T+1 = " + std::to_string(2 * half_width_ + 1) +
                          " columns, got " + std::to_string(f_.cols()));
  }
  if (!f_.allFinite()) throw InvalidArgument("coefficient table contains non-finite values");
  for (Eigen::Index i = 0; i < f_.rows(); ++i) {
    const double norm = f_.row(i).norm();
    if (!(norm > 0.0)) {
      throw InvalidArgument("coefficient row " + std::to_string(i + 1) + " is identically zero");
    }
    f_.row(i) /= norm;
  }
}

NonstationaryLinearSpec NonstationaryLinearSpec::iid(std::size_t m, InnovationDist innovations) {
  return {Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(m), 1), 0, innovations};
}

NonstationaryLinearSpec NonstationaryLinearSpec::from_stationary(const StationaryLinearSpec& spec,
                                                                 std::size_t m) {
  const std::size_t lag = spec.lag();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                            static_cast<Eigen::Index>(2 * lag + 1));
  for (std::size_t j = 0; j <= lag; ++j) {
    f.col(static_cast<Eigen::Index>(lag + j)).setConstant(spec.coeffs()[j]);
  }
  return {std::move(f), lag, spec.innovations()};
}

double NonstationaryLinearSpec::f(std::size_t i, std::ptrdiff_t t) const {
  const auto T = static_cast<std::ptrdiff_t>(half_width_);
  if (t < -T || t > T) return 0.0;
  return f_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t + T));
}

Eigen::MatrixXd NonstationaryLinearSpec::loadings() const {
  const auto m = f_.rows();
  const auto T = static_cast<Eigen::Index>(half_width_);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m + 2 * T);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index t = -T; t <= T; ++t) c(i, i - t + T) = f_(i, t + T);
  return c;
}

// ---------------------------------------------------------------------------
// Generators. Row k of a matrix generated under `seed` always uses the
// stream derive_seed(seed, k), so output never depends on scheduling.

DataMatrix gen_iid(std::size_t n, std::size_t m, const InnovationDist& dist, std::uint64_t seed) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < n; ++k) {
    Engine engine = make_engine(derive_seed(seed, k));
    InnovationSampler draw(dist);
    for (std::size_t i = 0; i < m; ++i) x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = draw(engine);
  }
  return DataMatrix(std::move(x));
}

DataMatrix gen_stationary_linear(std::size_t n, std::size_t m, const StationaryLinearSpec& spec,
                                 std::uint64_t seed) {
  const std::size_t lag = spec.lag();
  const auto a = spec.coeffs();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<double> eps(m + lag);
  for (std::size_t k = 0; k < n; ++k) {
    Engine engine = make_engine(derive_seed(seed, k));
    InnovationSampler draw(spec.innovations());
    // eps[v] holds innovation v - J, so X_i reads eps[i - j + J].
    for (double& e : eps) e = draw(engine);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= lag; ++j) acc += a[j] * eps[i + lag - j];
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = acc;
    }
  }
  return DataMatrix(std::move(x));
}

DataMatrix gen_nonstationary_linear(std::size_t n, const NonstationaryLinearSpec& spec,
                                    std::uint64_t seed) {
  const std::size_t m = spec.m();
  const auto T = static_cast<std::ptrdiff_t>(spec.half_width());
  const Eigen::MatrixXd& f = spec.table();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<double> eps(m + 2 * spec.half_width());
  for (std::size_t k = 0; k < n; ++k) {
    Engine engine = make_engine(derive_seed(seed, k));
    InnovationSampler draw(spec.innovations());
    for (double& e : eps) e = draw(engine);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      const auto ii = static_cast<std::ptrdiff_t>(i);
      for (std::ptrdiff_t t = -T; t <= T; ++t) {
        acc += f(static_cast<Eigen::Index>(i), t + T) * eps[static_cast<std::size_t>(ii - t + T)];
      }
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = acc;
    }
  }
  return DataMatrix(std::move(x));
}

// ---------------------------------------------------------------------------
// Coefficient families

std::vector<double> raw_long_memory_coeffs(double beta, std::size_t lag, LongMemoryVariant variant) {
  if (lag < 2) throw InvalidArgument("long memory coefficients need J >= 2");
  std::vector<double> a(lag + 1);
  a[0] = 1.0;
  if (variant == LongMemoryVariant::PowerLaw) {
    if (!(beta > 0.5 && beta <= 1.0)) {
      throw InvalidArgument("long memory exponent beta must lie in (1/2, 1], got " + std::to_string(beta));
    }
    for (std::size_t i = 1; i <= lag; ++i) a[i] = std::pow(static_cast<double>(i), -beta);
  } else {
    a[1] = 1.0;
    for (std::size_t i = 2; i <= lag; ++i) {
      const double li = std::log(static_cast<double>(i));
      a[i] = 1.0 / (std::sqrt(static_cast<double>(i)) * li * li);
    }
  }
  return a;
}

std::vector<double> long_memory_coeffs(double beta, std::size_t lag, LongMemoryVariant variant) {
  auto a = raw_long_memory_coeffs(beta, lag, variant);
  normalize_unit(a, "long memory coefficients");
  return a;
}

std::vector<double> ar1_coeffs(double phi, std::size_t lag) {
  if (!(std::abs(phi) < 1.0)) throw InvalidArgument("AR(1) coefficient must satisfy |phi| < 1");
  std::vector<double> a(lag + 1);
  double p = 1.0;
  for (double& v : a) {
    v = p;
    p *= phi;
  }
  normalize_unit(a, "AR(1) coefficients");
  return a;
}

Eigen::MatrixXd true_cov_stationary(const StationaryLinearSpec& spec, std::size_t m) {
  const auto a = spec.coeffs();
  std::vector<double> gamma(m, 0.0);
  for (std::size_t h = 0; h < m; ++h) {
    long double acc = 0.0L;
    for (std::size_t j = 0; j + h < a.size(); ++j) acc += static_cast<long double>(a[j]) * a[j + h];
    gamma[h] = static_cast<double>(acc);
  }
  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd s(mm, mm);
  for (Eigen::Index j = 0; j < mm; ++j)
    for (Eigen::Index i = 0; i < mm; ++i) s(i, j) = gamma[static_cast<std::size_t>(i > j ? i - j : j - i)];
  return s;
}

// ---------------------------------------------------------------------------
// Exact moments

LinearMoments::LinearMoments(const NonstationaryLinearSpec& spec)
    : loadings_(spec.loadings()), kappa4_(spec.innovations().kappa4()) {
  sigma_ = loadings_ * loadings_.transpose();
  sigma_ = sigma_.selfadjointView<Eigen::Upper>();
}

void LinearMoments::check(std::size_t i) const {
  if (i >= m()) throw IndexOutOfRange("variable index " + std::to_string(i) + " out of range");
}

double LinearMoments::sigma(std::size_t i, std::size_t j) const {
  check(i);
  check(j);
  return sigma_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double LinearMoments::cum4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
  check(i);
  check(j);
  check(k);
  check(l);
  if (kappa4_ == 0.0) return 0.0;
  const auto ci = loadings_.row(static_cast<Eigen::Index>(i));
  const auto cj = loadings_.row(static_cast<Eigen::Index>(j));
  const auto ck = loadings_.row(static_cast<Eigen::Index>(k));
  const auto cl = loadings_.row(static_cast<Eigen::Index>(l));
  double acc = 0.0;
  for (Eigen::Index u = 0; u < loadings_.cols(); ++u) acc += ci(u) * cj(u) * ck(u) * cl(u);
  return kappa4_ * acc;
}

double LinearMoments::cov_products(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
  return cum4(i, j, k, l) + sigma(i, k) * sigma(j, l) + sigma(i, l) * sigma(j, k);
}

double LinearMoments::tau(std::size_t i, std::size_t j) const {
  const double t = cov_products(i, j, i, j);
  if (t <= 1e-12) {
    throw Kappa4Boundary("Var(X_" + std::to_string(i + 1) + " X_" + std::to_string(j + 1) +
                         ") = " + std::to_string(t) + " is not positive (kappa4 = " +
                         std::to_string(kappa4_) + ")");
  }
  return t;
}

Eigen::MatrixXd true_cov_linear(const NonstationaryLinearSpec& spec) {
  return LinearMoments(spec).covariance();
}

double cum4_linear(const NonstationaryLinearSpec& spec, std::size_t i, std::size_t j, std::size_t k,
                   std::size_t l) {
  return LinearMoments(spec).cum4(i, j, k, l);
}

double cov_products(const NonstationaryLinearSpec& spec, std::size_t i, std::size_t j, std::size_t k,
                    std::size_t l) {
  return LinearMoments(spec).cov_products(i, j, k, l);
}

double true_tau_linear(const NonstationaryLinearSpec& spec, std::size_t i, std::size_t j) {
  return LinearMoments(spec).tau(i, j);
}

}  // namespace covmax::process
