#include "covmax/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "covmax/errors.hpp"

namespace covmax::diag {

using process::InnovationDist;
using process::InnovationKind;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureTolerance = 1e-12;

template <class T>
bool nonincreasing(const std::vector<T>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::less<T>{}) == v.end();
}

/// 2 * int_0^inf g(x) dx for an even integrand.
double integrate_half_line(const std::function<double(double)>& g) {
  boost::math::quadrature::exp_sinh<double> integrator;
  // Far in the tail the density underflows and x^p overflows; 0 * inf is the
  // vanishing tail, not a singularity.
  const auto guarded = [&g](double x) {
    const double v = g(x);
    return std::isnan(v) ? 0.0 : v;
  };
  double error = 0.0;
  const double value = integrator.integrate(guarded, 0.0, kInf, 1e-13, &error);
  return 2.0 * value;
}

double integrate_interval(const std::function<double(double)>& g, double a, double b) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, kQuadratureTolerance, &error);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

// ---------------------------------------------------------------------------
// Product correlation tables

CorrelationTable product_correlations(const process::NonstationaryLinearSpec& spec,
                                      const PairIndexSet& idx, std::size_t cap) {
  if (idx.dimension() != spec.m()) throw InvalidArgument("index set dimension does not match spec");
  if (idx.size() > cap) {
    throw CapExceeded("index set has " + std::to_string(idx.size()) + " pairs; the O(s^2) table is capped at " +
                      std::to_string(cap));
  }
  const process::LinearMoments moments(spec);
  CorrelationTable table;
  table.pairs = idx.pairs();
  const auto s = static_cast<Eigen::Index>(table.pairs.size());

  std::vector<double> tau(table.pairs.size());
  for (std::size_t a = 0; a < table.pairs.size(); ++a) tau[a] = moments.tau(table.pairs[a].i, table.pairs[a].j);

  table.covariance.resize(s, s);
  table.correlation.resize(s, s);
  for (Eigen::Index a = 0; a < s; ++a) {
    const Pair pa = table.pairs[static_cast<std::size_t>(a)];
    for (Eigen::Index b = a; b < s; ++b) {
      const Pair pb = table.pairs[static_cast<std::size_t>(b)];
      const double c = a == b ? tau[static_cast<std::size_t>(a)] : moments.cov_products(pa.i, pa.j, pb.i, pb.j);
      const double r = a == b ? 1.0 : c / std::sqrt(tau[static_cast<std::size_t>(a)] * tau[static_cast<std::size_t>(b)]);
      table.covariance(a, b) = table.covariance(b, a) = c;
      table.correlation(a, b) = table.correlation(b, a) = r;
    }
  }
  return table;
}

std::vector<double> gamma_b(const Eigen::MatrixXd& correlation, std::span<const std::size_t> b_grid) {
  const auto s = correlation.rows();
  std::vector<double> out(b_grid.size(), 0.0);
  std::vector<double> others;
  others.reserve(static_cast<std::size_t>(s));
  for (Eigen::Index a = 0; a < s; ++a) {
    others.clear();
    for (Eigen::Index b = 0; b < s; ++b)
      if (b != a) others.push_back(std::abs(correlation(a, b)));
    std::sort(others.begin(), others.end(), std::greater<>{});
    for (std::size_t g = 0; g < b_grid.size(); ++g) {
      const std::size_t b = b_grid[g];
      if (b == 0) throw InvalidArgument("gamma_n(b) needs b >= 1");
      if (b <= others.size()) out[g] = std::max(out[g], others[b - 1]);
    }
  }
  return out;
}

std::vector<std::size_t> g_counts(const Eigen::MatrixXd& correlation, std::span<const double> t_grid) {
  std::vector<std::size_t> out(t_grid.size(), 0);
  for (Eigen::Index a = 0; a < correlation.rows(); ++a) {
    for (std::size_t g = 0; g < t_grid.size(); ++g) {
      std::size_t count = 0;
      for (Eigen::Index b = 0; b < correlation.cols(); ++b)
        if (std::abs(correlation(a, b)) > t_grid[g]) ++count;
      out[g] = std::max(out[g], count);
    }
  }
  return out;
}

DependenceReport condition_report(const process::NonstationaryLinearSpec& spec, const PairIndexSet& idx,
                                  std::vector<std::size_t> b_grid, std::vector<double> t_grid,
                                  std::size_t cap) {
  std::sort(b_grid.begin(), b_grid.end());
  std::sort(t_grid.begin(), t_grid.end());
  const CorrelationTable table = product_correlations(spec, idx, cap);
  const process::LinearMoments moments(spec);

  DependenceReport r;
  r.m = spec.m();
  r.cardinality = table.pairs.size();
  r.kappa4 = spec.innovations().kappa4();
  r.tau_min = table.covariance.diagonal().minCoeff();
  const auto s = table.correlation.rows();
  for (Eigen::Index a = 0; a < s; ++a)
    for (Eigen::Index b = 0; b < s; ++b)
      if (a != b) r.gamma_max = std::max(r.gamma_max, std::abs(table.correlation(a, b)));
  r.cov_sq_sum = table.covariance.squaredNorm();

  r.b_grid = b_grid;
  r.gamma_b = gamma_b(table.correlation, b_grid);
  for (std::size_t g = 0; g < b_grid.size(); ++g) {
    r.gamma_b_log_b.push_back(r.gamma_b[g] * std::log(static_cast<double>(b_grid[g])));
  }
  r.t_grid = t_grid;
  r.g_counts = g_counts(table.correlation, t_grid);
  r.gamma_b_nonincreasing = nonincreasing(r.gamma_b);
  r.g_counts_nonincreasing = nonincreasing(r.g_counts);

  for (std::size_t i = 0; i < spec.m(); ++i)
    for (std::size_t j = i + 1; j < spec.m(); ++j)
      r.corr_max_pairs = std::max(r.corr_max_pairs, std::abs(moments.sigma(i, j)));
  return r;
}

// ---------------------------------------------------------------------------
// Physical dependence

double difference_norm(const InnovationDist& dist, int p) {
  if (p == 2) return std::sqrt(2.0);
  // E(e - e')^4 = 2 E e^4 + 6 (E e^2)^2 for mean-zero e.
  if (p == 4) return std::pow(12.0 + 2.0 * dist.kappa4(), 0.25);
  throw InvalidArgument("physical dependence measure supports p = 2 or 4, got " + std::to_string(p));
}

DependenceProfile physical_dep_linear(std::span<const double> coeffs, int p, const InnovationDist& dist) {
  const double scale = difference_norm(dist, p);
  DependenceProfile profile;
  profile.p = p;
  profile.delta.reserve(coeffs.size());
  for (double a : coeffs) profile.delta.push_back(std::abs(a) * scale);
  profile.psi.assign(coeffs.size() + 1, 0.0);
  long double tail = 0.0L;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    tail += static_cast<long double>(profile.delta[k]) * profile.delta[k];
    profile.psi[k] = static_cast<double>(std::sqrt(tail));
  }
  return profile;
}

double psi_tail(const DependenceProfile& profile, std::size_t k) {
  if (!profile.psi.empty()) return k < profile.psi.size() ? profile.psi[k] : 0.0;
  long double tail = 0.0L;
  for (std::size_t j = k; j < profile.delta.size(); ++j) {
    tail += static_cast<long double>(profile.delta[j]) * profile.delta[j];
  }
  return static_cast<double>(std::sqrt(tail));
}

std::vector<double> h_profile(const process::NonstationaryLinearSpec& spec) {
  const auto T = static_cast<std::ptrdiff_t>(spec.half_width());
  std::vector<double> h(2 * spec.half_width() + 3, 0.0);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto cutoff = static_cast<std::ptrdiff_t>(k / 2);
    double best = 0.0;
    for (std::size_t i = 0; i < spec.m(); ++i) {
      double ss = 0.0;
      for (std::ptrdiff_t t = -T; t <= T; ++t) {
        if (std::abs(t) >= cutoff) ss += spec.f(i, t) * spec.f(i, t);
      }
      best = std::max(best, ss);
    }
    h[k] = std::sqrt(best);
  }
  return h;
}

double h_at(std::span<const double> h, std::size_t k) noexcept { return k < h.size() ? h[k] : 0.0; }

// ---------------------------------------------------------------------------
// Moments of the innovation law

double absolute_moment(const InnovationDist& dist, double p) {
  if (!(p >= 0.0)) throw InvalidArgument("moment order must be >= 0");
  switch (dist.kind()) {
    case InnovationKind::StandardNormal:
      return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
    case InnovationKind::StandardizedUniform:
      return std::pow(3.0, p / 2.0) / (p + 1.0);
    case InnovationKind::Rademacher:
      return 1.0;
    case InnovationKind::StandardizedStudentT: {
      const double nu = dist.df();
      if (p >= nu) return kInf;
      const double scale = std::pow((nu - 2.0) / nu, p / 2.0);
      const double log_ratio = std::lgamma((p + 1.0) / 2.0) + std::lgamma((nu - p) / 2.0) -
                               std::lgamma(nu / 2.0) - 0.5 * std::log(std::numbers::pi);
      return scale * std::pow(nu, p / 2.0) * std::exp(log_ratio);
    }
  }
  return kInf;
}

double absolute_moment_quadrature(const InnovationDist& dist, double p) {
  if (!(p >= 0.0)) throw InvalidArgument("moment order must be >= 0");
  switch (dist.kind()) {
    case InnovationKind::StandardNormal:
      return integrate_half_line([p](double x) { return std::pow(x, p) * normal_pdf(x); });
    case InnovationKind::StandardizedUniform: {
      const double r = std::sqrt(3.0);
      return integrate_interval([p](double x) { return std::pow(x, p); }, 0.0, r) / r;
    }
    case InnovationKind::Rademacher:
      return 0.5 * std::pow(1.0, p) + 0.5 * std::pow(1.0, p);
    case InnovationKind::StandardizedStudentT: {
      const double nu = dist.df();
      if (p >= nu) return kInf;
      const double c = std::sqrt((nu - 2.0) / nu);
      const boost::math::students_t_distribution<double> t(nu);
      return integrate_half_line([&](double x) { return std::pow(x, p) * boost::math::pdf(t, x / c) / c; });
    }
  }
  return kInf;
}

double exponential_moment(const InnovationDist& dist, double t, double p) {
  if (!(p > 0.0)) throw InvalidArgument("exponential moment needs p > 0");
  if (t == 0.0) return 1.0;
  switch (dist.kind()) {
    case InnovationKind::Rademacher:
      return std::exp(t);
    case InnovationKind::StandardizedUniform: {
      const double r = std::sqrt(3.0);
      return integrate_interval([t, p](double x) { return std::exp(t * std::pow(x, p)); }, 0.0, r) / r;
    }
    case InnovationKind::StandardizedStudentT:
      return t > 0.0 ? kInf : integrate_half_line([&](double x) {
        const double nu = dist.df();
        const double c = std::sqrt((nu - 2.0) / nu);
        const boost::math::students_t_distribution<double> law(nu);
        return std::exp(t * std::pow(x, p)) * boost::math::pdf(law, x / c) / c;
      });
    case InnovationKind::StandardNormal:
      if (t > 0.0 && p > 2.0) return kInf;
      if (p == 2.0) return t < 0.5 ? 1.0 / std::sqrt(1.0 - 2.0 * t) : kInf;
      return integrate_half_line([t, p](double x) { return std::exp(t * std::pow(x, p)) * normal_pdf(x); });
  }
  return kInf;
}

MomentSummary moment_summaries(const InnovationDist& dist, std::span<const double> p_grid,
                               std::span<const double> t_grid) {
  MomentSummary out;
  for (double p : p_grid) {
    AbsoluteMoment row;
    row.p = p;
    row.closed_form = absolute_moment(dist, p);
    row.finite = std::isfinite(row.closed_form);
    row.quadrature = row.finite ? absolute_moment_quadrature(dist, p) : kInf;
    out.absolute.push_back(row);
  }
  for (double p : p_grid) {
    if (!(p > 0.0)) continue;
    for (double t : t_grid) {
      ExponentialMoment cell;
      cell.t = t;
      cell.p = p;
      cell.value = exponential_moment(dist, t, p);
      cell.finite = std::isfinite(cell.value);
      out.exponential.push_back(cell);
    }
  }
  return out;
}

}  // namespace covmax::diag
