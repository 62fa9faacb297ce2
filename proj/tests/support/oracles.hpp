#pragma once

// Straight-from-the-definition reference computations. Deliberately naive:
// plain loops over std::vector, no Eigen, no shared code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle_ref {

using Grid = std::vector<std::vector<double>>;  // grid[k][i], row k, column i

inline double column_mean(const Grid& x, std::size_t i) {
  double s = 0.0;
  for (const auto& row : x) s += row[i];
  return s / static_cast<double>(x.size());
}

inline double cov(const Grid& x, std::size_t i, std::size_t j) {
  const double mi = column_mean(x, i);
  const double mj = column_mean(x, j);
  double s = 0.0;
  for (const auto& row : x) s += (row[i] - mi) * (row[j] - mj);
  return s / static_cast<double>(x.size());
}

inline double tau(const Grid& x, std::size_t i, std::size_t j) {
  const double mi = column_mean(x, i);
  const double mj = column_mean(x, j);
  const double c = cov(x, i, j);
  double s = 0.0;
  for (const auto& row : x) {
    const double d = (row[i] - mi) * (row[j] - mj) - c;
    s += d * d;
  }
  return s / static_cast<double>(x.size());
}

using IntGrid = std::vector<std::vector<std::int64_t>>;

/// For small integer data: sigma-hat_ij as an exact rational N / n^2, rounded once.
/// Centered entries are (n x - S) / n, so every intermediate stays an integer.
inline double exact_cov(const IntGrid& x, std::size_t i, std::size_t j) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::int64_t si = 0, sj = 0;
  for (const auto& row : x) {
    si += row[i];
    sj += row[j];
  }
  std::int64_t num = 0;  // sum_k (n x_ki - si)(n x_kj - sj) = n^3 sigma-hat
  for (const auto& row : x) num += (n * row[i] - si) * (n * row[j] - sj);
  return static_cast<double>(num) / static_cast<double>(n * n * n);
}

/// tau-hat_ij as an exact rational N / n^7, rounded once.
inline double exact_tau(const IntGrid& x, std::size_t i, std::size_t j) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::int64_t si = 0, sj = 0;
  for (const auto& row : x) {
    si += row[i];
    sj += row[j];
  }
  std::vector<std::int64_t> a;  // n^2 times the centered products
  std::int64_t sa = 0;
  for (const auto& row : x) {
    a.push_back((n * row[i] - si) * (n * row[j] - sj));
    sa += a.back();
  }
  std::int64_t num = 0;  // sum_k (n a_k - sum a)^2 = n^7 tau-hat
  for (std::int64_t v : a) num += (n * v - sa) * (n * v - sa);
  double den = 1.0;
  for (int k = 0; k < 7; ++k) den *= static_cast<double>(n);
  return static_cast<double>(num) / den;
}

/// gamma_l = (1/(nm)) sum_k sum_{i=l..m-1} (x[k][i-l] - mu)(x[k][i] - mu), zero-based.
inline std::vector<double> pooled_autocov(const Grid& x, double* mu_out = nullptr) {
  const std::size_t n = x.size();
  const std::size_t m = x[0].size();
  double mu = 0.0;
  for (const auto& row : x)
    for (double v : row) mu += v;
  mu /= static_cast<double>(n * m);
  std::vector<double> g(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    double s = 0.0;
    for (const auto& row : x)
      for (std::size_t i = l; i < m; ++i) s += (row[i - l] - mu) * (row[i] - mu);
    g[l] = s / static_cast<double>(n * m);
  }
  if (mu_out != nullptr) *mu_out = mu;
  return g;
}

/// Flat-top taper written out case by case.
inline double taper(std::size_t d, std::size_t b) {
  const double dd = static_cast<double>(d);
  const double bb = static_cast<double>(b);
  if (2 * d <= b) return 1.0;
  if (d <= b) return 2.0 - 2.0 * dd / bb;
  return 0.0;
}

/// A linear model written as X_i = sum_u load[i][u] eps_u over a finite
/// set of innovations with E eps = 0, E eps^2 = 1, E eps^4 = 3 + kappa4.
struct Loadings {
  std::vector<std::vector<double>> load;
  double kappa4 = 0.0;
};

/// From a table f[i][t + T] with X_i = sum_t f[i][t+T] eps_{i-t}.
inline Loadings loadings_from_table(const std::vector<std::vector<double>>& f, std::size_t half, double kappa4) {
  const std::size_t m = f.size();
  const std::size_t width = m + 2 * half;  // innovation index u + T lies in [0, m + 2T)
  Loadings out{std::vector<std::vector<double>>(m, std::vector<double>(width, 0.0)), kappa4};
  for (std::size_t i = 0; i < m; ++i) {
    double norm = 0.0;
    for (double v : f[i]) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < f[i].size(); ++c) {
      const long t = static_cast<long>(c) - static_cast<long>(half);
      const long u = static_cast<long>(i) - t + static_cast<long>(half);
      out.load[i][static_cast<std::size_t>(u)] += f[i][c] / norm;
    }
  }
  return out;
}

/// E[X_i X_j] by expanding both sums over innovation indices.
inline double second_moment(const Loadings& l, std::size_t i, std::size_t j) {
  double s = 0.0;
  const std::size_t w = l.load[0].size();
  for (std::size_t u = 0; u < w; ++u)
    for (std::size_t v = 0; v < w; ++v)
      if (u == v) s += l.load[i][u] * l.load[j][v];
  return s;
}

/// E[eps_a eps_b eps_c eps_d] for i.i.d. standardized innovations.
inline double innovation_fourth(std::size_t a, std::size_t b, std::size_t c, std::size_t d, double kappa4) {
  if (a == b && b == c && c == d) return 3.0 + kappa4;
  if ((a == b && c == d) || (a == c && b == d) || (a == d && b == c)) return 1.0;
  return 0.0;
}

/// Cov(X_i X_j, X_k X_l) = E[X_i X_j X_k X_l] - E[X_i X_j] E[X_k X_l] by quadruple expansion.
inline double product_covariance(const Loadings& l, std::size_t i, std::size_t j, std::size_t k, std::size_t q) {
  const std::size_t w = l.load[0].size();
  double e4 = 0.0;
  for (std::size_t a = 0; a < w; ++a) {
    if (l.load[i][a] == 0.0) continue;
    for (std::size_t b = 0; b < w; ++b) {
      if (l.load[j][b] == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) {
        if (l.load[k][c] == 0.0) continue;
        for (std::size_t d = 0; d < w; ++d) {
          if (l.load[q][d] == 0.0) continue;
          e4 += l.load[i][a] * l.load[j][b] * l.load[k][c] * l.load[q][d] * innovation_fourth(a, b, c, d, l.kappa4);
        }
      }
    }
  }
  return e4 - second_moment(l, i, j) * second_moment(l, k, q);
}

/// sup_alpha sup_{|A| = b, alpha not in A} inf_{beta in A} |cor[alpha][beta]|
/// by exhaustive subset search.
inline double gamma_b_exhaustive(const std::vector<std::vector<double>>& cor, std::size_t b) {
  const std::size_t s = cor.size();
  double best = 0.0;
  for (std::size_t a = 0; a < s; ++a) {
    std::vector<std::size_t> others;
    for (std::size_t q = 0; q < s; ++q)
      if (q != a) others.push_back(q);
    if (b > others.size()) continue;
    const std::size_t k = others.size();
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != b) continue;
      double inf = 1e300;
      for (std::size_t r = 0; r < k; ++r)
        if ((mask >> r) & 1u) inf = std::min(inf, std::abs(cor[a][others[r]]));
      best = std::max(best, inf);
    }
  }
  return best;
}

/// Falling-factorial expectation by direct summation over outcomes.
inline double falling_moment(const std::vector<std::pair<double, std::uint64_t>>& outcomes, std::size_t d) {
  double s = 0.0;
  for (const auto& [p, bits] : outcomes) {
    const std::size_t w = static_cast<std::size_t>(__builtin_popcountll(bits));
    double ff = 1.0;
    for (std::size_t r = 0; r < d; ++r) ff *= static_cast<double>(w) - static_cast<double>(r);
    s += p * ff;
  }
  return s;
}

inline double factorial(std::size_t d) {
  double f = 1.0;
  for (std::size_t r = 2; r <= d; ++r) f *= static_cast<double>(r);
  return f;
}

/// Standard normal upper tail via the Taylor series of erf (|x| small) or a
/// Laplace continued fraction (x large); independent of std::erfc.
inline double normal_tail_series(double x) {
  if (x < 0) return 1.0 - normal_tail_series(-x);
  const double pi = 3.14159265358979323846;
  if (x < 3.0) {
    // Phi(x) - 1/2 = phi(x) * sum x^(2k+1) / (1*3*5*...*(2k+1))
    long double term = x;
    long double sum = x;
    for (int k = 1; k < 200; ++k) {
      term *= static_cast<long double>(x) * x / (2.0L * k + 1.0L);
      sum += term;
    }
    const long double phi = std::exp(-0.5L * x * x) / std::sqrt(2.0L * pi);
    return static_cast<double>(0.5L - phi * sum);
  }
  // Lentz-free backward evaluation of x + 1/(x + 2/(x + 3/(x + ...))).
  long double cf = x;
  for (int k = 300; k >= 1; --k) cf = x + k / cf;
  const long double phi = std::exp(-0.5L * x * x) / std::sqrt(2.0L * pi);
  return static_cast<double>(phi / cf);
}

}  // namespace oracle_ref
