#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "covmax/pair.hpp"
#include "covmax/pair_index.hpp"
#include "covmax/processes.hpp"

namespace covmax::diag {

inline constexpr std::size_t kDefaultPairCap = 2000;

/// Cor(X_alpha, X_beta) over all pairs of pairs of an index set, with
/// X_(i,j) = X_i X_j.
struct CorrelationTable {
  std::vector<Pair> pairs;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd correlation;
};

/// Throws CapExceeded when |idx| > cap, Kappa4Boundary if some Var(X_i X_j) <= 0.
[[nodiscard]] CorrelationTable product_correlations(const process::NonstationaryLinearSpec& spec,
                                                    const PairIndexSet& idx,
                                                    std::size_t cap = kDefaultPairCap);

/// For each b: max over alpha of the b-th largest |Cor(X_alpha, X_beta)|, beta != alpha.
/// Zero when b exceeds the number of other pairs.
[[nodiscard]] std::vector<double> gamma_b(const Eigen::MatrixXd& correlation,
                                          std::span<const std::size_t> b_grid);

/// For each t: max over alpha of #{beta : |Cor| > t}, alpha itself included.
[[nodiscard]] std::vector<std::size_t> g_counts(const Eigen::MatrixXd& correlation,
                                                std::span<const double> t_grid);

struct DependenceReport {
  std::size_t m = 0;
  std::size_t cardinality = 0;
  double tau_min = 0.0;
  double gamma_max = 0.0;
  std::vector<std::size_t> b_grid;
  std::vector<double> gamma_b;
  /// gamma_b[k] * log(b_grid[k]); the finite-m face of the log-weighted condition.
  std::vector<double> gamma_b_log_b;
  std::vector<double> t_grid;
  std::vector<std::size_t> g_counts;
  double cov_sq_sum = 0.0;
  double kappa4 = 0.0;
  /// max_{i<j} |sigma_ij| over all variables.
  double corr_max_pairs = 0.0;
  bool gamma_b_nonincreasing = true;
  bool g_counts_nonincreasing = true;
};

/// Finite-model left-hand sides of the dependence conditions. Grids are
/// sorted ascending before evaluation.
[[nodiscard]] DependenceReport condition_report(const process::NonstationaryLinearSpec& spec,
                                                const PairIndexSet& idx,
                                                std::vector<std::size_t> b_grid,
                                                std::vector<double> t_grid,
                                                std::size_t cap = kDefaultPairCap);

struct DependenceProfile {
  int p = 2;
  std::vector<double> delta;
  std::vector<double> psi;
  std::vector<double> h;
};

/// ||eps - eps'||_p for an independent copy eps'. p in {2, 4}.
[[nodiscard]] double difference_norm(const process::InnovationDist& dist, int p);

/// delta_p(i) = |a_i| ||eps - eps'||_p and its tail sums Psi_p(k).
[[nodiscard]] DependenceProfile physical_dep_linear(std::span<const double> coeffs, int p,
                                                    const process::InnovationDist& dist);

/// Psi_p(k) = (sum_{j>=k} delta_p(j)^2)^(1/2); zero beyond the truncation.
[[nodiscard]] double psi_tail(const DependenceProfile& profile, std::size_t k);

/// h(k) = max_i (sum_{|t| >= floor(k/2)} f_{i,t}^2)^(1/2) for k = 0..2T+2.
[[nodiscard]] std::vector<double> h_profile(const process::NonstationaryLinearSpec& spec);

/// h(k) with zero beyond the stored range.
[[nodiscard]] double h_at(std::span<const double> h, std::size_t k) noexcept;

struct AbsoluteMoment {
  double p = 0.0;
  bool finite = true;
  double closed_form = 0.0;
  /// Numerical integral of |x|^p against the density (exact sum for Rademacher).
  double quadrature = 0.0;
};

struct ExponentialMoment {
  double t = 0.0;
  double p = 0.0;
  bool finite = true;
  double value = 0.0;
};

struct MomentSummary {
  std::vector<AbsoluteMoment> absolute;
  std::vector<ExponentialMoment> exponential;
};

/// E|eps|^p in closed form; +inf when the moment does not exist.
[[nodiscard]] double absolute_moment(const process::InnovationDist& dist, double p);

/// E|eps|^p by quadrature of the density.
[[nodiscard]] double absolute_moment_quadrature(const process::InnovationDist& dist, double p);

/// E exp(t |eps|^p); +inf when it diverges.
[[nodiscard]] double exponential_moment(const process::InnovationDist& dist, double t, double p);

[[nodiscard]] MomentSummary moment_summaries(const process::InnovationDist& dist,
                                             std::span<const double> p_grid,
                                             std::span<const double> t_grid);

}  // namespace covmax::diag
