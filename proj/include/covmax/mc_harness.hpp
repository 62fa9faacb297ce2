#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "covmax/core_stats.hpp"
#include "covmax/data_matrix.hpp"
#include "covmax/processes.hpp"

namespace covmax::mc {

struct IidModel {
  process::InnovationDist innovations = process::InnovationDist::normal();
};

struct StationaryModel {
  process::StationaryLinearSpec spec;
};

struct NonstationaryModel {
  process::NonstationaryLinearSpec spec;
};

using ProcessModel = std::variant<IidModel, StationaryModel, NonstationaryModel>;

/// Multiplies one column (zero-based) after generation, e.g. a variance break.
struct ColumnScale {
  std::size_t column = 0;
  double factor = 1.0;
};

/// A data-generating process plus optional post-hoc column scaling.
struct GeneratorConfig {
  ProcessModel model = IidModel{};
  std::vector<ColumnScale> column_scales;

  /// Deterministic in (n, m, seed); row k uses stream derive_seed(seed, k).
  [[nodiscard]] DataMatrix generate(std::size_t n, std::size_t m, std::uint64_t seed) const;
  /// Exact population covariance, column scaling included.
  [[nodiscard]] Eigen::MatrixXd true_covariance(std::size_t m) const;
};

enum class TestKind { Independence, Identity, Stationarity, Bandedness, Taper, Custom };

struct TestConfig {
  TestKind kind = TestKind::Independence;
  std::size_t band = 0;
  /// Custom null matrix; when empty and sigma0_from_generator is set, the
  /// generator's exact covariance is used.
  std::optional<Eigen::MatrixXd> sigma0;
  bool sigma0_from_generator = false;
  std::optional<core::Normalization> normalization;
};

/// Runs one configured structure test. Custom nulls use pairs with diagonal.
[[nodiscard]] core::TestResult apply_test(const TestConfig& test, const DataMatrix& x,
                                          const Eigen::MatrixXd* sigma0 = nullptr);

struct StudyConfig {
  GeneratorConfig generator;
  TestConfig test;
  std::size_t replications = 1000;
  std::size_t n = 500;
  std::size_t m = 30;
  std::uint64_t master_seed = 0;
  std::vector<double> nominal_levels{0.01, 0.05, 0.10};

  void validate() const;
};

struct StudySummary {
  std::size_t replications = 0;
  std::size_t failures = 0;
  /// One entry per replication; NaN marks a failed replication.
  std::vector<double> statistics;
  std::vector<double> y_values;
  std::vector<double> p_values;
  /// (alpha, share of successful replications with p <= alpha).
  std::vector<std::pair<double, double>> rejection_rates;
  double ks_to_gumbel = 0.0;
  double runtime_seconds = 0.0;

  /// Compares everything except runtime, bitwise for the doubles.
  [[nodiscard]] bool same_results(const StudySummary& other) const;
};

/// Replication r runs on the seed derive_seed(master_seed, r), so results do
/// not depend on `threads`. threads == 0 means hardware concurrency.
/// Throws StudyAborted when more than 1% of replications hit DegenerateVariance.
[[nodiscard]] StudySummary run_study(const StudyConfig& cfg, unsigned threads = 1);

struct SweepRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t replications = 0;
  double ks_to_gumbel = 0.0;
  std::vector<std::pair<double, double>> rejection_rates;
  /// ks exceeds the previous row's ks by more than 0.05.
  bool non_improvement = false;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  [[nodiscard]] bool any_non_improvement() const noexcept;
};

inline constexpr double kSweepTolerance = 0.05;

/// Configs ordered by increasing scale; needs at least two.
[[nodiscard]] SweepTable convergence_sweep(std::span<const StudyConfig> cfgs, unsigned threads = 1);

/// Sorted (value, F_N(value)) points of the empirical CDF, NaN entries dropped.
[[nodiscard]] std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values);

}  // namespace covmax::mc
