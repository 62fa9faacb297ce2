#include "covmax/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "covmax/errors.hpp"
#include "covmax/limit_oracles.hpp"
#include "covmax/rng.hpp"
#include "covmax/structure_tests.hpp"

namespace covmax::mc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

DataMatrix GeneratorConfig::generate(std::size_t n, std::size_t m, std::uint64_t seed) const {
  DataMatrix x = std::visit(
      Overloaded{
          [&](const IidModel& g) { return process::gen_iid(n, m, g.innovations, seed); },
          [&](const StationaryModel& g) { return process::gen_stationary_linear(n, m, g.spec, seed); },
          [&](const NonstationaryModel& g) {
            if (g.spec.m() != m) {
              throw InvalidArgument("non-stationary spec has m = " + std::to_string(g.spec.m()) +
                                    " but the study asks for m = " + std::to_string(m));
            }
            return process::gen_nonstationary_linear(n, g.spec, seed);
          },
      },
      model);
  if (column_scales.empty()) return x;
  Eigen::MatrixXd v = x.values();
  for (const ColumnScale& c : column_scales) {
    if (c.column >= m) throw IndexOutOfRange("column scale refers to column " + std::to_string(c.column + 1));
    v.col(static_cast<Eigen::Index>(c.column)) *= c.factor;
  }
  return DataMatrix(std::move(v));
}

Eigen::MatrixXd GeneratorConfig::true_covariance(std::size_t m) const {
  Eigen::MatrixXd sigma = std::visit(
      Overloaded{
          [&](const IidModel&) -> Eigen::MatrixXd {
            return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
          },
          [&](const StationaryModel& g) { return process::true_cov_stationary(g.spec, m); },
          [&](const NonstationaryModel& g) { return process::true_cov_linear(g.spec); },
      },
      model);
  if (static_cast<std::size_t>(sigma.rows()) != m) throw InvalidArgument("generator dimension mismatch");
  for (const ColumnScale& c : column_scales) {
    if (c.column >= m) throw IndexOutOfRange("column scale refers to column " + std::to_string(c.column + 1));
    const auto k = static_cast<Eigen::Index>(c.column);
    sigma.row(k) *= c.factor;
    sigma.col(k) *= c.factor;
  }
  return sigma;
}

core::TestResult apply_test(const TestConfig& test, const DataMatrix& x, const Eigen::MatrixXd* sigma0) {
  const auto mode = test.normalization;
  switch (test.kind) {
    case TestKind::Independence: return structure::test_independence(x, mode);
    case TestKind::Identity: return structure::test_identity(x, mode);
    case TestKind::Stationarity: return structure::test_stationarity(x, mode);
    case TestKind::Bandedness: return structure::test_bandedness(x, test.band, mode);
    case TestKind::Taper:
      return structure::assess_taper(x, structure::TaperSpec(test.band, x.m()), mode).result;
    case TestKind::Custom: {
      const Eigen::MatrixXd* matrix = sigma0 != nullptr ? sigma0 : (test.sigma0 ? &*test.sigma0 : nullptr);
      if (matrix == nullptr) throw InvalidArgument("custom test needs a null covariance matrix");
      return core::run_test(x, core::NullCovariance::explicit_matrix(*matrix), PairIndexSet::with_diagonal(x.m()),
                            mode);
    }
  }
  throw InvalidArgument("unknown test kind");
}

void StudyConfig::validate() const {
  if (replications < 1) throw InvalidArgument("study needs at least one replication");
  if (n < 2 || m < 2) throw InvalidArgument("study needs n >= 2 and m >= 2");
  for (double a : nominal_levels) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("nominal levels must lie in (0, 1)");
  }
  if (test.kind == TestKind::Custom && !test.sigma0 && !test.sigma0_from_generator) {
    throw InvalidArgument("custom test needs sigma0 or sigma0_from_generator");
  }
}

bool StudySummary::same_results(const StudySummary& other) const {
  if (replications != other.replications || failures != other.failures) return false;
  if (!bitwise_equal(statistics, other.statistics) || !bitwise_equal(y_values, other.y_values) ||
      !bitwise_equal(p_values, other.p_values)) {
    return false;
  }
  if (rejection_rates != other.rejection_rates) return false;
  return std::memcmp(&ks_to_gumbel, &other.ks_to_gumbel, sizeof(double)) == 0;
}

StudySummary run_study(const StudyConfig& cfg, unsigned threads) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  std::optional<Eigen::MatrixXd> sigma0;
  if (cfg.test.kind == TestKind::Custom) {
    sigma0 = cfg.test.sigma0 ? *cfg.test.sigma0 : cfg.generator.true_covariance(cfg.m);
  }

  const std::size_t reps = cfg.replications;
  StudySummary out;
  out.replications = reps;
  out.statistics.assign(reps, kNaN);
  out.y_values.assign(reps, kNaN);
  out.p_values.assign(reps, kNaN);
  std::vector<std::exception_ptr> errors(reps);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) {
      try {
        const DataMatrix x = cfg.generator.generate(cfg.n, cfg.m, derive_seed(cfg.master_seed, r));
        const core::TestResult res = apply_test(cfg.test, x, sigma0 ? &*sigma0 : nullptr);
        out.statistics[r] = res.statistic;
        out.y_values[r] = res.normalized;
        out.p_values[r] = res.p_value;
      } catch (const DegenerateVariance&) {
        // Sentinel stays NaN; counted below.
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> ok_y;
  std::vector<double> ok_p;
  for (std::size_t r = 0; r < reps; ++r) {
    if (std::isnan(out.y_values[r])) {
      ++out.failures;
    } else {
      ok_y.push_back(out.y_values[r]);
      ok_p.push_back(out.p_values[r]);
    }
  }
  if (static_cast<double>(out.failures) > 0.01 * static_cast<double>(reps)) {
    throw StudyAborted(std::to_string(out.failures) + " of " + std::to_string(reps) +
                       " replications hit a degenerate variance");
  }
  if (ok_y.empty()) throw StudyAborted("no replication succeeded");

  for (double alpha : cfg.nominal_levels) {
    const auto hits = std::count_if(ok_p.begin(), ok_p.end(), [alpha](double p) { return p <= alpha; });
    out.rejection_rates.emplace_back(alpha, static_cast<double>(hits) / static_cast<double>(ok_p.size()));
  }
  out.ks_to_gumbel = oracle::ks_distance(ok_y, [](double y) { return core::gumbel_cdf(y); });
  out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

bool SweepTable::any_non_improvement() const noexcept {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.non_improvement; });
}

SweepTable convergence_sweep(std::span<const StudyConfig> cfgs, unsigned threads) {
  if (cfgs.size() < 2) throw InvalidArgument("convergence sweep needs at least two configurations");
  SweepTable table;
  for (const StudyConfig& cfg : cfgs) {
    const StudySummary s = run_study(cfg, threads);
    SweepRow row{cfg.n, cfg.m, cfg.replications, s.ks_to_gumbel, s.rejection_rates, false};
    if (!table.rows.empty()) {
      row.non_improvement = row.ks_to_gumbel > table.rows.back().ks_to_gumbel + kSweepTolerance;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values)
    if (!std::isnan(x)) v.push_back(x);
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(v.size());
  const auto n = static_cast<double>(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out.emplace_back(v[k], static_cast<double>(k + 1) / n);
  return out;
}

}  // namespace covmax::mc
