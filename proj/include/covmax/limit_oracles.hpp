#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace covmax::oracle {

/// One atom of a finite probability space: its mass and which events hold.
struct Outcome {
  double probability = 0.0;
  std::uint64_t events = 0;  ///< bit e set iff event e occurs
};

/// Finite probability space carrying s <= 64 events.
class EnumerableEventSystem {
 public:
  /// Throws unless probabilities are nonnegative and sum to 1 within 1e-12,
  /// and no outcome sets a bit at or beyond event_count.
  EnumerableEventSystem(std::vector<Outcome> outcomes, std::size_t event_count);

  [[nodiscard]] std::span<const Outcome> outcomes() const noexcept { return outcomes_; }
  [[nodiscard]] std::size_t event_count() const noexcept { return event_count_; }

 private:
  std::vector<Outcome> outcomes_;
  std::size_t event_count_;
};

/// E[W (W-1) ... (W-d+1)] with W the number of events that occur.
[[nodiscard]] double factorial_moment(const EnumerableEventSystem& sys, std::size_t d);

inline constexpr std::size_t kSubsetEventCap = 20;

/// Q_d = sum over d-subsets A of P(all events in A occur), by explicit
/// subset enumeration. Throws CapExceeded when s > cap.
[[nodiscard]] double subset_probability_sum(const EnumerableEventSystem& sys, std::size_t d,
                                            std::size_t cap = kSubsetEventCap);

/// P(Z > x) for standard normal Z.
[[nodiscard]] double normal_upper_tail(double x) noexcept;

/// z_n with z_n^2 = 2 log s - log log s - log pi + 2z. Throws if the right side is not positive.
[[nodiscard]] double exceedance_threshold(double s, double z);

/// Identity correlation of dimension s, stored implicitly.
struct IndependentCoordinates {
  double s = 0.0;
};

using CorrelationModel = std::variant<IndependentCoordinates, Eigen::MatrixXd>;

struct ExactIndependent {};

struct MonteCarlo {
  std::size_t replications = 100000;
  std::uint64_t seed = 0;
};

using ExceedanceMethod = std::variant<ExactIndependent, MonteCarlo>;

struct ExceedanceEstimate {
  double value = 0.0;
  double standard_error = 0.0;  ///< zero for exact evaluation
};

/**
 * @brief Q'_d = sum over d-subsets A of P(|Z_i| > z_n for all i in A).
 *
 * ExactIndependent: C(s, d) (2 P(Z > z_n))^d; requires the identity.
 * MonteCarlo: draws Z ~ N(0, R) and averages C(W, d) with W the number of
 * exceedances, reporting the standard error of the mean.
 */
[[nodiscard]] ExceedanceEstimate gaussian_exceedance_sum(const CorrelationModel& sigma, double z_n,
                                                         std::size_t d, const ExceedanceMethod& method);

/// sup |F_N - F| over the sample points, both one-sided gaps.
[[nodiscard]] double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);

}  // namespace covmax::oracle
