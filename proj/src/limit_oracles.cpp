#include "covmax/limit_oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "covmax/errors.hpp"
#include "covmax/rng.hpp"

namespace covmax::oracle {

namespace {

double falling_factorial(std::size_t w, std::size_t d) {
  if (d > w) return 0.0;
  double out = 1.0;
  for (std::size_t r = 0; r < d; ++r) out *= static_cast<double>(w - r);
  return out;
}

/// C(s, d) for real s, as a product; exact for small integer arguments.
double binomial(double s, std::size_t d) {
  if (static_cast<double>(d) > s) return 0.0;
  double out = 1.0;
  for (std::size_t r = 0; r < d; ++r) out *= (s - static_cast<double>(r)) / static_cast<double>(r + 1);
  return out;
}

bool is_identity(const Eigen::MatrixXd& r) {
  return r.rows() == r.cols() && r.isIdentity(0.0);
}

}  // namespace

EnumerableEventSystem::EnumerableEventSystem(std::vector<Outcome> outcomes, std::size_t event_count)
    : outcomes_(std::move(outcomes)), event_count_(event_count) {
  if (event_count_ == 0 || event_count_ > 64) throw InvalidArgument("event count must lie in 1..64");
  const std::uint64_t allowed = event_count_ == 64 ? ~0ULL : (1ULL << event_count_) - 1;
  long double total = 0.0L;
  for (const Outcome& o : outcomes_) {
    if (!(o.probability >= 0.0) || !std::isfinite(o.probability)) {
      throw InvalidArgument("outcome probabilities must be finite and nonnegative");
    }
    if ((o.events & ~allowed) != 0) throw InvalidArgument("outcome references an event beyond event_count");
    total += o.probability;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-12) {
    throw InvalidArgument("outcome probabilities sum to " + std::to_string(static_cast<double>(total)));
  }
}

double factorial_moment(const EnumerableEventSystem& sys, std::size_t d) {
  if (d == 0) throw InvalidArgument("factorial moment order must be >= 1");
  long double acc = 0.0L;
  for (const Outcome& o : sys.outcomes()) {
    acc += o.probability * falling_factorial(static_cast<std::size_t>(std::popcount(o.events)), d);
  }
  return static_cast<double>(acc);
}

double subset_probability_sum(const EnumerableEventSystem& sys, std::size_t d, std::size_t cap) {
  if (d == 0) throw InvalidArgument("subset size must be >= 1");
  const std::size_t s = sys.event_count();
  if (s > cap) {
    throw CapExceeded("subset enumeration over " + std::to_string(s) + " events exceeds cap " + std::to_string(cap));
  }
  if (d > s) return 0.0;

  // Walk the d-subsets of {0..s-1} as index combinations in lexicographic order.
  std::vector<std::size_t> combo(d);
  for (std::size_t r = 0; r < d; ++r) combo[r] = r;
  long double total = 0.0L;
  while (true) {
    std::uint64_t mask = 0;
    for (std::size_t e : combo) mask |= 1ULL << e;
    for (const Outcome& o : sys.outcomes()) {
      if ((o.events & mask) == mask) total += o.probability;
    }
    std::size_t r = d;
    while (r > 0 && combo[r - 1] == s - d + (r - 1)) --r;
    if (r == 0) break;
    ++combo[r - 1];
    for (std::size_t q = r; q < d; ++q) combo[q] = combo[q - 1] + 1;
  }
  return static_cast<double>(total);
}

double normal_upper_tail(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double exceedance_threshold(double s, double z) {
  if (!(s > std::numbers::e)) throw InvalidArgument("exceedance threshold needs s > e");
  const double ls = std::log(s);
  const double sq = 2.0 * ls - std::log(ls) - std::log(std::numbers::pi) + 2.0 * z;
  if (!(sq > 0.0)) throw InvalidArgument("exceedance threshold squared is not positive");
  return std::sqrt(sq);
}

ExceedanceEstimate gaussian_exceedance_sum(const CorrelationModel& sigma, double z_n, std::size_t d,
                                           const ExceedanceMethod& method) {
  if (d == 0) throw InvalidArgument("subset size must be >= 1");
  const bool independent =
      std::holds_alternative<IndependentCoordinates>(sigma) || is_identity(std::get<Eigen::MatrixXd>(sigma));
  const double s = std::holds_alternative<IndependentCoordinates>(sigma)
                       ? std::get<IndependentCoordinates>(sigma).s
                       : static_cast<double>(std::get<Eigen::MatrixXd>(sigma).rows());

  if (std::holds_alternative<ExactIndependent>(method)) {
    if (!independent) throw InvalidArgument("exact exceedance sums need the identity correlation");
    const double q = 2.0 * normal_upper_tail(z_n);
    return {binomial(s, d) * std::pow(q, static_cast<double>(d)), 0.0};
  }

  const auto& mc = std::get<MonteCarlo>(method);
  if (mc.replications < 2) throw InvalidArgument("Monte Carlo exceedance needs at least 2 replications");
  const auto dim = static_cast<Eigen::Index>(s);
  if (std::holds_alternative<IndependentCoordinates>(sigma) && s > 1e6) {
    throw CapExceeded("Monte Carlo exceedance limited to 1e6 coordinates");
  }
  Eigen::MatrixXd factor;
  if (!independent) {
    const Eigen::MatrixXd& r = std::get<Eigen::MatrixXd>(sigma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
    if (eig.eigenvalues().minCoeff() < -1e-10) throw InvalidArgument("correlation matrix is not positive semidefinite");
    factor = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  Engine engine = make_engine(derive_seed(mc.seed, 0));
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(dim);
  Eigen::VectorXd z(dim);
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  for (std::size_t r = 0; r < mc.replications; ++r) {
    for (Eigen::Index k = 0; k < dim; ++k) g(k) = normal(engine);
    if (independent) {
      z = g;
    } else {
      z.noalias() = factor * g;
    }
    std::size_t w = 0;
    for (Eigen::Index k = 0; k < dim; ++k)
      if (std::abs(z(k)) > z_n) ++w;
    const double v = binomial(static_cast<double>(w), d);
    sum += v;
    sum_sq += static_cast<long double>(v) * v;
  }
  const auto reps = static_cast<long double>(mc.replications);
  const long double mean = sum / reps;
  const long double var = std::max(0.0L, (sum_sq - reps * mean * mean) / (reps - 1.0L));
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / reps))};
}

double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InvalidArgument("ks_distance needs a non-empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw InvalidArgument("ks_distance sample contains non-finite values");
  }
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double f = cdf(sorted[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

}  // namespace covmax::oracle
