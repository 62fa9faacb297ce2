#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "covmax/pair.hpp"

namespace covmax {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A pair's estimated cross-product variance fell below the floor, so the
/// self-normalized ratio is not defined for it.
class DegenerateVariance : public Error {
 public:
  DegenerateVariance(Pair pair, double tau_hat, double floor);

  [[nodiscard]] Pair pair() const noexcept { return pair_; }
  [[nodiscard]] double tau_hat() const noexcept { return tau_hat_; }

 private:
  Pair pair_;
  double tau_hat_;
};

/// The Gumbel normalization needs log log s > 0, i.e. s >= 3.
class CardinalityTooSmall : public Error {
 public:
  explicit CardinalityTooSmall(std::size_t cardinality);

  [[nodiscard]] std::size_t cardinality() const noexcept { return cardinality_; }

 private:
  std::size_t cardinality_;
};

class EmptyIndexSet : public Error {
 public:
  using Error::Error;
};

/// Cross-product variance is not positive because kappa4 sits on its lower
/// bound of -2 (e.g. X_i^2 constant for Rademacher innovations).
class Kappa4Boundary : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// More than 1% of Monte Carlo replications failed.
class StudyAborted : public Error {
 public:
  using Error::Error;
};

}  // namespace covmax
